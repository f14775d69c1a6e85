#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <stdexcept>

#include "codesdp/terwilliger.hpp"

namespace codesdp::terwilliger {

using comb::binomial;

namespace {

int word_digit(int word, int pos, int q) {
    for (int h = 0; h < pos; ++h) word /= q;
    return word % q;
}

unsigned word_support(int word, int n, int q) {
    unsigned s = 0;
    for (int h = 0; h < n; ++h) {
        if (word % q != 0) s |= 1u << h;
        word /= q;
    }
    return s;
}

std::vector<unsigned> subsets_of(unsigned mask, int size) {
    std::vector<unsigned> out;
    // iterate over all submasks, filter by popcount
    for (unsigned s = mask;; s = (s - 1) & mask) {
        if (std::popcount(s) == size) out.push_back(s);
        if (s == 0) break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Orthonormal basis of L_j over the j-subsets of `ground`: the null space of
// the down-set incidence map to (j-1)-subsets. The dimension must come out as
// C(m,j) - C(m,j-1), which is a hard check on the numerics.
std::vector<Eigen::VectorXd> l_space_basis(unsigned ground, int j,
                                           const std::vector<unsigned>& jsets) {
    const int m = std::popcount(ground);
    const long expected = Int(binomial(m, j) - binomial(m, j - 1)).get_si();
    if (j == 0) {
        std::vector<Eigen::VectorXd> basis;
        Eigen::VectorXd e(1);
        e(0) = 1.0;
        basis.push_back(e);
        return basis;
    }
    const std::vector<unsigned> lower = subsets_of(ground, j - 1);
    Eigen::MatrixXd A(lower.size(), jsets.size());
    for (size_t r = 0; r < lower.size(); ++r)
        for (size_t c = 0; c < jsets.size(); ++c)
            A(r, c) = ((lower[r] & jsets[c]) == lower[r]) ? 1.0 : 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cutoff = 1e-8 * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
    int rank = 0;
    for (int s = 0; s < sv.size(); ++s)
        if (sv(s) > cutoff) ++rank;
    const int dim = static_cast<int>(jsets.size()) - rank;
    if (dim != expected)
        throw std::runtime_error("dense oracle: null space dimension does not match C(m,k)-C(m,k-1)");
    std::vector<Eigen::VectorXd> basis;
    for (int c = 0; c < dim; ++c) basis.push_back(svd.matrixV().col(rank + c));
    return basis;
}

}  // namespace

DenseOracle::DenseOracle(int q, int n) : q_(q), n_(n), index_(q, n) {
    double sp = std::pow(static_cast<double>(q), n);
    if (sp > 4096.0) throw std::invalid_argument("DenseOracle: q^n exceeds the 4096 size limit");
    space_ = static_cast<int>(std::lround(sp));

    pair_class_.assign(static_cast<size_t>(space_) * space_, -1);
    for (int u = 0; u < space_; ++u)
        for (int v = 0; v < space_; ++v) {
            TripleClass c{0, 0, 0, 0};
            int uu = u, vv = v;
            for (int h = 0; h < n; ++h) {
                const int a = uu % q, b = vv % q;
                uu /= q;
                vv /= q;
                if (a != 0) ++c.i;
                if (b != 0) ++c.j;
                if (a != 0 && b != 0) ++c.t;
                if (a != 0 && a == b) ++c.p;
            }
            pair_class_[static_cast<size_t>(u) * space_ + v] = index_.ordinal(c);
        }

    // Assemble U column by column from the Psi vectors. The phase comes from
    // a primitive (q-1)-th root of unity; for q = 2 everything is real and
    // the columns reduce to the u_{k,b,i}.
    auto phase = [q](long ip) {
        if (q == 2) return std::complex<double>(1.0, 0.0);
        const long r = ip % (q - 1);
        return std::exp(std::complex<double>(0.0, 2.0 * std::numbers::pi * r / (q - 1)));
    };
    U_.resize(space_, space_);
    const unsigned full = (n >= 32) ? ~0u : ((1u << n) - 1u);

    // Words with letters in {1,..,q-2} on their support (none when q = 2,
    // except the all-zero word).
    std::vector<int> a_words;
    for (int w = 0; w < space_; ++w) {
        bool ok = true;
        for (int h = 0; h < n && ok; ++h)
            if (word_digit(w, h, q) == q - 1) ok = false;
        if (ok) a_words.push_back(w);
    }

    int col = 0;
    for (int a = 0; a <= n; ++a) {
        for (int aw : a_words) {
            const unsigned sa = word_support(aw, n, q);
            if (std::popcount(sa) != a) continue;
            const unsigned ground = full & ~sa;
            for (int k = a; 2 * k - a <= n; ++k) {
                const std::vector<unsigned> ksets = subsets_of(ground, k - a);
                const auto basis = l_space_basis(ground, k - a, ksets);
                std::map<unsigned, int> kpos;
                for (size_t s = 0; s < ksets.size(); ++s) kpos[ksets[s]] = static_cast<int>(s);
                for (size_t bi = 0; bi < basis.size(); ++bi) {
                    const Eigen::VectorXd& b = basis[bi];
                    for (int i = k; i <= n + a - k; ++i) {
                        const double norm =
                            std::pow(static_cast<double>(q - 1), -0.5 * i) /
                            std::sqrt(binomial(n + a - 2 * k, i - k).get_d());
                        Eigen::VectorXcd column = Eigen::VectorXcd::Zero(space_);
                        for (int x = 0; x < space_; ++x) {
                            const unsigned sx = word_support(x, n, q);
                            if (std::popcount(sx) != i) continue;
                            if ((sx & sa) != sa) continue;
                            // (C_{i-a,k-a} b) at S(x)\S(a): sum of b over
                            // (k-a)-subsets of it.
                            double cb = 0.0;
                            for (unsigned sub = (sx & ~sa);; sub = (sub - 1) & (sx & ~sa)) {
                                if (std::popcount(sub) == k - a) {
                                    auto it = kpos.find(sub);
                                    if (it != kpos.end()) cb += b(it->second);
                                }
                                if (sub == 0) break;
                            }
                            if (cb == 0.0) continue;
                            long ip = 0;
                            for (int h = 0; h < n; ++h)
                                ip += static_cast<long>(word_digit(aw, h, q)) * word_digit(x, h, q);
                            column(x) = norm * cb * phase(ip);
                        }
                        U_.col(col) = column;
                        columns_.push_back(Column{a, k, i, aw, static_cast<int>(bi)});
                        ++col;
                    }
                }
            }
        }
    }
    if (col != space_) throw std::runtime_error("dense oracle: column count does not match q^n");
}

Eigen::MatrixXd DenseOracle::dense_matrix(const AlgebraElement& x) const {
    Eigen::MatrixXd M(space_, space_);
    for (int u = 0; u < space_; ++u)
        for (int v = 0; v < space_; ++v) M(u, v) = x.coeff[pair_class(u, v)];
    return M;
}

Eigen::MatrixXd DenseOracle::dense_bordered(const AlgebraElement& x, double corner) const {
    Eigen::MatrixXd M = dense_matrix(x);
    Eigen::MatrixXd R(space_ + 1, space_ + 1);
    R(0, 0) = corner;
    for (int u = 0; u < space_; ++u) {
        R(0, 1 + u) = M(u, u);
        R(1 + u, 0) = M(u, u);
    }
    R.block(1, 1, space_, space_) = M;
    return R;
}

Eigen::MatrixXcd DenseOracle::conjugated(const AlgebraElement& x) const {
    Eigen::MatrixXd M = dense_matrix(x);
    return U_.adjoint() * M * U_;
}

double DenseOracle::unitarity_error() const {
    Eigen::MatrixXcd E = U_.adjoint() * U_ - Eigen::MatrixXcd::Identity(space_, space_);
    return E.cwiseAbs().maxCoeff();
}

// ---- Johnson oracle ---------------------------------------------------------

JohnsonDenseOracle::JohnsonDenseOracle(int n, int w) : n_(n), w_(w) {
    if (w < 1 || 2 * w > n || n > 20) throw std::invalid_argument("JohnsonDenseOracle: bad (n,w)");
    for (unsigned s = 0; s < (1u << n); ++s)
        if (std::popcount(s) == w) subsets_.push_back(s);
    classes_ = enumerate_johnson_classes(n, w);
    const unsigned W = (1u << w) - 1u;  // fixed reference w-set
    auto class_of = [&](unsigned U, unsigned V) {
        JohnsonClass c;
        c.i = std::popcount(U & W);
        c.j = std::popcount(V & W);
        c.s = std::popcount(U & V & W);
        c.t = std::popcount(U & V & ~W);
        return c;
    };
    const int N = space();
    pair_class_.assign(static_cast<size_t>(N) * N, -1);
    for (int u = 0; u < N; ++u)
        for (int v = 0; v < N; ++v) {
            const JohnsonClass c = class_of(subsets_[u], subsets_[v]);
            auto it = std::find(classes_.begin(), classes_.end(), c);
            if (it == classes_.end()) throw std::runtime_error("Johnson oracle: unlisted class");
            pair_class_[static_cast<size_t>(u) * N + v] = static_cast<int>(it - classes_.begin());
        }
}

Eigen::MatrixXd JohnsonDenseOracle::dense_matrix(
    const std::vector<std::pair<JohnsonClass, double>>& coeffs) const {
    const int N = space();
    std::vector<double> by_class(classes_.size(), 0.0);
    for (const auto& [c, v] : coeffs) {
        auto it = std::find(classes_.begin(), classes_.end(), c);
        if (it == classes_.end()) throw std::invalid_argument("Johnson oracle: invalid class");
        by_class[it - classes_.begin()] += v;
    }
    Eigen::MatrixXd M(N, N);
    for (int u = 0; u < N; ++u)
        for (int v = 0; v < N; ++v) M(u, v) = by_class[pair_class_[static_cast<size_t>(u) * N + v]];
    return M;
}

}  // namespace codesdp::terwilliger
