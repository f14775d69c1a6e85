#include "codesdp/terwilliger.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace codesdp::terwilliger {

using comb::binomial;
using comb::ipow;

bool class_valid(int q, int n, const TripleClass& c) {
    if (c.p < 0 || c.p > c.t) return false;
    if (c.t > c.i || c.t > c.j) return false;
    if (c.i + c.j > n + c.t) return false;
    if (c.i > n || c.j > n || c.i < 0 || c.j < 0) return false;
    if (q == 2 && c.p != c.t) return false;
    return true;
}

ClassIndex::ClassIndex(int q, int n) : q_(q), n_(n) {
    if (q < 2 || n < 1) throw std::invalid_argument("ClassIndex: require q >= 2, n >= 1");
    const int s = n + 1;
    lut_.assign(static_cast<size_t>(s) * s * s * s, -1);
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j)
            for (int t = 0; t <= std::min(i, j); ++t)
                for (int p = 0; p <= t; ++p) {
                    TripleClass c{i, j, t, p};
                    if (!class_valid(q, n, c)) continue;
                    lut_[((static_cast<size_t>(i) * s + j) * s + t) * s + p] =
                        static_cast<int>(classes_.size());
                    classes_.push_back(c);
                }
}

int ClassIndex::lut_at(int i, int j, int t, int p) const {
    const int s = n_ + 1;
    if (i < 0 || j < 0 || t < 0 || p < 0 || i > n_ || j > n_ || t > n_ || p > n_) return -1;
    return lut_[((static_cast<size_t>(i) * s + j) * s + t) * s + p];
}

int ClassIndex::ordinal(const TripleClass& c) const { return lut_at(c.i, c.j, c.t, c.p); }

std::vector<TripleClass> ClassIndex::orbit(const TripleClass& c) const {
    if (ordinal(c) < 0) throw std::invalid_argument("orbit: class not in I(q,n)");
    const int m = c.t - c.p;
    const int d = c.dist();
    const std::array<int, 3> tri{c.i, c.j, d};
    std::vector<TripleClass> out;
    // Every assignment of two of the three pairwise distances to (i', j')
    // determines (t', p') from t'+p' = i'+j'-d' and t'-p' = m.
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            if (a == b) continue;
            const int ci = tri[a], cj = tri[b], cd = tri[3 - a - b];
            const int tp = ci + cj - cd;
            if ((tp + m) % 2 != 0) continue;
            TripleClass cand{ci, cj, (tp + m) / 2, (tp - m) / 2};
            if (ordinal(cand) >= 0) out.push_back(cand);
        }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

int ClassIndex::canonical(const TripleClass& c) const { return ordinal(orbit(c).front()); }

ClassIndex enumerate_classes(int q, int n) { return ClassIndex(q, n); }

Int gamma(int q, int n, const TripleClass& c) {
    if (!class_valid(q, n, c)) throw std::invalid_argument("gamma: class not in I(q,n)");
    const Int mult = comb::multinomial(n, {c.p, c.t - c.p, c.i - c.t, c.j - c.t});
    return ipow(q - 1, static_cast<unsigned long>(c.i + c.j - c.t)) *
           ipow(q - 2, static_cast<unsigned long>(c.t - c.p)) * mult;
}

Int beta(int m, int i, int j, int k, int t) {
    if (k < 0 || k > m) throw std::invalid_argument("beta: require 0 <= k <= m");
    Int sum = 0;
    for (int p = 0; p <= k; ++p) {
        Int term = binomial(k, p) * binomial(i - p, t - p) * binomial(m + p - i - k, m + t - i - j);
        if ((k - p) % 2)
            sum -= term;
        else
            sum += term;
    }
    return binomial(m - 2 * k, i - k) * sum;
}

Int beta_symmetric(int m, int i, int j, int k, int t) {
    Int sum = 0;
    for (int u = t; u <= m; ++u) {
        Int term = binomial(u, t) * binomial(m - 2 * k, u - k) * binomial(m - k - u, i - u) *
                   binomial(m - k - u, j - u);
        if ((u - t) % 2)
            sum -= term;
        else
            sum += term;
    }
    return sum;
}

Int alpha_core(int q, int n, int i, int j, int t, int p, int a, int k) {
    Int gsum = 0;
    for (int g = 0; g <= p; ++g) {
        const int e = t - a - p + g;
        if (e < 0) continue;
        Int term = binomial(a, g) * binomial(t - a, p - g) * ipow(q - 2, static_cast<unsigned long>(e));
        if ((a - g) % 2)
            gsum -= term;
        else
            gsum += term;
    }
    return beta(n - a, i - a, j - a, k - a, t - a) * gsum;
}

double alpha(int q, int n, int i, int j, int t, int p, int a, int k) {
    if (q < 3) throw std::invalid_argument("alpha: requires q >= 3 (use beta for q = 2)");
    if (a < 0 || a > k || k > std::min(i, j))
        throw std::invalid_argument("alpha: require 0 <= a <= k <= min(i,j)");
    const Int core = alpha_core(q, n, i, j, t, p, a, k);
    const int e = i + j - 2 * t;  // exponent of sqrt(q-1), always >= 0
    return core.get_d() * std::pow(std::sqrt(static_cast<double>(q - 1)), e);
}

std::vector<BlockSpec> block_specs(int q, int n) {
    if (q < 2 || n < 1) throw std::invalid_argument("block_specs: require q >= 2, n >= 1");
    std::vector<BlockSpec> specs;
    const int amax = (q == 2) ? 0 : n;
    for (int a = 0; a <= amax; ++a)
        for (int k = a; 2 * k - a <= n; ++k) {
            BlockSpec s;
            s.a = a;
            s.k = k;
            s.size = n + a + 1 - 2 * k;
            s.multiplicity = binomial(n, a) * ipow(q - 2, static_cast<unsigned long>(a)) *
                             (binomial(n - a, k - a) - binomial(n - a, k - a - 1));
            for (int i = k; i <= n + a - k; ++i) s.row_labels.push_back(i);
            specs.push_back(std::move(s));
        }
    return specs;
}

double& AlgebraElement::operator[](const TripleClass& c) {
    const int o = index->ordinal(c);
    if (o < 0) throw std::invalid_argument("AlgebraElement: class not in I(q,n)");
    return coeff[o];
}

double AlgebraElement::get(const TripleClass& c) const {
    const int o = index->ordinal(c);
    if (o < 0) throw std::invalid_argument("AlgebraElement: class not in I(q,n)");
    return coeff[o];
}

double BlockDiagonalForm::min_eigenvalue() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& b : blocks) {
        if (b.rows() == 0) continue;
        Eigen::MatrixXd s = 0.5 * (b + b.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
        m = std::min(m, es.eigenvalues().minCoeff());
    }
    return m;
}

namespace {

// Shared assembly for the (bordered) block images. `coefficient` gives the
// entry contribution of class (i,j,t,p) in block (a,k).
template <typename Coef>
BlockDiagonalForm assemble_blocks(const AlgebraElement& x, Coef coefficient,
                                  std::optional<double> corner) {
    const ClassIndex& idx = *x.index;
    const int n = idx.n();
    BlockDiagonalForm form;
    form.specs = block_specs(idx.q(), n);
    form.bordered = corner.has_value();
    for (const auto& spec : form.specs) {
        const int a = spec.a, k = spec.k, sz = spec.size;
        const bool with_border = form.bordered && a == 0 && k == 0;
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(sz + (with_border ? 1 : 0),
                                                  sz + (with_border ? 1 : 0));
        const int off = with_border ? 1 : 0;
        for (int i = k; i <= n + a - k; ++i)
            for (int j = k; j <= n + a - k; ++j) {
                double v = 0.0;
                for (int t = 0; t <= std::min(i, j); ++t)
                    for (int p = (idx.binary() ? t : 0); p <= t; ++p) {
                        const int o = idx.ordinal(TripleClass{i, j, t, p});
                        if (o < 0 || x.coeff[o] == 0.0) continue;
                        v += coefficient(i, j, t, p, a, k) * x.coeff[o];
                    }
                B(off + i - k, off + j - k) = v;
            }
        if (with_border) {
            // the border scaling matches the prefactor-free blocks: under the
            // diagonal congruence that removes the binomial^{-1/2} prefactors
            // the border picks up C(n,i)^{1/2}, giving C(n,i) sqrt(q-1)^i
            B(0, 0) = *corner;
            for (int i = 0; i <= n; ++i) {
                const int o = idx.ordinal(TripleClass{i, i, i, i});
                const double xi = binomial(n, i).get_d() *
                                  std::pow(std::sqrt(static_cast<double>(idx.q() - 1)), i) *
                                  (o >= 0 ? x.coeff[o] : 0.0);
                B(0, 1 + i) = xi;
                B(1 + i, 0) = xi;
            }
        }
        form.blocks.push_back(std::move(B));
    }
    return form;
}

}  // namespace

BlockDiagonalForm block_image(const AlgebraElement& x) {
    const ClassIndex& idx = *x.index;
    if (idx.binary()) throw std::invalid_argument("block_image: use binary_block_image for q = 2");
    const int q = idx.q(), n = idx.n();
    return assemble_blocks(
        x, [q, n](int i, int j, int t, int p, int a, int k) { return alpha(q, n, i, j, t, p, a, k); },
        std::nullopt);
}

BlockDiagonalForm bordered_block_image(const AlgebraElement& x, double corner) {
    const ClassIndex& idx = *x.index;
    if (idx.binary())
        throw std::invalid_argument("bordered_block_image: use binary variant for q = 2");
    const int q = idx.q(), n = idx.n();
    return assemble_blocks(
        x, [q, n](int i, int j, int t, int p, int a, int k) { return alpha(q, n, i, j, t, p, a, k); },
        corner);
}

BlockDiagonalForm binary_block_image(const AlgebraElement& x) {
    const ClassIndex& idx = *x.index;
    if (!idx.binary()) throw std::invalid_argument("binary_block_image: requires q = 2");
    const int n = idx.n();
    return assemble_blocks(
        x, [n](int i, int j, int t, int /*p*/, int /*a*/, int k) { return beta(n, i, j, k, t).get_d(); },
        std::nullopt);
}

BlockDiagonalForm binary_bordered_block_image(const AlgebraElement& x, double corner) {
    const ClassIndex& idx = *x.index;
    if (!idx.binary()) throw std::invalid_argument("binary_bordered_block_image: requires q = 2");
    const int n = idx.n();
    return assemble_blocks(
        x, [n](int i, int j, int t, int /*p*/, int /*a*/, int k) { return beta(n, i, j, k, t).get_d(); },
        corner);
}

// ---- Johnson scheme ---------------------------------------------------------

std::vector<JohnsonClass> enumerate_johnson_classes(int n, int w) {
    if (w < 1 || 2 * w > n) throw std::invalid_argument("require 1 <= w <= n/2");
    std::vector<JohnsonClass> out;
    for (int i = 0; i <= w; ++i)
        for (int j = 0; j <= w; ++j)
            for (int s = std::max(0, i + j - w); s <= std::min(i, j); ++s)
                for (int t = std::max(0, (w - i) + (w - j) - (n - w)); t <= std::min(w - i, w - j); ++t)
                    out.push_back(JohnsonClass{i, j, s, t});
    return out;
}

JohnsonBlockForm johnson_block_image(int n, int w,
                                     const std::vector<std::pair<JohnsonClass, double>>& coeffs) {
    if (w < 1 || 2 * w > n) throw std::invalid_argument("johnson_block_image: require 1 <= w <= n/2");
    JohnsonBlockForm form;
    for (int k = 0; k <= w / 2; ++k)
        for (int kp = 0; kp <= (n - w) / 2; ++kp) {
            if (k + kp > w) continue;
            JohnsonBlockSpec spec;
            spec.k = k;
            spec.kp = kp;
            const int lo = std::max(k, 2 * w - n + kp);
            const int hi = std::min(w - k, w - kp);
            for (int i = lo; i <= hi; ++i) spec.row_labels.push_back(i);
            if (spec.row_labels.empty()) continue;
            spec.multiplicity = (binomial(w, k) - binomial(w, k - 1)) *
                                (binomial(n - w, kp) - binomial(n - w, kp - 1));
            const int sz = static_cast<int>(spec.row_labels.size());
            Eigen::MatrixXd B = Eigen::MatrixXd::Zero(sz, sz);
            for (const auto& [c, v] : coeffs) {
                auto ri = std::find(spec.row_labels.begin(), spec.row_labels.end(), c.i);
                auto rj = std::find(spec.row_labels.begin(), spec.row_labels.end(), c.j);
                if (ri == spec.row_labels.end() || rj == spec.row_labels.end()) continue;
                const double e = beta(w, c.i, c.j, k, c.s).get_d() *
                                 beta(n - w, w - c.i, w - c.j, kp, c.t).get_d();
                B(ri - spec.row_labels.begin(), rj - spec.row_labels.begin()) += v * e;
            }
            form.specs.push_back(std::move(spec));
            form.blocks.push_back(std::move(B));
        }
    return form;
}

// ---- serialization ----------------------------------------------------------

void write_element(std::ostream& os, const AlgebraElement& x) {
    const ClassIndex& idx = *x.index;
    os << idx.q() << ' ' << idx.n() << '\n';
    std::ostringstream tmp;
    tmp.precision(17);
    for (int o = 0; o < idx.size(); ++o) {
        const TripleClass& c = idx.at(o);
        tmp.str("");
        tmp << c.i << ' ' << c.j << ' ' << c.t << ' ' << c.p << ' ' << x.coeff[o] << '\n';
        os << tmp.str();
    }
}

AlgebraElement read_element(std::istream& is, const ClassIndex& idx) {
    std::string line;
    int lineno = 0;
    if (!std::getline(is, line)) throw std::runtime_error("element: empty input");
    ++lineno;
    {
        std::istringstream hs(line);
        int q = 0, n = 0;
        if (!(hs >> q >> n)) throw std::runtime_error("element: bad header at line 1");
        if (q != idx.q() || n != idx.n())
            throw std::runtime_error("element: header (q,n) does not match the expected index");
    }
    AlgebraElement x(idx);
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        TripleClass c;
        std::string val;
        if (!(ls >> c.i >> c.j >> c.t >> c.p >> val))
            throw std::runtime_error("element: parse error at line " + std::to_string(lineno));
        const int o = idx.ordinal(c);
        if (o < 0)
            throw std::runtime_error("element: class not in I(q,n) at line " + std::to_string(lineno));
        if (val.find('/') != std::string::npos) {
            Rat r(val);
            r.canonicalize();
            x.coeff[o] = r.get_d();
        } else {
            x.coeff[o] = std::stod(val);
        }
    }
    return x;
}

}  // namespace codesdp::terwilliger
