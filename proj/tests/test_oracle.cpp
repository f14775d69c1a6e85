#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "codesdp/terwilliger.hpp"

namespace tw = codesdp::terwilliger;
using codesdp::comb::binomial;
using codesdp::comb::ipow;

namespace {

tw::AlgebraElement random_symmetric_element(const tw::ClassIndex& idx, std::mt19937& rng) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    tw::AlgebraElement x(idx);
    for (const auto& c : idx.classes()) {
        const int o1 = idx.ordinal(c);
        const int o2 = idx.ordinal(tw::TripleClass{c.j, c.i, c.t, c.p});
        if (o2 < o1) continue;
        const double v = unif(rng);
        x.coeff[o1] = v;
        x.coeff[o2] = v;
    }
    return x;
}

double min_eig(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()),
                                                      Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

// Entrywise comparison of U*MU against the predicted layout with the
// binomial^{-1/2} prefactors reinstated.
void check_block_layout(int q, int n, int reps) {
    tw::DenseOracle oracle(q, n);
    const tw::ClassIndex& idx = oracle.index();
    REQUIRE(oracle.unitarity_error() < 1e-10);
    std::mt19937 rng(1234 + q * 100 + n);
    for (int rep = 0; rep < reps; ++rep) {
        tw::AlgebraElement x = random_symmetric_element(idx, rng);
        Eigen::MatrixXcd W = oracle.conjugated(x);
        const auto form = (q == 2) ? tw::binary_block_image(x) : tw::block_image(x);
        // map (a,k) -> block index
        auto block_of = [&](int a, int k) {
            for (size_t s = 0; s < form.specs.size(); ++s)
                if (form.specs[s].a == a && form.specs[s].k == k) return static_cast<int>(s);
            REQUIRE(false);
            return -1;
        };
        const auto& cols = oracle.columns();
        const int N = oracle.space();
        for (int r = 0; r < N; ++r)
            for (int c = 0; c < N; ++c) {
                const auto& cr = cols[r];
                const auto& cc = cols[c];
                std::complex<double> expect = 0.0;
                if (cr.a == cc.a && cr.k == cc.k && cr.a_word == cc.a_word &&
                    cr.b_index == cc.b_index) {
                    const int b = block_of(cr.a, cr.k);
                    const double entry = form.blocks[b](cr.i - cr.k, cc.i - cc.k);
                    const double pref =
                        1.0 / std::sqrt(codesdp::Int(binomial(n + cr.a - 2 * cr.k, cr.i - cr.k) *
                                                     binomial(n + cc.a - 2 * cc.k, cc.i - cc.k))
                                            .get_d());
                    expect = entry * pref;
                }
                CAPTURE(r);
                CAPTURE(c);
                CHECK(std::abs(W(r, c) - expect) < 1e-9);
            }
    }
}

}  // namespace

TEST_CASE("oracle column counts match block multiplicities") {
    for (auto [q, n] : {std::pair{2, 2}, {3, 2}, {4, 2}, {2, 4}, {3, 3}}) {
        tw::DenseOracle oracle(q, n);
        std::map<std::pair<int, int>, long> count;
        for (const auto& col : oracle.columns()) ++count[{col.a, col.k}];
        for (const auto& spec : tw::block_specs(q, n)) {
            const long expect = codesdp::Int(spec.multiplicity * spec.size).get_si();
            CHECK(count[{spec.a, spec.k}] == expect);
        }
        CHECK(oracle.unitarity_error() < 1e-10);
    }
}

TEST_CASE("prefactored block image matches U*MU entrywise") {
    check_block_layout(2, 3, 5);
    check_block_layout(3, 2, 5);
    check_block_layout(4, 2, 5);
}

TEST_CASE("identity maps to identity blocks") {
    for (auto [q, n] : {std::pair{3, 3}, {2, 4}}) {
        tw::ClassIndex idx(q, n);
        tw::AlgebraElement x(idx);
        for (int i = 0; i <= n; ++i) x[tw::TripleClass{i, i, i, i}] = 1.0;
        const auto form = (q == 2) ? tw::binary_block_image(x) : tw::block_image(x);
        for (size_t b = 0; b < form.blocks.size(); ++b) {
            const auto& B = form.blocks[b];
            CHECK((B - Eigen::MatrixXd::Identity(B.rows(), B.cols())).cwiseAbs().maxCoeff() <
                  1e-9);
        }
    }
}

TEST_CASE("all-one element concentrates in the (0,0) block") {
    for (auto [q, n] : {std::pair{3, 2}, {3, 3}}) {
        tw::ClassIndex idx(q, n);
        tw::AlgebraElement x(idx);
        for (auto& v : x.coeff) v = 1.0;
        const auto form = tw::block_image(x);
        for (size_t b = 0; b < form.blocks.size(); ++b) {
            if (form.specs[b].a == 0 && form.specs[b].k == 0) continue;
            CHECK(form.blocks[b].cwiseAbs().maxCoeff() < 1e-9);
        }
        // J is psd with the single nonzero eigenvalue q^n
        tw::DenseOracle oracle(q, n);
        Eigen::MatrixXd J = oracle.dense_matrix(x);
        CHECK((J - Eigen::MatrixXd::Ones(J.rows(), J.cols())).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("psd equivalence with the dense matrix") {
    for (auto [q, n] : {std::pair{2, 3}, {2, 4}, {3, 2}, {3, 3}, {4, 2}}) {
        tw::DenseOracle oracle(q, n);
        std::mt19937 rng(99 + q + n);
        for (int rep = 0; rep < 10; ++rep) {
            tw::AlgebraElement x = random_symmetric_element(oracle.index(), rng);
            const double dense = min_eig(oracle.dense_matrix(x));
            const auto form = (q == 2) ? tw::binary_block_image(x) : tw::block_image(x);
            const double blocks = form.min_eigenvalue();
            const double tol = 1e-8 * std::max(1.0, std::fabs(dense));
            CHECK((dense >= -tol) == (blocks >= -tol));
        }
    }
}

TEST_CASE("bordered equivalence with dense R(M)") {
    for (auto [q, n] : {std::pair{3, 2}, {3, 3}, {2, 4}}) {
        tw::DenseOracle oracle(q, n);
        std::mt19937 rng(7 + q + 10 * n);
        for (int rep = 0; rep < 10; ++rep) {
            tw::AlgebraElement x = random_symmetric_element(oracle.index(), rng);
            const double dense = min_eig(oracle.dense_bordered(x, 1.0));
            const auto form = (q == 2) ? tw::binary_bordered_block_image(x, 1.0)
                                       : tw::bordered_block_image(x, 1.0);
            const double blocks = form.min_eigenvalue();
            const double tol = 1e-8 * std::max(1.0, std::fabs(dense));
            CHECK((dense >= -tol) == (blocks >= -tol));
        }
    }
}

TEST_CASE("bordered trivial cases") {
    tw::ClassIndex idx(3, 3);
    tw::AlgebraElement zero(idx);
    auto form = tw::bordered_block_image(zero, 1.0);
    REQUIRE(form.bordered);
    for (size_t b = 0; b < form.blocks.size(); ++b) {
        const auto& spec = form.specs[b];
        if (spec.a == 0 && spec.k == 0) {
            Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(spec.size + 1, spec.size + 1);
            expect(0, 0) = 1.0;
            CHECK((form.blocks[b] - expect).cwiseAbs().maxCoeff() == 0.0);
        } else {
            CHECK(form.blocks[b].cwiseAbs().maxCoeff() == 0.0);
        }
    }
}

TEST_CASE("rank-one q^{-n} J is psd under the border") {
    // R(q^{-n} J) is psd with one zero eigenvalue in the bordered block
    const int q = 3, n = 2;
    tw::ClassIndex idx(q, n);
    tw::AlgebraElement x(idx);
    const double qn = ipow(q, n).get_d();
    for (auto& v : x.coeff) v = 1.0 / qn;
    auto form = tw::bordered_block_image(x, 1.0);
    CHECK(form.min_eigenvalue() > -1e-9);
    tw::DenseOracle oracle(q, n);
    CHECK(min_eig(oracle.dense_bordered(x, 1.0)) > -1e-9);
}

TEST_CASE("johnson block image against the dense johnson oracle") {
    const int n = 4, w = 2;
    tw::JohnsonDenseOracle oracle(n, w);
    REQUIRE(oracle.space() == 6);
    const auto classes = tw::enumerate_johnson_classes(n, w);

    // identity coefficients give identity blocks
    std::vector<std::pair<tw::JohnsonClass, double>> ident;
    for (int i = 0; i <= w; ++i)
        if (i >= 2 * w - (n - w)) ident.push_back({tw::JohnsonClass{i, i, i, w - i}, 1.0});
    auto idform = tw::johnson_block_image(n, w, ident);
    for (const auto& B : idform.blocks)
        CHECK((B - Eigen::MatrixXd::Identity(B.rows(), B.cols())).cwiseAbs().maxCoeff() < 1e-9);

    // row label sets: V_k cap shifted V'_k
    for (const auto& spec : idform.specs) {
        for (int i : spec.row_labels) {
            CHECK(i >= spec.k);
            CHECK(i <= w - spec.k);
            CHECK(w - i >= spec.kp);
            CHECK(w - i <= n - w - spec.kp);
        }
    }
    // dimension identity: sum of size^2 = dim of the algebra
    long sq = 0;
    for (const auto& spec : idform.specs) sq += static_cast<long>(spec.row_labels.size()) *
                                                static_cast<long>(spec.row_labels.size());
    CHECK(sq == static_cast<long>(classes.size()));

    // eigenvalue multisets match on random symmetric elements
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<std::pair<tw::JohnsonClass, double>> coeffs;
        for (const auto& c : classes) {
            tw::JohnsonClass ct{c.j, c.i, c.s, c.t};
            if (std::tie(ct.i, ct.j, ct.s, ct.t) < std::tie(c.i, c.j, c.s, c.t)) continue;
            const double v = unif(rng);
            coeffs.push_back({c, v});
            if (ct != c) coeffs.push_back({ct, v});
        }
        Eigen::MatrixXd dense = oracle.dense_matrix(coeffs);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (dense + dense.transpose()),
                                                          Eigen::EigenvaluesOnly);
        std::vector<double> dense_eigs(es.eigenvalues().data(),
                                       es.eigenvalues().data() + dense.rows());
        auto form = tw::johnson_block_image(n, w, coeffs);
        std::vector<double> block_eigs;
        for (size_t b = 0; b < form.blocks.size(); ++b) {
            const auto& spec = form.specs[b];
            const int sz = static_cast<int>(spec.row_labels.size());
            // reinstate the prefactors for true eigenvalues
            Eigen::MatrixXd scaled = form.blocks[b];
            for (int r = 0; r < sz; ++r)
                for (int c2 = 0; c2 < sz; ++c2) {
                    const int i = spec.row_labels[r], j = spec.row_labels[c2];
                    const double pref = std::sqrt(
                        codesdp::Int(binomial(w - 2 * spec.k, i - spec.k) *
                                     binomial(w - 2 * spec.k, j - spec.k) *
                                     binomial(n - w - 2 * spec.kp, (w - i) - spec.kp) *
                                     binomial(n - w - 2 * spec.kp, (w - j) - spec.kp))
                            .get_d());
                    scaled(r, c2) /= pref;
                }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> bes(
                0.5 * (scaled + scaled.transpose()), Eigen::EigenvaluesOnly);
            const long mult = codesdp::Int(spec.multiplicity).get_si();
            for (long m = 0; m < mult; ++m)
                for (int e = 0; e < sz; ++e) block_eigs.push_back(bes.eigenvalues()(e));
        }
        std::sort(dense_eigs.begin(), dense_eigs.end());
        std::sort(block_eigs.begin(), block_eigs.end());
        REQUIRE(dense_eigs.size() == block_eigs.size());
        for (size_t e = 0; e < dense_eigs.size(); ++e)
            CHECK(std::fabs(dense_eigs[e] - block_eigs[e]) < 1e-9);
    }
}
