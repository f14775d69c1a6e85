#pragma once

// Assembly of Terwilliger-block and Bose-Mesner constraints from affine
// expressions over the triple classes. Shared by the code and covering
// builders.

#include <optional>

#include "builder_util.hpp"
#include "codesdp/combinatorics.hpp"
#include "codesdp/terwilliger.hpp"

namespace codesdp::detail {

struct BlockBorder {
    LinExpr corner;
    std::vector<LinExpr> entries;  // indexed by weight 0..n
};

// Emits one psd block per admissible (a,k) for the algebra element whose
// class-c coefficient is coeff[c]. When a border is given, the (0,0) block
// becomes [[corner, b^T],[b, L]].
inline void emit_terwilliger_blocks(ProgramBuilder& pb, const terwilliger::ClassIndex& idx,
                                    const std::vector<LinExpr>& coeff,
                                    const std::optional<BlockBorder>& border) {
    const int q = idx.q(), n = idx.n();
    for (const auto& spec : terwilliger::block_specs(q, n)) {
        const int a = spec.a, k = spec.k;
        const bool with_border = border.has_value() && a == 0 && k == 0;
        const int off = with_border ? 1 : 0;
        const int blk = pb.add_dense_block(spec.size + off);
        if (with_border) {
            pb.entry(blk, 0, 0, border->corner);
            for (int i = 0; i <= n; ++i) pb.entry(blk, 0, 1 + i, border->entries[i]);
        }
        for (int i = k; i <= n + a - k; ++i)
            for (int j = i; j <= n + a - k; ++j) {
                LinExpr e;
                for (int t = 0; t <= std::min(i, j); ++t)
                    for (int p = idx.binary() ? t : 0; p <= t; ++p) {
                        const int o = idx.ordinal(terwilliger::TripleClass{i, j, t, p});
                        if (o < 0) continue;
                        const double w = idx.binary()
                                             ? terwilliger::beta(n, i, j, k, t).get_d()
                                             : terwilliger::alpha(q, n, i, j, t, p, a, k);
                        if (w != 0.0) e.add(coeff[o], w);
                    }
                pb.entry(blk, off + i - k, off + j - k, e);
            }
    }
}

// R(sum_i shell_i A_i) >= 0 over the Bose-Mesner algebra: the Krawtchouk
// eigenvalue rows sum_i shell_i K_i(j) >= 0, plus the 2x2 block
// [[1, shell_0],[shell_0, q^{-n} sum_i C(n,i)(q-1)^i shell_i]] (the paper's
// q^n-scaled border divided through by q^n).
inline void emit_bose_mesner_R(ProgramBuilder& pb, int q, int n,
                               const std::vector<LinExpr>& shell) {
    for (int j = 0; j <= n; ++j) {
        LinExpr row;
        for (int i = 0; i <= n; ++i)
            row.add(shell[i], comb::krawtchouk(q, n, i, j).get_d());
        pb.inequality(row);
    }
    const int blk = pb.add_dense_block(2);
    pb.entry(blk, 0, 0, LinExpr::value(1.0));
    pb.entry(blk, 0, 1, shell[0]);
    LinExpr avg;
    const double qn = comb::ipow(q, n).get_d();
    for (int i = 0; i <= n; ++i)
        avg.add(shell[i], Int(comb::binomial(n, i) * comb::ipow(q - 1, i)).get_d() / qn);
    pb.entry(blk, 1, 1, avg);
}

// 0 <= x_c and x_c <= cap_c rows for every class, routed through the
// compressed expressions (duplicates vanish in the builder).
inline void emit_class_box(ProgramBuilder& pb, const std::vector<LinExpr>& coeff,
                           const std::vector<LinExpr>& caps) {
    for (size_t o = 0; o < coeff.size(); ++o) {
        pb.inequality(coeff[o]);
        LinExpr ub = caps[o];
        ub.add(coeff[o], -1.0);
        pb.inequality(ub);
    }
}

// Compressed variables over I(q,n) with the full symmetry identification:
// classes with equal t-p and permuted distance triples share one variable.
// zero(c) marks classes fixed to 0.
enum class X00Mode { variable, fixed_one, deferred };

struct ClassVars {
    const terwilliger::ClassIndex* idx;
    std::vector<LinExpr> expr;  // per ordinal
    int var00 = -1;             // variable id of x_{0,0}^{0,0}, -1 when not a variable

    template <typename ZeroPred>
    ClassVars(ProgramBuilder& pb, const terwilliger::ClassIndex& index, ZeroPred zero, X00Mode mode)
        : idx(&index) {
        const int m = index.size();
        std::vector<int> canon(m);
        for (int o = 0; o < m; ++o) canon[o] = index.canonical(index.at(o));
        std::vector<int> var(m, -2);
        expr.resize(m);
        for (int o = 0; o < m; ++o) {
            const int r = canon[o];
            if (var[r] == -2) {
                const terwilliger::TripleClass& rc = index.at(r);
                if (zero(rc)) {
                    var[r] = -1;
                } else if (rc == terwilliger::TripleClass{0, 0, 0, 0} && mode != X00Mode::variable) {
                    var[r] = -3;
                } else {
                    var[r] = pb.new_variable();
                    if (rc == terwilliger::TripleClass{0, 0, 0, 0}) var00 = var[r];
                }
            }
            if (var[r] == -1)
                expr[o] = LinExpr();
            else if (var[r] == -3)
                expr[o] = (mode == X00Mode::fixed_one) ? LinExpr::value(1.0) : LinExpr();
            else
                expr[o] = LinExpr::variable(var[r]);
        }
    }

    const LinExpr& at(const terwilliger::TripleClass& c) const { return expr[idx->ordinal(c)]; }
    LinExpr x00() const { return at(terwilliger::TripleClass{0, 0, 0, 0}); }
    // x_{w,0}^{0,0}
    const LinExpr& shell(int w) const { return at(terwilliger::TripleClass{w, 0, 0, 0}); }
    // M'' coefficient of class c: x_{dist,0}^{0,0} - x_c
    LinExpr mpp(int ordinal) const {
        const terwilliger::TripleClass& c = idx->at(ordinal);
        LinExpr e = shell(c.dist());
        e.add(expr[ordinal], -1.0);
        return e;
    }
};

inline std::vector<LinExpr> mpp_coefficients(const ClassVars& v) {
    std::vector<LinExpr> out(v.idx->size());
    for (int o = 0; o < v.idx->size(); ++o) out[o] = v.mpp(o);
    return out;
}

inline double weight_count(int q, int n, int i) {
    return Int(comb::binomial(n, i) * comb::ipow(q - 1, i)).get_d();
}

// Border coefficient C(n,i) sqrt(q-1)^i: the weight count adjusted for the
// omitted binomial^{-1/2} prefactors of the blocks it borders.
inline double border_weight(int q, int n, int i) {
    return comb::binomial(n, i).get_d() * std::pow(std::sqrt(static_cast<double>(q - 1)), i);
}

// Border [[corner, b^T],[b, .]] with b_i = C(n,i)(q-1)^i x_{i,i}^{i,i}
// (complement: C(n,i)(q-1)^i (x00 - x_{i,i}^{i,i})).
inline BlockBorder diag_border(const ClassVars& v, const LinExpr& corner, bool complement) {
    const int n = v.idx->n();
    BlockBorder b;
    b.corner = corner;
    b.entries.resize(n + 1);
    for (int i = 0; i <= n; ++i) {
        LinExpr e;
        if (complement) {
            e = v.x00();
            e.add(v.at(terwilliger::TripleClass{i, i, i, i}), -1.0);
        } else {
            e = v.at(terwilliger::TripleClass{i, i, i, i});
        }
        LinExpr scaled;
        scaled.add(e, border_weight(v.idx->q(), n, i));
        b.entries[i] = scaled;
    }
    return b;
}

}  // namespace codesdp::detail
