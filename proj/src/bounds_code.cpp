#include "codesdp/bounds_code.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "class_program.hpp"
#include "codesdp/certify.hpp"

namespace codesdp::codes {

namespace tw = terwilliger;
using detail::BlockBorder;
using detail::LinExpr;
using detail::ProgramBuilder;

Method method_from_string(const std::string& s) {
    if (s == "delsarte") return Method::delsarte;
    if (s == "sdp" || s == "sdp_basic") return Method::sdp_basic;
    if (s == "sdp+" || s == "sdp_laurent") return Method::sdp_laurent;
    if (s == "nplus") return Method::matrixcut_nplus;
    if (s == "ntilde") return Method::matrixcut_ntilde;
    throw std::invalid_argument("unknown code-bound method '" + s + "'");
}

std::string to_string(Method m) {
    switch (m) {
        case Method::delsarte: return "delsarte";
        case Method::sdp_basic: return "sdp";
        case Method::sdp_laurent: return "sdp+";
        case Method::matrixcut_nplus: return "nplus";
        case Method::matrixcut_ntilde: return "ntilde";
    }
    return "?";
}

namespace {

struct BuiltProgram {
    sdp::SdpProblem prob;
    double obj_constant = 0.0;
    bool maximize = true;
};

void check_spec(int q, int n, int d) {
    if (q < 2 || n < 1 || d < 1 || d > n)
        throw std::invalid_argument("code bound: require q >= 2, 1 <= d <= n");
}

bool distance_forbidden(int d, int value) { return value >= 1 && value <= d - 1; }

// true if the class (or any member of its orbit) is killed by the minimum
// distance: one of the three pairwise distances falls in 1..d-1.
bool zeroed_by_distance(const tw::TripleClass& c, int d) {
    return distance_forbidden(d, c.i) || distance_forbidden(d, c.j) ||
           distance_forbidden(d, c.dist());
}

using detail::ClassVars;
using detail::diag_border;
using detail::mpp_coefficients;
using detail::weight_count;
using detail::X00Mode;

BuiltProgram build_delsarte_internal(int q, int n, int d, bool trace_form) {
    check_spec(q, n, d);
    ProgramBuilder pb;
    BuiltProgram out;
    std::vector<LinExpr> shell(n + 1);
    if (trace_form) {
        // maximize q^n x_0, x >= 0, R(sum x_i A_i) >= 0
        for (int i = 0; i <= n; ++i)
            shell[i] = distance_forbidden(d, i) ? LinExpr() : LinExpr::variable(pb.new_variable());
        for (int i = 0; i <= n; ++i) pb.inequality(shell[i]);
        detail::emit_bose_mesner_R(pb, q, n, shell);
        LinExpr obj;
        obj.add(shell[0], comb::ipow(q, n).get_d());
        pb.set_objective(obj, true);
    } else {
        // classical LP over the distance distribution, a_0 = 1 eliminated
        shell[0] = LinExpr::value(1.0);
        for (int i = 1; i <= n; ++i)
            shell[i] = distance_forbidden(d, i) ? LinExpr() : LinExpr::variable(pb.new_variable());
        for (int i = 1; i <= n; ++i) pb.inequality(shell[i]);
        for (int j = 0; j <= n; ++j) {
            LinExpr row;
            for (int i = 0; i <= n; ++i)
                row.add(shell[i], comb::krawtchouk(q, n, j, i).get_d());
            pb.inequality(row);
        }
        LinExpr obj;
        for (int i = 0; i <= n; ++i) obj.add(shell[i], 1.0);
        pb.set_objective(obj, true);
    }
    out.prob = pb.finish();
    out.obj_constant = pb.objective_constant();
    out.prob.variable_box.assign(out.prob.m, {0.0, 1.0});
    out.maximize = true;
    return out;
}

BuiltProgram build_schrijver_internal(int q, int n, int d, Strength strength) {
    check_spec(q, n, d);
    tw::ClassIndex idx(q, n);
    ProgramBuilder pb;
    X00Mode mode = X00Mode::variable;
    if (strength == Strength::basic) mode = X00Mode::fixed_one;
    if (strength == Strength::variation2) mode = X00Mode::deferred;
    ClassVars vars(pb, idx, [d](const tw::TripleClass& c) { return zeroed_by_distance(c, d); },
                   mode);
    if (strength == Strength::variation2) {
        // substitute x00 = 1 - sum_{i>=1} C(n,i)(q-1)^i x_{i,i}^{i,i}
        // so that tr M = 1 holds identically (keeps a strict interior)
        LinExpr subst = LinExpr::value(1.0);
        for (int i = 1; i <= n; ++i)
            subst.add(vars.at(tw::TripleClass{i, i, i, i}), -weight_count(q, n, i));
        vars.expr[idx.ordinal(tw::TripleClass{0, 0, 0, 0})] = subst;
    }

    // 0 <= x_c <= x_{i,0}^{0,0}
    std::vector<LinExpr> caps(idx.size());
    for (int o = 0; o < idx.size(); ++o) caps[o] = vars.shell(idx.at(o).i);
    detail::emit_class_box(pb, vars.expr, caps);

    detail::emit_terwilliger_blocks(pb, idx, vars.expr, std::nullopt);
    const std::vector<LinExpr> mpp = mpp_coefficients(vars);
    if (strength == Strength::laurent) {
        LinExpr corner = LinExpr::value(1.0);
        corner.add(vars.x00(), -1.0);
        detail::emit_terwilliger_blocks(pb, idx, mpp, diag_border(vars, corner, true));
    } else {
        detail::emit_terwilliger_blocks(pb, idx, mpp, std::nullopt);
    }

    LinExpr obj;
    switch (strength) {
        case Strength::basic:
            for (int i = 0; i <= n; ++i) obj.add(vars.shell(i), weight_count(q, n, i));
            break;
        case Strength::laurent:
            obj.add(vars.x00(), comb::ipow(q, n).get_d());
            break;
        case Strength::variation1: {
            // maximize x00 with the extra block [[1, x00],[x00, tr M]]
            obj = vars.x00();
            const int blk = pb.add_dense_block(2);
            pb.entry(blk, 0, 0, LinExpr::value(1.0));
            pb.entry(blk, 0, 1, vars.x00());
            LinExpr tr;
            for (int i = 0; i <= n; ++i)
                tr.add(vars.at(tw::TripleClass{i, i, i, i}), weight_count(q, n, i));
            pb.entry(blk, 1, 1, tr);
            break;
        }
        case Strength::variation2: {
            // maximize 1^T M 1 subject to tr M = 1. The trace equality is
            // eliminated before this switch (x00 substituted), so here the
            // objective is just the gamma-weighted coefficient sum.
            for (int o = 0; o < idx.size(); ++o)
                obj.add(vars.expr[o], tw::gamma(q, n, idx.at(o)).get_d());
            break;
        }
    }
    pb.set_objective(obj, true);

    BuiltProgram out;
    out.prob = pb.finish();
    out.obj_constant = pb.objective_constant();
    out.prob.variable_box.assign(out.prob.m, {0.0, 1.0});
    out.maximize = true;
    return out;
}

// The matrix-cut programs carry their diagonal borders in the prefactored
// normalization sqrt(C(n,i)(q-1)^i); this is the convention the published
// matrix-cut tables follow (the symmetrized strengthening instead uses the
// plain-block border C(n,i)sqrt(q-1)^i, see class_program.hpp).
double mc_border_weight(int q, int n, int i) {
    return std::sqrt(detail::weight_count(q, n, i));
}

BuiltProgram build_matrix_cut_internal(int q, int n, int d, CutVariant variant) {
    check_spec(q, n, d);
    if (q < 3) throw std::invalid_argument("matrix-cut builders require q >= 3");
    tw::ClassIndex idx(q, n);
    ProgramBuilder pb;
    const int m = idx.size();

    // Only the transpose pairing is identified; the triple symmetry (the
    // point of comparison with the main SDP) is deliberately not applied.
    auto transpose_rep = [&](int o) {
        const tw::TripleClass& c = idx.at(o);
        const int ot = idx.ordinal(tw::TripleClass{c.j, c.i, c.t, c.p});
        return std::min(o, ot);
    };
    auto make_vars = [&](auto&& disposition) {
        std::vector<LinExpr> e(m);
        std::vector<int> var(m, -2);
        for (int o = 0; o < m; ++o) {
            const int r = transpose_rep(o);
            if (var[r] == -2) var[r] = disposition(r) ? pb.new_variable() : -1;
            e[o] = (var[r] >= 0) ? LinExpr::variable(var[r]) : LinExpr();
        }
        return e;
    };

    auto is_diag = [&](const tw::TripleClass& c) {
        return c.i == c.j && c.t == c.i && c.p == c.i;
    };
    auto is_shell = [&](const tw::TripleClass& c) {
        return (c.j == 0 && c.t == 0 && c.p == 0 && c.i > 0) ||
               (c.i == 0 && c.t == 0 && c.p == 0 && c.j > 0);
    };
    auto alive = [&](int o) {
        const tw::TripleClass& c = idx.at(o);
        if (distance_forbidden(d, c.dist())) return false;
        if (variant == CutVariant::ntilde) {
            // with the tilde identification y_{i,0} = y_{i,i}, a zeroed
            // shell kills its diagonal, and the shells themselves are
            // rewritten onto the diagonal variables below
            if (is_diag(c) && distance_forbidden(d, c.i)) return false;
            if (is_shell(c)) return false;
        }
        return true;
    };
    std::vector<LinExpr> y = make_vars(alive);
    const LinExpr y00 = y[idx.ordinal(tw::TripleClass{0, 0, 0, 0})];

    auto ydiag = [&](int i) { return y[idx.ordinal(tw::TripleClass{i, i, i, i})]; };
    auto zdiag = [&](int i) {
        LinExpr e = y00;
        e.add(ydiag(i), -1.0);
        return e;
    };

    std::vector<LinExpr> z(m);
    if (variant == CutVariant::nplus) {
        // independent z with the diagonal coupled to y00 - y_{i,i}^{i,i}
        auto zalive = [&](int o) {
            const tw::TripleClass& c = idx.at(o);
            return alive(o) && !(c.i == c.j && c.t == c.i && c.p == c.i);
        };
        z = make_vars(zalive);
        for (int o = 0; o < m; ++o) {
            const tw::TripleClass& c = idx.at(o);
            if (c.i == c.j && c.t == c.i && c.p == c.i) z[o] = alive(o) ? zdiag(c.i) : LinExpr();
        }
    } else {
        // tilde variant: the shells are tied to the diagonal via
        // y_{i,0}^{0,0} = y_{i,i}^{i,i}, and z is eliminated through
        // z_c = y_{dist,0}^{0,0} - y_c.
        for (int i = 1; i <= n; ++i) {
            const int o1 = idx.ordinal(tw::TripleClass{i, 0, 0, 0});
            const int o2 = idx.ordinal(tw::TripleClass{0, i, 0, 0});
            y[o1] = ydiag(i);
            y[o2] = ydiag(i);
        }
        for (int o = 0; o < m; ++o) {
            LinExpr e = ydiag(idx.at(o).dist());
            e.add(y[o], -1.0);
            z[o] = e;
        }
    }

    // nonnegativity of both coefficient families
    for (int o = 0; o < m; ++o) {
        if (variant == CutVariant::nplus) pb.inequality(y[o]);
        pb.inequality(z[o]);
    }

    if (variant == CutVariant::nplus) {
        // R over the Bose-Mesner algebra with shells y_{i,i}^{i,i}
        std::vector<LinExpr> shell(n + 1);
        for (int i = 0; i <= n; ++i) shell[i] = ydiag(i);
        detail::emit_bose_mesner_R(pb, q, n, shell);
        // bordered y blocks with corner y00
        BlockBorder by;
        by.corner = y00;
        by.entries.resize(n + 1);
        for (int i = 0; i <= n; ++i) {
            LinExpr s;
            s.add(ydiag(i), mc_border_weight(q, n, i));
            by.entries[i] = s;
        }
        std::vector<LinExpr> ycoef(y);
        detail::emit_terwilliger_blocks(pb, idx, ycoef, by);
    } else {
        detail::emit_terwilliger_blocks(pb, idx, y, std::nullopt);
    }
    {
        LinExpr corner = LinExpr::value(1.0);
        corner.add(y00, -1.0);
        BlockBorder bz;
        bz.corner = corner;
        bz.entries.resize(n + 1);
        for (int i = 0; i <= n; ++i) {
            LinExpr s;
            s.add(zdiag(i), variant == CutVariant::ntilde ? detail::border_weight(q, n, i)
                                                          : mc_border_weight(q, n, i));
            bz.entries[i] = s;
        }
        detail::emit_terwilliger_blocks(pb, idx, z, bz);
    }

    LinExpr obj;
    obj.add(y00, comb::ipow(q, n).get_d());
    pb.set_objective(obj, true);

    BuiltProgram out;
    out.prob = pb.finish();
    out.prob.variable_box.assign(out.prob.m, {0.0, 1.0});
    out.maximize = true;
    return out;
}

BuiltProgram build_affine_cap_internal(int n) {
    if (n < 1) throw std::invalid_argument("affine cap: require n >= 1");
    const int q = 3;
    tw::ClassIndex idx(q, n);
    ProgramBuilder pb;
    auto zero = [](const tw::TripleClass& c) {
        return c.i >= 1 && c.i == c.j && c.t == c.i && c.p == 0;
    };
    ClassVars vars(pb, idx, zero, X00Mode::fixed_one);
    std::vector<LinExpr> caps(idx.size());
    for (int o = 0; o < idx.size(); ++o) caps[o] = vars.shell(idx.at(o).i);
    detail::emit_class_box(pb, vars.expr, caps);
    detail::emit_terwilliger_blocks(pb, idx, vars.expr, std::nullopt);
    detail::emit_terwilliger_blocks(pb, idx, mpp_coefficients(vars), std::nullopt);
    LinExpr obj;
    for (int i = 0; i <= n; ++i) obj.add(vars.shell(i), weight_count(q, n, i));
    pb.set_objective(obj, true);
    BuiltProgram out;
    out.prob = pb.finish();
    out.obj_constant = pb.objective_constant();
    out.prob.variable_box.assign(out.prob.m, {0.0, 1.0});
    out.maximize = true;
    return out;
}

long long floor_guarded(double v) { return static_cast<long long>(std::floor(v + 1e-9)); }

BoundReport run_code_program(const BuiltProgram& bp, const RunOptions& opts) {
    BoundReport rep;
    rep.direction = "upper";
    const auto t0 = std::chrono::steady_clock::now();
    sdp::SdpSolution sol = sdp::solve(bp.prob, opts.solver);
    const double value_of = bp.maximize ? -1.0 : 1.0;
    rep.solver_objective = bp.obj_constant + value_of * sol.primal_obj;
    rep.gap = sol.gap;
    rep.status = sdp::to_string(sol.status);
    if (sol.status == sdp::SolveStatus::optimal || sol.status == sdp::SolveStatus::near_optimal) {
        sdp::SdpSolution clamped = certify::clamp_dual(sol);
        auto vr = certify::verify_certificate(bp.prob, clamped, bp.prob.variable_box);
        if (vr.ok) {
            rep.certified_value = bp.obj_constant + value_of * vr.certified;
            rep.integer_bound = floor_guarded(rep.certified_value);
            rep.raw_integer_bound = floor_guarded(rep.solver_objective);
            double rmax = 0.0;
            for (double e : vr.cert.epsilons) rmax = std::max(rmax, std::fabs(e));
            rep.residual_max = rmax;
            rep.status = "certified";
        } else {
            rep.certified_value = rep.solver_objective;
            rep.integer_bound = floor_guarded(rep.solver_objective);
            rep.raw_integer_bound = rep.integer_bound;
            rep.status = "uncertified:" + vr.message;
        }
    }
    rep.wall_time_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
    return rep;
}

}  // namespace

sdp::SdpProblem build_delsarte(int q, int n, int d, bool trace_form) {
    return build_delsarte_internal(q, n, d, trace_form).prob;
}

sdp::SdpProblem build_schrijver_sdp(int q, int n, int d, Strength strength) {
    return build_schrijver_internal(q, n, d, strength).prob;
}

sdp::SdpProblem build_matrix_cut_sdp(int q, int n, int d, CutVariant variant) {
    return build_matrix_cut_internal(q, n, d, variant).prob;
}

sdp::SdpProblem build_affine_cap_sdp(int n) { return build_affine_cap_internal(n).prob; }

BoundReport code_bound(const CodeBoundSpec& spec, const RunOptions& opts) {
    BoundReport rep;
    rep.kind = "code";
    rep.q = spec.q;
    rep.n = spec.n;
    rep.d = spec.d;
    rep.method = to_string(spec.method);
    if (spec.d > spec.n) {
        // two distinct words differ in at most n positions
        rep.solver_objective = rep.certified_value = 1.0;
        rep.integer_bound = rep.raw_integer_bound = 1;
        rep.status = "trivial";
        return rep;
    }
    BuiltProgram bp;
    switch (spec.method) {
        case Method::delsarte: bp = build_delsarte_internal(spec.q, spec.n, spec.d, true); break;
        case Method::sdp_basic:
            bp = build_schrijver_internal(spec.q, spec.n, spec.d, Strength::basic);
            break;
        case Method::sdp_laurent:
            bp = build_schrijver_internal(spec.q, spec.n, spec.d, Strength::laurent);
            break;
        case Method::matrixcut_nplus:
            bp = build_matrix_cut_internal(spec.q, spec.n, spec.d, CutVariant::nplus);
            break;
        case Method::matrixcut_ntilde:
            bp = build_matrix_cut_internal(spec.q, spec.n, spec.d, CutVariant::ntilde);
            break;
    }
    BoundReport run = run_code_program(bp, opts);
    run.kind = rep.kind;
    run.q = rep.q;
    run.n = rep.n;
    run.d = rep.d;
    run.method = rep.method;
    return run;
}

BoundReport code_bound_variation(int q, int n, int d, int which, const RunOptions& opts) {
    BuiltProgram bp = build_schrijver_internal(
        q, n, d, which == 1 ? Strength::variation1 : Strength::variation2);
    BoundReport rep = run_code_program(bp, opts);
    rep.kind = "code";
    rep.q = q;
    rep.n = n;
    rep.d = d;
    rep.method = which == 1 ? "variation1" : "variation2";
    return rep;
}

BoundReport affine_cap_bound(int n, const RunOptions& opts) {
    BuiltProgram bp = build_affine_cap_internal(n);
    BoundReport rep = run_code_program(bp, opts);
    rep.kind = "code";
    rep.q = 3;
    rep.n = n;
    rep.d = 0;
    rep.method = "affinecap";
    return rep;
}

}  // namespace codesdp::codes
