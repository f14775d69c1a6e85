#include "codesdp/bounds_covering.hpp"

#include <chrono>
#include <cmath>
#include <istream>
#include <sstream>
#include <stdexcept>

#include "class_program.hpp"
#include "codesdp/certify.hpp"

namespace codesdp::covering {

namespace tw = terwilliger;
using comb::binomial;
using comb::ipow;
using detail::LinExpr;
using detail::ProgramBuilder;

void LinearInequalitySet::validate() const {
    if (static_cast<int>(lambda.size()) != n + 1)
        throw std::invalid_argument("inequality set: lambda must have length n+1");
    for (const Rat& l : lambda)
        if (l < 0) throw std::invalid_argument("inequality set: lambda_i must be nonnegative");
    if (beta <= 0) throw std::invalid_argument("inequality set: beta must be positive");
}

const Int& CoveringNumberTable::at(int m, int k) const {
    auto it = entries.find({m, k});
    if (it == entries.end())
        throw std::runtime_error("covering table: missing entry F(" + std::to_string(m) + "," +
                                 std::to_string(k) + ")");
    return it->second;
}

Method method_from_string(const std::string& s) {
    if (s == "lin") return Method::lin;
    if (s == "sdp1") return Method::sdp1;
    if (s == "sdp2") return Method::sdp2;
    throw std::invalid_argument("unknown covering method '" + s + "'");
}

std::string to_string(Method m) {
    switch (m) {
        case Method::lin: return "lin";
        case Method::sdp1: return "sdp1";
        case Method::sdp2: return "sdp2";
    }
    return "?";
}

LinearInequalitySet sphere_covering_ineq(int q, int n, int r) {
    if (r < 0 || r > n) throw std::invalid_argument("sphere_covering_ineq: require 0 <= r <= n");
    LinearInequalitySet s;
    s.q = q;
    s.n = n;
    s.lambda.assign(n + 1, 0);
    for (int i = 0; i <= r; ++i) s.lambda[i] = 1;
    s.beta = 1;
    s.name = "sphere";
    return s;
}

LinearInequalitySet van_wee_ineq(int n, int r) {
    if (r < 0 || r >= n) throw std::invalid_argument("van_wee_ineq: require 0 <= r < n");
    LinearInequalitySet s;
    s.q = 2;
    s.n = n;
    s.lambda.assign(n + 1, 0);
    const long c = (n + 1 + r) / (r + 1);  // ceil((n+1)/(r+1))
    for (int i = 0; i <= r - 1; ++i) s.lambda[i] = c;
    s.lambda[r] = 1;
    if (r + 1 <= n) s.lambda[r + 1] = 1;
    s.beta = c;
    s.name = "vanwee";
    return s;
}

LinearInequalitySet pair_covering_ineq(int q, int n, int r, const CoveringNumberTable& table) {
    if (q != 2) throw std::invalid_argument("pair_covering_ineq: established for q = 2 only");
    if (r < 2 || r + 2 > n)
        throw std::invalid_argument("pair_covering_ineq: require 2 <= r <= n-2");
    const Int& f_base = table.at(n - r + 1, r + 2);
    Rat m1;
    bool first = true;
    for (int i = 2; n - i * r + 1 >= 1; ++i) {
        Rat cand(f_base - table.at(n - i * r + 1, r + 2), i - 1);
        cand.canonicalize();
        if (first || cand > m1) m1 = cand;
        first = false;
    }
    if (first) throw std::invalid_argument("pair_covering_ineq: empty maximization range");
    const Rat m0 = m1 + f_base;
    LinearInequalitySet s;
    s.q = 2;
    s.n = n;
    s.lambda.assign(n + 1, 0);
    for (int i = 0; i <= r - 2; ++i) s.lambda[i] = m0;
    s.lambda[r - 1] = m1;
    s.lambda[r] = m1;
    s.lambda[r + 1] = 1;
    s.lambda[r + 2] = 1;
    s.beta = m0;
    s.name = "paircover";
    s.validate();
    return s;
}

Int pair_intersection(int q, int n, int i, int j, int k) {
    if (i < 0 || j < 0 || k < 0 || i > n || j > n || k > n) return 0;
    Int total = 0;
    if (q == 2) {
        // 2t = k + i - j
        if ((k + i - j) % 2 == 0) {
            const int t = (k + i - j) / 2;
            total = binomial(k, t) * binomial(n - k, i - t);
        }
        return total;
    }
    for (int t = 0; t <= std::min(i, k); ++t) {
        const int p = k + i - j - t;
        if (p < 0 || p > t) continue;
        total += comb::multinomial(k, {t - p, p}) * binomial(n - k, i - t) *
                 ipow(q - 1, static_cast<unsigned long>(i - t)) *
                 ipow(q - 2, static_cast<unsigned long>(t - p));
    }
    return total;
}

LinearInequalitySet induce_inequality(int q, int n, const LinearInequalitySet& ineq, int i) {
    ineq.validate();
    if (i < 0 || i > n) throw std::invalid_argument("induce_inequality: require 0 <= i <= n");
    LinearInequalitySet out;
    out.q = q;
    out.n = n;
    out.lambda.assign(n + 1, 0);
    for (int k = 0; k <= n; ++k) {
        Rat acc = 0;
        for (int j = 0; j <= n; ++j) {
            if (ineq.lambda[j] == 0) continue;
            acc += ineq.lambda[j] * Rat(pair_intersection(q, n, i, j, k));
        }
        acc.canonicalize();
        out.lambda[k] = acc;
    }
    out.beta = ineq.beta * Rat(binomial(n, i) * ipow(q - 1, static_cast<unsigned long>(i)));
    out.beta.canonicalize();
    out.name = ineq.name + "-induced";
    return out;
}

namespace {

Rat rat_ceil(const Rat& r) {
    Int q;
    mpz_cdiv_q(q.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
    return Rat(q);
}

Int rat_ceil_int(const Rat& r) {
    Int q;
    mpz_cdiv_q(q.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
    return q;
}

}  // namespace

LinearInequalitySet scale_round(const LinearInequalitySet& ineq, const Rat& divisor) {
    if (divisor <= 0) throw std::invalid_argument("scale_round: divisor must be positive");
    LinearInequalitySet out = ineq;
    for (Rat& l : out.lambda) l = rat_ceil(l / divisor);
    out.beta = rat_ceil(ineq.beta / divisor);
    out.name = ineq.name + "-rounded";
    return out;
}

LinearInequalitySet add(const LinearInequalitySet& a, const LinearInequalitySet& b) {
    if (a.n != b.n || a.q != b.q) throw std::invalid_argument("add: mismatched inequality sets");
    LinearInequalitySet out = a;
    for (int i = 0; i <= a.n; ++i) out.lambda[i] += b.lambda[i];
    out.beta += b.beta;
    out.name = a.name + "+" + b.name;
    return out;
}

Rat lin_ineq_bound(int q, int n, const LinearInequalitySet& ineq) {
    ineq.validate();
    Rat denom = 0;
    for (int i = 0; i <= n; ++i)
        denom += ineq.lambda[i] * Rat(binomial(n, i) * ipow(q - 1, static_cast<unsigned long>(i)));
    if (denom == 0) throw std::invalid_argument("lin_ineq_bound: all lambda_i are zero");
    Rat b = ineq.beta * Rat(ipow(q, static_cast<unsigned long>(n))) / denom;
    b.canonicalize();
    return b;
}

// ---- triple intersection numbers ----------------------------------------------

namespace {

// Enumerates, for the base class (i,j,t,p), all words w grouped by the class
// (i,j',t',p') of (u,w) and the distance d = d(v,w); calls
// sink(j',t',p',d,count) once per group.
template <typename Sink>
void triple_table(int q, int n, const tw::TripleClass& base, Sink&& sink) {
    const int i = base.i, j = base.j, t = base.t, p = base.p;
    const int it = i - t, jt = j - t, tp = t - p, emax = n + t - i - j;
    if (q == 2) {
        // support split of w into the four regions of (S(u), S(v))
        for (int a10 = 0; a10 <= it; ++a10) {
            const Int f1 = binomial(it, a10);
            for (int a11 = 0; a11 <= t; ++a11) {
                const Int f2 = f1 * binomial(t, a11);
                for (int a01 = 0; a01 <= jt; ++a01) {
                    const Int f3 = f2 * binomial(jt, a01);
                    for (int a00 = 0; a00 <= emax; ++a00) {
                        const Int count = f3 * binomial(emax, a00);
                        const int jp = a00 + a01 + a10 + a11;
                        const int tpp = a10 + a11;
                        const int d = j + a00 + a10 - a01 - a11;
                        sink(jp, tpp, tpp, d, count);
                    }
                }
            }
        }
        return;
    }
    for (int a1 = 0; a1 <= it; ++a1)
        for (int a2 = 0; a2 + a1 <= it; ++a2) {
            const Int f1 = comb::multinomial(it, {a1, a2}) * ipow(q - 2, a2);
            for (int b1 = 0; b1 <= jt; ++b1)
                for (int b2 = 0; b2 + b1 <= jt; ++b2) {
                    const Int f2 = f1 * comb::multinomial(jt, {b1, b2}) * ipow(q - 2, b2);
                    for (int c1 = 0; c1 <= p; ++c1)
                        for (int c2 = 0; c2 + c1 <= p; ++c2) {
                            const Int f3 =
                                f2 * comb::multinomial(p, {c1, c2}) * ipow(q - 2, c2);
                            for (int d1 = 0; d1 <= tp; ++d1)
                                for (int d2 = 0; d2 + d1 <= tp; ++d2)
                                    for (int d3 = 0; d3 + d2 + d1 <= tp; ++d3) {
                                        const Int f4 = f3 *
                                                       comb::multinomial(tp, {d1, d2, d3}) *
                                                       ipow(q - 3, d3);
                                        if (f4 == 0) continue;
                                        for (int e = 0; e <= emax; ++e) {
                                            const Int count =
                                                f4 * binomial(emax, e) * ipow(q - 1, e);
                                            const int jp = a1 + a2 + b1 + b2 + c1 + c2 + d1 +
                                                           d2 + d3 + e;
                                            const int tpp =
                                                a1 + a2 + c1 + c2 + d1 + d2 + d3;
                                            const int pw = a1 + c1 + d1;
                                            const int d = a1 + a2 + e + j - b1 - c1 - d2;
                                            sink(jp, tpp, pw, d, count);
                                        }
                                    }
                        }
                }
        }
}

}  // namespace

Int triple_intersection(int q, int n, const tw::TripleClass& base, int jp, int tp, int pp, int d) {
    if (!tw::class_valid(q, n, base))
        throw std::invalid_argument("triple_intersection: base class not in I(q,n)");
    if (d < 0 || d > n) throw std::invalid_argument("triple_intersection: require 0 <= d <= n");
    Int total = 0;
    triple_table(q, n, base, [&](int jp2, int tp2, int pp2, int d2, const Int& count) {
        if (jp2 == jp && tp2 == tp && pp2 == pp && d2 == d) total += count;
    });
    return total;
}

// ---- SDP builders --------------------------------------------------------------

sdp::SdpProblem build_first_sdp(int q, int n, int r, const std::vector<LinearInequalitySet>& ineqs) {
    if (q < 2 || n < 1 || r < 0 || r > n)
        throw std::invalid_argument("first SDP: require q >= 2, 0 <= r <= n");
    if (ineqs.empty()) throw std::invalid_argument("first SDP: need at least one inequality set");
    ProgramBuilder pb;
    std::vector<LinExpr> x(n + 1);
    for (int i = 0; i <= n; ++i) x[i] = LinExpr::variable(pb.new_variable());
    for (int i = 0; i <= n; ++i) pb.inequality(x[i]);
    detail::emit_bose_mesner_R(pb, q, n, x);
    for (const auto& ineq : ineqs) {
        ineq.validate();
        const double beta = ineq.beta.get_d();
        for (int k = 0; k <= n; ++k) {
            std::vector<double> w(n + 1, 0.0);
            for (int i = 0; i <= n; ++i) {
                Rat acc = 0;
                for (int jj = 0; jj <= n; ++jj) {
                    if (ineq.lambda[jj] == 0) continue;
                    acc += ineq.lambda[jj] * Rat(pair_intersection(q, n, i, jj, k));
                }
                w[i] = acc.get_d();
            }
            LinExpr row1;  // sum_i w_i x_i >= beta x_0
            for (int i = 0; i <= n; ++i) row1.add(x[i], w[i]);
            row1.add(x[0], -beta);
            pb.inequality(row1);
            LinExpr row2;  // sum_i (x_0 - x_i) w_i >= beta (1 - x_0)
            double wsum = 0.0;
            for (int i = 0; i <= n; ++i) wsum += w[i];
            row2.add(x[0], wsum + beta);
            for (int i = 0; i <= n; ++i) row2.add(x[i], -w[i]);
            row2.constant -= beta;
            pb.inequality(row2);
        }
    }
    LinExpr obj;
    obj.add(x[0], ipow(q, n).get_d());
    pb.set_objective(obj, false);
    sdp::SdpProblem p = pb.finish();
    p.variable_box.assign(p.m, {0.0, 1.0});
    return p;
}

sdp::SdpProblem build_second_sdp(int q, int n, int r,
                                 const std::vector<LinearInequalitySet>& ineqs) {
    if (q < 2 || n < 1 || r < 0 || r > n)
        throw std::invalid_argument("second SDP: require q >= 2, 0 <= r <= n");
    if (ineqs.empty()) throw std::invalid_argument("second SDP: need at least one inequality set");
    tw::ClassIndex idx(q, n);
    ProgramBuilder pb;
    detail::ClassVars vars(pb, idx, [](const tw::TripleClass&) { return false; },
                           detail::X00Mode::variable);

    // (i) 0 <= x_c <= x_{i,i}^{i,i}
    std::vector<LinExpr> caps(idx.size());
    for (int o = 0; o < idx.size(); ++o)
        caps[o] = vars.at(tw::TripleClass{idx.at(o).i, idx.at(o).i, idx.at(o).i, idx.at(o).i});
    detail::emit_class_box(pb, vars.expr, caps);
    // (ii) x_{i,0} + x_{dist,0} - x00 <= x_c <= x_{dist,0}
    for (int o = 0; o < idx.size(); ++o) {
        const tw::TripleClass& c = idx.at(o);
        LinExpr ub = vars.shell(c.dist());
        ub.add(vars.expr[o], -1.0);
        pb.inequality(ub);
        LinExpr lb = vars.expr[o];
        lb.add(vars.shell(c.i), -1.0);
        lb.add(vars.shell(c.dist()), -1.0);
        lb.add(vars.x00(), 1.0);
        pb.inequality(lb);
    }

    // the four row-inequality families per base class and inequality set
    for (const auto& ineq : ineqs) {
        ineq.validate();
        const double beta = ineq.beta.get_d();
        for (int o = 0; o < idx.size(); ++o) {
            const tw::TripleClass& base = idx.at(o);
            // lambda-weighted triple intersection table over targets
            std::map<std::tuple<int, int, int>, Rat> table;
            triple_table(q, n, base, [&](int jp, int tp, int pp, int d, const Int& count) {
                if (d < 0 || d > n || ineq.lambda[d] == 0) return;
                table[{jp, tp, pp}] += ineq.lambda[d] * Rat(count);
            });
            LinExpr r1, r2, r3, r4;
            for (const auto& [key, lam] : table) {
                const auto [jp, tp, pp] = key;
                const int ot = idx.ordinal(tw::TripleClass{base.i, jp, tp, pp});
                if (ot < 0)
                    throw std::logic_error("second SDP: intersection target outside I(q,n)");
                const double l = lam.get_d();
                const int distp = base.i + jp - tp - pp;
                r1.add(vars.expr[ot], l);
                r2.add(vars.shell(jp), l);
                r2.add(vars.expr[ot], -l);
                r3.add(vars.shell(distp), l);
                r3.add(vars.expr[ot], -l);
                r4.add(vars.x00(), l);
                r4.add(vars.shell(jp), -l);
                r4.add(vars.shell(distp), -l);
                r4.add(vars.expr[ot], l);
            }
            // right-hand sides
            r1.add(vars.shell(base.i), -beta);
            r2.add(vars.x00(), -beta);
            r2.add(vars.shell(base.i), beta);
            r3.add(vars.x00(), -beta);
            r3.add(vars.shell(base.i), beta);
            r4.constant -= beta;
            r4.add(vars.x00(), 2.0 * beta);
            r4.add(vars.shell(base.i), -beta);
            pb.inequality(r1);
            pb.inequality(r2);
            pb.inequality(r3);
            pb.inequality(r4);
        }
    }

    // M' blocks psd everywhere; M'' blocks psd with the (0,0) block bordered
    detail::emit_terwilliger_blocks(pb, idx, vars.expr, std::nullopt);
    LinExpr corner = LinExpr::value(1.0);
    corner.add(vars.x00(), -1.0);
    detail::emit_terwilliger_blocks(pb, idx, detail::mpp_coefficients(vars),
                                    detail::diag_border(vars, corner, true));

    LinExpr obj;
    obj.add(vars.x00(), ipow(q, n).get_d());
    pb.set_objective(obj, false);
    sdp::SdpProblem p = pb.finish();
    p.variable_box.assign(p.m, {0.0, 1.0});
    return p;
}

// ---- driver --------------------------------------------------------------------

namespace {

long long ceil_guarded(double v) { return static_cast<long long>(std::ceil(v - 1e-9)); }

}  // namespace

BoundReport covering_bound(const CoverBoundSpec& spec, const RunOptions& opts) {
    BoundReport rep;
    rep.kind = "cover";
    rep.q = spec.q;
    rep.n = spec.n;
    rep.d = spec.r;
    rep.method = to_string(spec.method);
    rep.direction = "lower";
    for (size_t s = 0; s < spec.inequalities.size(); ++s)
        rep.ineq += (s ? "+" : "") + spec.inequalities[s].name;

    if (spec.r == 0) {
        // radius 0 forces the whole space
        const Int qn = ipow(spec.q, spec.n);
        rep.solver_objective = rep.certified_value = qn.get_d();
        rep.integer_bound = rep.raw_integer_bound = qn.get_si();
        rep.exact = qn.get_str();
        rep.status = "trivial";
        return rep;
    }

    const auto t0 = std::chrono::steady_clock::now();
    if (spec.method == Method::lin) {
        if (spec.inequalities.empty())
            throw std::invalid_argument("covering_bound: need an inequality set");
        Rat best;
        bool first = true;
        for (const auto& ineq : spec.inequalities) {
            Rat b = lin_ineq_bound(spec.q, spec.n, ineq);
            if (first || b > best) best = b;
            first = false;
        }
        rep.solver_objective = rep.certified_value = best.get_d();
        rep.integer_bound = rep.raw_integer_bound = rat_ceil_int(best).get_si();
        rep.exact = best.get_num().get_str() + (best.get_den() == 1 ? "" : "/" + best.get_den().get_str());
        rep.status = "exact";
        rep.wall_time_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        return rep;
    }

    sdp::SdpProblem p = (spec.method == Method::sdp1)
                            ? build_first_sdp(spec.q, spec.n, spec.r, spec.inequalities)
                            : build_second_sdp(spec.q, spec.n, spec.r, spec.inequalities);
    sdp::SdpSolution sol = sdp::solve(p, opts.solver);
    rep.solver_objective = sol.primal_obj;
    rep.gap = sol.gap;
    rep.status = sdp::to_string(sol.status);
    if (sol.status == sdp::SolveStatus::optimal || sol.status == sdp::SolveStatus::near_optimal) {
        sdp::SdpSolution clamped = certify::clamp_dual(sol);
        auto vr = certify::verify_certificate(p, clamped, p.variable_box);
        if (vr.ok) {
            rep.certified_value = vr.certified;
            rep.integer_bound = ceil_guarded(rep.certified_value);
            rep.raw_integer_bound = ceil_guarded(rep.solver_objective);
            double rmax = 0.0;
            for (double e : vr.cert.epsilons) rmax = std::max(rmax, std::fabs(e));
            rep.residual_max = rmax;
            rep.status = "certified";
        } else {
            rep.certified_value = rep.solver_objective;
            rep.integer_bound = rep.raw_integer_bound = ceil_guarded(rep.solver_objective);
            rep.status = "uncertified:" + vr.message;
        }
    }
    rep.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

// ---- file formats ---------------------------------------------------------------

namespace {

Rat parse_rat(const std::string& tok, int lineno) {
    try {
        if (tok.find('/') != std::string::npos) {
            Rat r(tok);
            r.canonicalize();
            return r;
        }
        const auto dot = tok.find('.');
        if (dot == std::string::npos) {
            return Rat(Int(tok));
        }
        // plain decimal: int part . frac part
        std::string digits = tok.substr(0, dot) + tok.substr(dot + 1);
        const size_t frac = tok.size() - dot - 1;
        bool neg = false;
        if (!digits.empty() && (digits[0] == '-' || digits[0] == '+')) {
            neg = digits[0] == '-';
            digits = digits.substr(1);
        }
        Rat r(Int(digits), ipow(10, frac));
        r.canonicalize();
        return neg ? Rat(-r) : r;
    } catch (const std::invalid_argument&) {
        throw std::runtime_error("bad rational '" + tok + "' at line " + std::to_string(lineno));
    }
}

}  // namespace

LinearInequalitySet read_inequality_file(std::istream& is) {
    LinearInequalitySet s;
    std::string line;
    int lineno = 0;
    if (!std::getline(is, line)) throw std::runtime_error("inequality file: empty input");
    ++lineno;
    {
        std::istringstream hs(line);
        std::string btok;
        if (!(hs >> s.q >> s.n >> btok))
            throw std::runtime_error("inequality file: bad header (want 'q n beta')");
        s.beta = parse_rat(btok, lineno);
    }
    s.lambda.assign(s.n + 1, 0);
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        int i;
        std::string tok;
        if (!(ls >> i >> tok))
            throw std::runtime_error("inequality file: parse error at line " + std::to_string(lineno));
        if (i < 0 || i > s.n)
            throw std::runtime_error("inequality file: index out of range at line " +
                                     std::to_string(lineno));
        s.lambda[i] = parse_rat(tok, lineno);
    }
    s.name = "file";
    s.validate();
    return s;
}

CoveringNumberTable read_ftable(std::istream& is) {
    CoveringNumberTable t;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        int m, k;
        std::string val;
        if (!(ls >> m >> k >> val))
            throw std::runtime_error("covering table: parse error at line " + std::to_string(lineno));
        Int f(val);
        if (f <= 0)
            throw std::runtime_error("covering table: F must be positive at line " +
                                     std::to_string(lineno));
        t.entries[{m, k}] = f;
    }
    return t;
}

}  // namespace codesdp::covering
