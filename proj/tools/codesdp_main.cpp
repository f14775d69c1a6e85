#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "codesdp/bounds_code.hpp"
#include "codesdp/bounds_covering.hpp"
#include "codesdp/certify.hpp"
#include "codesdp/combinatorics.hpp"
#include "codesdp/terwilliger.hpp"

namespace sdp = codesdp::sdp;
namespace codes = codesdp::codes;
namespace covering = codesdp::covering;
namespace tw = codesdp::terwilliger;
using codesdp::BoundReport;
using codesdp::RunOptions;
using nlohmann::json;

namespace {

struct CommonFlags {
    std::string backend = "builtin";
    std::string solver_cmd;
    std::string format = "text";
    double tol_gap = 1e-7;
    double tol_feas = 1e-8;
    int max_iter = 200;
    bool verbose = false;

    void attach(CLI::App* app) {
        app->add_option("--backend", backend, "SDP backend")
            ->check(CLI::IsMember({"builtin", "external"}));
        app->add_option("--solver-cmd", solver_cmd,
                        "external solver command with {in} and {out} placeholders "
                        "(or env CODESDP_SOLVER_CMD)");
        app->add_option("--format", format, "output format")->check(CLI::IsMember({"json", "text"}));
        app->add_option("--tol-gap", tol_gap, "relative duality gap tolerance");
        app->add_option("--tol-feas", tol_feas, "feasibility tolerance");
        app->add_option("--max-iter", max_iter, "iteration limit");
        app->add_flag("--verbose", verbose, "print solver iterations");
    }

    RunOptions run_options() const {
        RunOptions o;
        o.solver.tol_gap = tol_gap;
        o.solver.tol_feas = tol_feas;
        o.solver.max_iterations = max_iter;
        o.solver.verbose = verbose;
        std::string cmd = solver_cmd;
        if (cmd.empty())
            if (const char* env = std::getenv("CODESDP_SOLVER_CMD")) cmd = env;
        if (backend == "external") {
            if (cmd.empty())
                throw CLI::ValidationError("--backend external requires --solver-cmd");
            o.solver.backend = sdp::SolveOptions::Backend::external;
            o.solver.command_template = cmd;
        }
        return o;
    }
};

int emit_report(const BoundReport& rep, const std::string& format) {
    if (format == "json")
        std::cout << rep.to_json() << "\n";
    else
        std::cout << rep.to_text() << "\n";
    return rep.status == "certified" || rep.status == "exact" || rep.status == "trivial" ? 0 : 2;
}

std::vector<covering::LinearInequalitySet> load_ineqs(const std::vector<std::string>& specs, int q,
                                                      int n, int r, const std::string& ftable_path) {
    std::vector<covering::LinearInequalitySet> out;
    for (const auto& s : specs) {
        if (s == "sphere") {
            out.push_back(covering::sphere_covering_ineq(q, n, r));
        } else if (s == "vanwee") {
            if (q != 2)
                throw CLI::ValidationError(
                    "--ineq vanwee: the van Wee inequalities are established for q = 2 only");
            out.push_back(covering::van_wee_ineq(n, r));
        } else if (s == "paircover") {
            if (q != 2)
                throw CLI::ValidationError(
                    "--ineq paircover: the pair covering inequalities are established for q = 2 "
                    "only");
            if (ftable_path.empty())
                throw CLI::ValidationError("--ineq paircover requires --ftable");
            std::ifstream fs(ftable_path);
            if (!fs) throw CLI::ValidationError("cannot open covering table " + ftable_path);
            out.push_back(covering::pair_covering_ineq(q, n, r, covering::read_ftable(fs)));
        } else if (s.rfind("file:", 0) == 0) {
            const std::string path = s.substr(5);
            std::ifstream fs(path);
            if (!fs) throw CLI::ValidationError("cannot open inequality file " + path);
            auto ineq = covering::read_inequality_file(fs);
            if (ineq.q != q || ineq.n != n)
                throw CLI::ValidationError("inequality file " + path + " is for different (q,n)");
            out.push_back(std::move(ineq));
        } else {
            throw CLI::ValidationError("unknown inequality set '" + s + "'");
        }
    }
    return out;
}

// ---- table runner ---------------------------------------------------------

struct SuiteRow {
    json input;
    BoundReport report;
    bool failed = false;
    std::string error;
};

int run_table(const std::string& path, int parallel, const CommonFlags& flags) {
    std::ifstream is(path);
    if (!is) {
        std::cerr << "cannot open suite file " << path << "\n";
        return 1;
    }
    std::vector<SuiteRow> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        SuiteRow row;
        try {
            row.input = json::parse(line);
        } catch (const std::exception& ex) {
            std::cerr << path << ":" << lineno << ": " << ex.what() << "\n";
            return 1;
        }
        rows.push_back(std::move(row));
    }
    const RunOptions opts = flags.run_options();
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const size_t at = next.fetch_add(1);
            if (at >= rows.size()) return;
            SuiteRow& row = rows[at];
            try {
                const json& in = row.input;
                const std::string kind = in.value("kind", "code");
                if (kind == "code") {
                    codes::CodeBoundSpec spec;
                    spec.q = in.at("q");
                    spec.n = in.at("n");
                    spec.d = in.at("d");
                    spec.method = codes::method_from_string(in.value("method", "sdp+"));
                    row.report = codes::code_bound(spec, opts);
                } else if (kind == "cover") {
                    covering::CoverBoundSpec spec;
                    spec.q = in.at("q");
                    spec.n = in.at("n");
                    spec.r = in.at("r");
                    spec.method = covering::method_from_string(in.value("method", "sdp2"));
                    std::vector<std::string> ineqs;
                    if (in.contains("ineq"))
                        ineqs.push_back(in["ineq"]);
                    else
                        ineqs.push_back("sphere");
                    spec.inequalities =
                        load_ineqs(ineqs, spec.q, spec.n, spec.r, in.value("ftable", ""));
                    row.report = covering::covering_bound(spec, opts);
                } else {
                    throw std::runtime_error("unknown kind '" + kind + "'");
                }
            } catch (const std::exception& ex) {
                row.failed = true;
                row.error = ex.what();
            }
        }
    };
    std::vector<std::thread> pool;
    const int workers = std::max(1, parallel);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    int rc = 0;
    if (flags.format == "json") {
        for (const auto& row : rows) {
            if (row.failed) {
                json err{{"error", row.error}, {"input", row.input}};
                std::cout << err.dump() << "\n";
                rc = 2;
            } else {
                std::cout << row.report.to_json() << "\n";
            }
        }
        return rc;
    }
    std::printf("%3s %3s %3s %-9s %10s %10s %10s %10s  %-10s %10s\n", "q", "n", "d/r", "method",
                "lower", "bound", "previous", "delsarte", "status", "ms");
    for (const auto& row : rows) {
        if (row.failed) {
            std::printf("  error: %s\n", row.error.c_str());
            rc = 2;
            continue;
        }
        const BoundReport& r = row.report;
        auto ref = [&](const char* key) {
            return row.input.contains(key) ? std::to_string((long long)row.input[key]) : std::string("-");
        };
        std::printf("%3d %3d %3d %-9s %10s %10lld %10s %10s  %-10s %10.0f\n", r.q, r.n, r.d,
                    r.method.c_str(), ref("lower").c_str(), r.integer_bound,
                    ref("previous").c_str(), ref("delsarte").c_str(), r.status.c_str(),
                    r.wall_time_ms);
        if (r.status != "certified" && r.status != "exact" && r.status != "trivial") rc = 2;
    }
    return rc;
}

// ---- selftest ---------------------------------------------------------------

int run_selftest() {
    int failures = 0;
    auto check = [&](bool ok, const std::string& what) {
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << what << "\n";
        if (!ok) ++failures;
    };
    using codesdp::Int;
    namespace comb = codesdp::comb;

    // class counts and block identities
    bool counts_ok = true, blocks_ok = true, gamma_ok = true, beta_ok = true;
    for (int q : {2, 3, 4, 5}) {
        for (int n = 1; n <= 10; ++n) {
            tw::ClassIndex idx(q, n);
            const Int expect =
                q == 2 ? comb::binomial(n + 3, 3) : comb::binomial(n + 4, 4);
            counts_ok = counts_ok && Int(idx.size()) == expect;
            Int sq = 0, tr = 0;
            for (const auto& s : tw::block_specs(q, n)) {
                sq += Int(s.size) * s.size;
                tr += s.multiplicity * s.size;
            }
            blocks_ok = blocks_ok && sq == Int(idx.size()) && tr == comb::ipow(q, n);
            Int gsum = 0;
            for (const auto& c : idx.classes()) gsum += tw::gamma(q, n, c);
            gamma_ok = gamma_ok && gsum == comb::ipow(q, 2 * static_cast<unsigned long>(n));
        }
    }
    check(counts_ok, "|I(q,n)| matches the closed form");
    check(blocks_ok, "block size/multiplicity identities");
    check(gamma_ok, "sum of gamma over classes equals q^(2n)");
    for (int n = 1; n <= 12 && beta_ok; ++n)
        for (int i = 0; i <= n && beta_ok; ++i)
            for (int j = 0; j <= n && beta_ok; ++j)
                for (int k = 0; k <= std::min(i, j) && beta_ok; ++k)
                    for (int t = 0; t <= std::min(i, j) && beta_ok; ++t)
                        beta_ok = tw::beta(n, i, j, k, t) == tw::beta_symmetric(n, i, j, k, t);
    check(beta_ok, "beta two-formula agreement (n <= 12)");

    // tiny dense oracles
    for (auto [q, n] : {std::pair{2, 3}, {3, 2}, {4, 2}}) {
        tw::DenseOracle oracle(q, n);
        check(oracle.unitarity_error() < 1e-10,
              "dense oracle unitary, q=" + std::to_string(q) + " n=" + std::to_string(n));
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        bool psd_ok = true;
        for (int rep = 0; rep < 5; ++rep) {
            tw::AlgebraElement x(oracle.index());
            for (const auto& c : oracle.index().classes()) {
                const int o1 = oracle.index().ordinal(c);
                const int o2 = oracle.index().ordinal(tw::TripleClass{c.j, c.i, c.t, c.p});
                if (o2 < o1) continue;
                x.coeff[o1] = x.coeff[o2] = unif(rng);
            }
            Eigen::MatrixXd M = oracle.dense_matrix(x);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
            const double dense_min = es.eigenvalues().minCoeff();
            const auto form = q == 2 ? tw::binary_block_image(x) : tw::block_image(x);
            const double block_min = form.min_eigenvalue();
            psd_ok = psd_ok && ((dense_min >= -1e-8) == (block_min >= -1e-8));
        }
        check(psd_ok, "block psd equivalence, q=" + std::to_string(q) + " n=" + std::to_string(n));
    }
    std::cout << (failures ? "selftest: FAILED\n" : "selftest: ok\n");
    return failures ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"semidefinite programming bounds for error-correcting and covering codes"};
    app.require_subcommand(1);

    CommonFlags flags;

    // codebound
    auto* cb = app.add_subcommand("codebound", "upper bound on A_q(n,d)");
    int cb_q = 3, cb_n = 6, cb_d = 3, cb_variation = 0;
    std::string cb_method = "sdp+";
    cb->add_option("--q", cb_q, "alphabet size")->required();
    cb->add_option("--n", cb_n, "word length")->required();
    cb->add_option("--d", cb_d, "minimum distance")->required();
    cb->add_option("--method", cb_method, "delsarte|sdp|sdp+|nplus|ntilde");
    cb->add_option("--debug-variation", cb_variation,
                   "solve objective variation 1 or 2 of the basic SDP instead")
        ->check(CLI::IsMember({1, 2}));
    flags.attach(cb);

    // coverbound
    auto* cv = app.add_subcommand("coverbound", "lower bound on K_q(n,r)");
    int cv_q = 3, cv_n = 5, cv_r = 1;
    std::string cv_method = "sdp2", cv_ftable;
    std::vector<std::string> cv_ineq;
    cv->add_option("--q", cv_q, "alphabet size")->required();
    cv->add_option("--n", cv_n, "word length")->required();
    cv->add_option("--r", cv_r, "covering radius")->required();
    cv->add_option("--method", cv_method, "lin|sdp1|sdp2");
    cv->add_option("--ineq", cv_ineq, "sphere|vanwee|paircover|file:PATH (repeatable)");
    cv->add_option("--ftable", cv_ftable, "covering-design table F(m,k), lines 'm k F'");
    flags.attach(cv);

    // affinecap
    auto* ac = app.add_subcommand("affinecap", "ternary affine-cap SDP bound");
    int ac_n = 3;
    ac->add_option("--n", ac_n, "dimension")->required();
    flags.attach(ac);

    // emit-sdpa
    auto* em = app.add_subcommand("emit-sdpa", "write a bound program in sparse SDPA format");
    std::string em_kind = "code", em_out, em_method = "sdp+";
    int em_q = 3, em_n = 6, em_dr = 3;
    std::vector<std::string> em_ineq{"sphere"};
    em->add_option("--kind", em_kind)->check(CLI::IsMember({"code", "cover", "affinecap"}));
    em->add_option("--q", em_q);
    em->add_option("--n", em_n)->required();
    em->add_option("--d", em_dr, "minimum distance (code) or radius (cover)");
    em->add_option("--r", em_dr, "alias of --d for covering programs");
    em->add_option("--method", em_method);
    em->add_option("--ineq", em_ineq);
    em->add_option("--out", em_out, "output path (default stdout)");

    // certify
    auto* ce = app.add_subcommand("certify", "audit a dual solution against a problem file");
    std::string ce_problem, ce_dual, ce_out;
    double ce_lo = 0.0, ce_hi = 1.0;
    ce->add_option("--problem", ce_problem)->required();
    ce->add_option("--dual", ce_dual, "solution file (primal vector + matrices)")->required();
    ce->add_option("--box-lo", ce_lo, "variable box lower bound");
    ce->add_option("--box-hi", ce_hi, "variable box upper bound");
    ce->add_option("--out", ce_out, "write the certificate JSON here");

    // table
    auto* tb = app.add_subcommand("table", "run a JSON-lines suite of bound specs");
    std::string tb_suite;
    int tb_parallel = 1;
    tb->add_option("--suite", tb_suite)->required();
    tb->add_option("--parallel", tb_parallel, "worker threads")->check(CLI::PositiveNumber);
    flags.attach(tb);

    // selftest
    app.add_subcommand("selftest", "exact identities and tiny dense-oracle checks");

    // solve-sdpa
    auto* sv = app.add_subcommand("solve-sdpa", "solve a sparse SDPA file with the builtin solver");
    std::string sv_in, sv_out;
    sv->add_option("--in", sv_in)->required();
    sv->add_option("--out", sv_out, "solution output path (default stdout)");
    flags.attach(sv);

    // blockimage
    auto* bi = app.add_subcommand("blockimage", "block-diagonalize a serialized algebra element");
    std::string bi_in;
    double bi_corner = 1.0;
    bool bi_bordered = false;
    bi->add_option("--in", bi_in, "element file (header 'q n', lines 'i j t p coeff')")->required();
    bi->add_flag("--bordered", bi_bordered, "use the bordered (R(M)-style) form");
    bi->add_option("--corner", bi_corner, "corner value for the bordered form");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cb->parsed()) {
            BoundReport rep;
            if (cb_variation != 0) {
                rep = codes::code_bound_variation(cb_q, cb_n, cb_d, cb_variation,
                                                  flags.run_options());
            } else {
                codes::CodeBoundSpec spec{cb_q, cb_n, cb_d, codes::method_from_string(cb_method)};
                rep = codes::code_bound(spec, flags.run_options());
            }
            return emit_report(rep, flags.format);
        }
        if (cv->parsed()) {
            if (cv_ineq.empty()) cv_ineq.push_back("sphere");
            covering::CoverBoundSpec spec;
            spec.q = cv_q;
            spec.n = cv_n;
            spec.r = cv_r;
            spec.method = covering::method_from_string(cv_method);
            spec.inequalities = load_ineqs(cv_ineq, cv_q, cv_n, cv_r, cv_ftable);
            if (spec.method == covering::Method::lin)
                for (const auto& iq : spec.inequalities)
                    if (iq.name != "sphere")
                        std::cerr << "note: there may be solutions that do not have covering "
                                     "radius <= r; the value is a bound on the relaxation and a "
                                     "valid lower bound on K only when the inequality set holds "
                                     "for all (n,K,q)r codes\n";
            return emit_report(covering::covering_bound(spec, flags.run_options()), flags.format);
        }
        if (ac->parsed()) return emit_report(codes::affine_cap_bound(ac_n, flags.run_options()),
                                             flags.format);
        if (em->parsed()) {
            sdp::SdpProblem p;
            if (em_kind == "code") {
                const auto m = codes::method_from_string(em_method);
                switch (m) {
                    case codes::Method::delsarte: p = codes::build_delsarte(em_q, em_n, em_dr); break;
                    case codes::Method::sdp_basic:
                        p = codes::build_schrijver_sdp(em_q, em_n, em_dr, codes::Strength::basic);
                        break;
                    case codes::Method::sdp_laurent:
                        p = codes::build_schrijver_sdp(em_q, em_n, em_dr, codes::Strength::laurent);
                        break;
                    case codes::Method::matrixcut_nplus:
                        p = codes::build_matrix_cut_sdp(em_q, em_n, em_dr, codes::CutVariant::nplus);
                        break;
                    case codes::Method::matrixcut_ntilde:
                        p = codes::build_matrix_cut_sdp(em_q, em_n, em_dr,
                                                        codes::CutVariant::ntilde);
                        break;
                }
            } else if (em_kind == "affinecap") {
                p = codes::build_affine_cap_sdp(em_n);
            } else {
                auto ineqs = load_ineqs(em_ineq, em_q, em_n, em_dr, "");
                p = (covering::method_from_string(em_method) == covering::Method::sdp1)
                        ? covering::build_first_sdp(em_q, em_n, em_dr, ineqs)
                        : covering::build_second_sdp(em_q, em_n, em_dr, ineqs);
            }
            if (em_out.empty()) {
                sdp::write_sdpa(p, std::cout);
            } else {
                std::ofstream os(em_out);
                sdp::write_sdpa(p, os);
                if (!os) throw std::runtime_error("cannot write " + em_out);
            }
            return 0;
        }
        if (ce->parsed()) {
            std::ifstream ps(ce_problem);
            if (!ps) throw std::runtime_error("cannot open " + ce_problem);
            sdp::SdpProblem p = sdp::read_sdpa(ps);
            std::ifstream ds(ce_dual);
            if (!ds) throw std::runtime_error("cannot open " + ce_dual);
            sdp::SdpSolution sol = sdp::read_sdpa_solution(ds, p);
            std::vector<std::pair<double, double>> box(p.m, {ce_lo, ce_hi});
            auto vr = codesdp::certify::verify_certificate(p, codesdp::certify::clamp_dual(sol), box);
            json j{{"ok", vr.ok},
                   {"certified", vr.certified},
                   {"dual_obj", vr.cert.dual_obj},
                   {"min_eig", vr.cert.min_eig},
                   {"message", vr.message}};
            std::cout << j.dump() << "\n";
            if (!ce_out.empty()) {
                std::ofstream os(ce_out);
                os << codesdp::certify::certificate_json(vr.cert) << "\n";
            }
            return vr.ok ? 0 : 2;
        }
        if (tb->parsed()) return run_table(tb_suite, tb_parallel, flags);
        if (app.get_subcommand("selftest")->parsed()) return run_selftest();
        if (sv->parsed()) {
            std::ifstream is(sv_in);
            if (!is) throw std::runtime_error("cannot open " + sv_in);
            sdp::SdpProblem p = sdp::read_sdpa(is);
            sdp::SdpSolution sol = sdp::solve(p, flags.run_options().solver);
            if (sol.status != sdp::SolveStatus::optimal &&
                sol.status != sdp::SolveStatus::near_optimal) {
                std::cerr << "solve failed: " << sdp::to_string(sol.status) << " " << sol.message
                          << "\n";
                return 2;
            }
            if (sv_out.empty()) {
                sdp::write_sdpa_solution(sol, p, std::cout);
            } else {
                std::ofstream os(sv_out);
                sdp::write_sdpa_solution(sol, p, os);
                if (!os) throw std::runtime_error("cannot write " + sv_out);
            }
            return 0;
        }
        if (bi->parsed()) {
            std::ifstream is(bi_in);
            if (!is) throw std::runtime_error("cannot open " + bi_in);
            std::string header;
            std::getline(is, header);
            std::istringstream hs(header);
            int q = 0, n = 0;
            if (!(hs >> q >> n)) throw std::runtime_error("bad element header");
            is.seekg(0);
            tw::ClassIndex idx(q, n);
            tw::AlgebraElement x = tw::read_element(is, idx);
            tw::BlockDiagonalForm form;
            if (q == 2)
                form = bi_bordered ? tw::binary_bordered_block_image(x, bi_corner)
                                   : tw::binary_block_image(x);
            else
                form = bi_bordered ? tw::bordered_block_image(x, bi_corner) : tw::block_image(x);
            for (size_t b = 0; b < form.blocks.size(); ++b) {
                Eigen::MatrixXd s = 0.5 * (form.blocks[b] + form.blocks[b].transpose());
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
                std::printf("block a=%d k=%d  size %ld  multiplicity %s  min_eig % .12e\n",
                            form.specs[b].a, form.specs[b].k, (long)form.blocks[b].rows(),
                            form.specs[b].multiplicity.get_str().c_str(),
                            form.blocks[b].rows() ? es.eigenvalues().minCoeff() : 0.0);
            }
            std::printf("min eigenvalue over all blocks: % .12e\n", form.min_eigenvalue());
            return 0;
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
    return 1;
}
