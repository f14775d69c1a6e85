#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "codesdp/sdp.hpp"

namespace codesdp::sdp {

// ---- BlockMatrix -------------------------------------------------------------

BlockMatrix::BlockMatrix(const SdpProblem& p) {
    for (int b = 0; b < p.num_blocks(); ++b) {
        diag_.push_back(p.block_diagonal(b));
        if (p.block_diagonal(b)) {
            dvecs_.emplace_back(Eigen::VectorXd::Zero(p.block_dim(b)));
            mats_.emplace_back();
        } else {
            dvecs_.emplace_back();
            mats_.emplace_back(Eigen::MatrixXd::Zero(p.block_dim(b), p.block_dim(b)));
        }
    }
}

int BlockMatrix::total_dim() const {
    int t = 0;
    for (int b = 0; b < num_blocks(); ++b) t += dim(b);
    return t;
}

void BlockMatrix::set_zero() {
    for (int b = 0; b < num_blocks(); ++b) {
        if (diag_[b])
            dvecs_[b].setZero();
        else
            mats_[b].setZero();
    }
}

void BlockMatrix::set_identity(double scale) {
    for (int b = 0; b < num_blocks(); ++b) {
        if (diag_[b])
            dvecs_[b].setConstant(scale);
        else
            mats_[b] = scale * Eigen::MatrixXd::Identity(mats_[b].rows(), mats_[b].cols());
    }
}

double BlockMatrix::inner(const BlockMatrix& other) const {
    double s = 0.0;
    for (int b = 0; b < num_blocks(); ++b) {
        if (diag_[b])
            s += dvecs_[b].dot(other.dvecs_[b]);
        else
            s += (mats_[b].array() * other.mats_[b].array()).sum();
    }
    return s;
}

double BlockMatrix::min_eigenvalue() const {
    double m = std::numeric_limits<double>::infinity();
    for (int b = 0; b < num_blocks(); ++b) {
        if (dim(b) == 0) continue;
        if (diag_[b]) {
            m = std::min(m, dvecs_[b].minCoeff());
        } else {
            Eigen::MatrixXd s = 0.5 * (mats_[b] + mats_[b].transpose());
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
            m = std::min(m, es.eigenvalues().minCoeff());
        }
    }
    return m;
}

double BlockMatrix::max_abs_eigenvalue() const {
    double m = 0.0;
    for (int b = 0; b < num_blocks(); ++b) {
        if (dim(b) == 0) continue;
        if (diag_[b]) {
            m = std::max(m, dvecs_[b].cwiseAbs().maxCoeff());
        } else {
            Eigen::MatrixXd s = 0.5 * (mats_[b] + mats_[b].transpose());
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
            m = std::max(m, es.eigenvalues().cwiseAbs().maxCoeff());
        }
    }
    return m;
}

void BlockMatrix::axpy(double s, const BlockMatrix& other) {
    for (int b = 0; b < num_blocks(); ++b) {
        if (diag_[b])
            dvecs_[b] += s * other.dvecs_[b];
        else
            mats_[b] += s * other.mats_[b];
    }
}

double sparse_inner(const std::vector<Entry>& f, const BlockMatrix& y) {
    double s = 0.0;
    for (const auto& e : f) {
        const double v = y.is_diag(e.block) ? (e.row == e.col ? y.dvec(e.block)(e.row) : 0.0)
                                            : y.mat(e.block)(e.row, e.col);
        s += (e.row == e.col) ? e.value * v : 2.0 * e.value * v;
    }
    return s;
}

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::near_optimal: return "near_optimal";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::unbounded: return "unbounded";
        case SolveStatus::failed: return "failed";
    }
    return "failed";
}

// ---- builtin primal-dual interior point solver --------------------------------

namespace {

struct BlockFactors {
    // Inverses of the dense blocks (diagonal blocks keep reciprocal vectors).
    std::vector<Eigen::MatrixXd> inv;
    std::vector<Eigen::VectorXd> dinv;
};

bool factorize(const BlockMatrix& M, BlockFactors& f) {
    f.inv.assign(M.num_blocks(), {});
    f.dinv.assign(M.num_blocks(), {});
    for (int b = 0; b < M.num_blocks(); ++b) {
        if (M.is_diag(b)) {
            if (M.dim(b) == 0) continue;
            if ((M.dvec(b).array() <= 0.0).any()) return false;
            f.dinv[b] = M.dvec(b).cwiseInverse();
        } else {
            if (M.dim(b) == 0) continue;
            Eigen::LLT<Eigen::MatrixXd> llt(M.mat(b));
            if (llt.info() != Eigen::Success) return false;
            f.inv[b] = llt.solve(Eigen::MatrixXd::Identity(M.dim(b), M.dim(b)));
        }
    }
    return true;
}

// Largest alpha in (0,1] with M + alpha*dM psd (up to a small margin).
double max_step(const BlockMatrix& M, const BlockMatrix& dM) {
    double alpha = 1.0;
    for (int b = 0; b < M.num_blocks(); ++b) {
        if (M.dim(b) == 0) continue;
        if (M.is_diag(b)) {
            for (int r = 0; r < M.dim(b); ++r) {
                const double d = dM.dvec(b)(r);
                if (d < 0.0) alpha = std::min(alpha, -M.dvec(b)(r) / d);
            }
        } else {
            Eigen::LLT<Eigen::MatrixXd> llt(M.mat(b));
            if (llt.info() != Eigen::Success) return 0.0;
            Eigen::MatrixXd L = llt.matrixL();
            Eigen::MatrixXd W = L.triangularView<Eigen::Lower>().solve(dM.mat(b));
            W = L.triangularView<Eigen::Lower>().solve(W.transpose()).eval();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (W + W.transpose()),
                                                              Eigen::EigenvaluesOnly);
            const double lmin = es.eigenvalues().minCoeff();
            if (lmin < -1e-14) alpha = std::min(alpha, -1.0 / lmin);
        }
    }
    return alpha;
}

struct Work {
    const SdpProblem* p = nullptr;
    // per block: list of (var, entries...) for Schur assembly
    std::vector<std::vector<int>> block_vars;                    // dense blocks: vars touching block
    std::vector<std::vector<std::vector<Entry>>> block_entries;  // [block][var slot] entries
    // diagonal blocks: per row, list of (var, value)
    std::vector<std::vector<std::vector<std::pair<int, double>>>> row_vars;

    void build(const SdpProblem& prob) {
        p = &prob;
        const int nb = prob.num_blocks();
        block_vars.assign(nb, {});
        block_entries.assign(nb, {});
        row_vars.assign(nb, {});
        std::vector<std::vector<std::vector<Entry>>> per_block_var(nb);
        for (int b = 0; b < nb; ++b) {
            per_block_var[b].assign(prob.m, {});
            if (prob.block_diagonal(b)) row_vars[b].assign(prob.block_dim(b), {});
        }
        for (int i = 1; i <= prob.m; ++i)
            for (const auto& e : prob.F[i]) {
                if (prob.block_diagonal(e.block))
                    row_vars[e.block][e.row].push_back({i - 1, e.value});
                else
                    per_block_var[e.block][i - 1].push_back(e);
            }
        for (int b = 0; b < nb; ++b) {
            if (prob.block_diagonal(b)) continue;
            for (int i = 0; i < prob.m; ++i)
                if (!per_block_var[b][i].empty()) {
                    block_vars[b].push_back(i);
                    block_entries[b].push_back(std::move(per_block_var[b][i]));
                }
        }
    }
};

void add_combination(const SdpProblem& p, const Eigen::VectorXd& x, double f0coef, BlockMatrix& out) {
    // out += sum_i x_i F_i + f0coef * F_0
    for (int i = 0; i <= p.m; ++i) {
        const double w = (i == 0) ? f0coef : x(i - 1);
        if (w == 0.0) continue;
        for (const auto& e : p.F[i]) {
            if (out.is_diag(e.block)) {
                out.dvec(e.block)(e.row) += w * e.value;
            } else {
                out.mat(e.block)(e.row, e.col) += w * e.value;
                if (e.row != e.col) out.mat(e.block)(e.col, e.row) += w * e.value;
            }
        }
    }
}

class Ipm {
  public:
    Ipm(const SdpProblem& p, const SolveOptions& opts) : p_(p), opts_(opts) {
        work_.build(p);
        nu_ = std::max(1, BlockMatrix(p).total_dim());
    }

    SdpSolution run() {
        const int m = p_.m;
        Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
        BlockMatrix X(p_), Y(p_), P(p_);
        double start = 100.0;
        for (const auto& mat : p_.F)
            for (const auto& e : mat) start = std::max(start, 10.0 * std::fabs(e.value));
        X.set_identity(start);
        Y.set_identity(start);

        SdpSolution sol;
        sol.x.assign(m, 0.0);
        double cmax = 1.0, f0max = 1.0;
        for (double v : p_.c) cmax = std::max(cmax, std::fabs(v));
        for (const auto& e : p_.F[0]) f0max = std::max(f0max, std::fabs(e.value));

        SdpSolution best;
        double best_merit = std::numeric_limits<double>::infinity();
        int regressions = 0;

        BlockFactors Xf, Yf;
        Eigen::MatrixXd B(m, m);
        Eigen::VectorXd rd(m), g(m), dx(m), dxa(m);
        BlockMatrix Rc(p_), Gmat(p_), Nmat(p_), dX(p_), dY(p_), dXa(p_), dYa(p_), Tmp(p_);

        int it = 0;
        for (; it < opts_.max_iterations; ++it) {
            // residuals
            P.set_zero();
            add_combination(p_, x, -1.0, P);
            P.axpy(-1.0, X);
            double pinf = 0.0;
            for (int b = 0; b < P.num_blocks(); ++b)
                pinf = std::max(pinf, P.is_diag(b)
                                          ? (P.dim(b) ? P.dvec(b).cwiseAbs().maxCoeff() : 0.0)
                                          : (P.dim(b) ? P.mat(b).cwiseAbs().maxCoeff() : 0.0));
            for (int i = 0; i < m; ++i) rd(i) = p_.c[i] - sparse_inner(p_.F[i + 1], Y);
            const double dinf = m ? rd.cwiseAbs().maxCoeff() : 0.0;
            const double pobj = Eigen::Map<const Eigen::VectorXd>(p_.c.data(), m).dot(x);
            const double dobj = sparse_inner(p_.F[0], Y);
            const double mu = X.inner(Y) / nu_;
            const double relgap = std::fabs(pobj - dobj) / (1.0 + std::fabs(pobj) + std::fabs(dobj));
            const double rp = pinf / (1.0 + f0max), rdn = dinf / (1.0 + cmax);

            if (opts_.verbose)
                std::fprintf(stderr, "it %3d  pobj %.10e  dobj %.10e  gap %.2e  pinf %.2e  dinf %.2e\n",
                             it, pobj, dobj, relgap, rp, rdn);

            sol.x.assign(x.data(), x.data() + m);
            sol.Xslack = X;
            sol.Y = Y;
            sol.primal_obj = pobj;
            sol.dual_obj = dobj;
            sol.gap = relgap;
            sol.primal_infeas = rp;
            sol.dual_infeas = rdn;
            sol.iterations = it;

            if (relgap <= opts_.tol_gap && rp <= opts_.tol_feas && rdn <= opts_.tol_feas) {
                sol.status = SolveStatus::optimal;
                return sol;
            }
            // keep the best iterate; once high accuracy is reached the
            // endgame can drift numerically and we fall back to it
            const double merit = std::max({relgap, rp, rdn});
            if (merit < best_merit) {
                best_merit = merit;
                best = sol;
                regressions = 0;
            } else if (best_merit < 1e-5) {
                if (++regressions >= 8) {
                    best.status = SolveStatus::near_optimal;
                    best.message = "stopped at best iterate after numerical drift";
                    return best;
                }
            }
            // divergence checks
            const double ynorm = Y.max_abs_eigenvalue();
            if (ynorm > 1e9 * start) {
                double ray_feas = 0.0;
                for (int i = 0; i < m; ++i)
                    ray_feas = std::max(ray_feas, std::fabs(sparse_inner(p_.F[i + 1], Y)) / ynorm);
                const double ray_obj = sparse_inner(p_.F[0], Y) / ynorm;
                if (ray_feas < 1e-7 && ray_obj > 1e-7) {
                    sol.status = SolveStatus::infeasible;
                    sol.message = "dual improving ray found";
                    return sol;
                }
            }
            if (pobj < -1e10 * cmax && rp <= 1e-6) {
                sol.status = SolveStatus::unbounded;
                sol.message = "primal objective diverging";
                return sol;
            }

            if (!factorize(X, Xf) || !factorize(Y, Yf)) {
                sol.status = SolveStatus::near_optimal;
                sol.message = "iterate lost positive definiteness";
                return sol;
            }

            build_schur(Xf, Y, B);
            Eigen::LLT<Eigen::MatrixXd> bllt;
            double ridge = 0.0;
            for (int tries = 0;; ++tries) {
                Eigen::MatrixXd Breg = B;
                if (ridge > 0.0) Breg.diagonal().array() += ridge;
                bllt.compute(Breg);
                if (bllt.info() == Eigen::Success) break;
                ridge = (ridge == 0.0) ? 1e-13 * (B.trace() / m + 1.0) : ridge * 100.0;
                if (tries > 6) {
                    sol.status = SolveStatus::near_optimal;
                    sol.message = "Schur complement not positive definite";
                    return sol;
                }
            }

            // predictor (affine scaling direction); the complementarity
            // right-hand side -XY is eliminated algebraically so that the
            // ill-conditioned product X^{-1} X never appears
            Rc.set_zero();  // corrector cross term dXa*dYa, zero for now
            make_g(0.0, Rc, P, Y, Xf, rd, g);
            dxa = bllt.solve(g);
            dxa += bllt.solve(g - B * dxa);
            make_directions(0.0, Rc, P, Y, Xf, dxa, dXa, dYa);
            const double apa = max_step(X, dXa), ada = max_step(Y, dYa);

            // Mehrotra corrector
            Tmp = X;
            Tmp.axpy(0.95 * apa, dXa);
            BlockMatrix Ya = Y;
            Ya.axpy(0.95 * ada, dYa);
            const double mu_aff = Tmp.inner(Ya) / nu_;
            double sigma = std::pow(mu_aff / std::max(mu, 1e-300), 3.0);
            sigma = std::clamp(sigma, 1e-6, 1.0);

            mul_blocks(dXa, dYa, Rc, 1.0);  // cross term
            make_g(sigma * mu, Rc, P, Y, Xf, rd, g);
            dx = bllt.solve(g);
            dx += bllt.solve(g - B * dx);
            make_directions(sigma * mu, Rc, P, Y, Xf, dx, dX, dY);

            double ap = 0.95 * max_step(X, dX);
            double ad = 0.95 * max_step(Y, dY);
            if (relgap < 1e-4) {
                ap = std::min(1.0, ap / 0.95 * 0.98);
                ad = std::min(1.0, ad / 0.95 * 0.98);
            }

            // step halving if positive definiteness is lost numerically
            BlockFactors probe;
            int halved = 0;
            for (; halved < 30; ++halved) {
                Tmp = X;
                Tmp.axpy(ap, dX);
                if (factorize(Tmp, probe)) break;
                ap *= 0.5;
            }
            if (halved == 30) {
                sol.status = SolveStatus::near_optimal;
                sol.message = "primal step rejected after 30 halvings";
                return sol;
            }
            X = Tmp;
            for (halved = 0; halved < 30; ++halved) {
                Tmp = Y;
                Tmp.axpy(ad, dY);
                if (factorize(Tmp, probe)) break;
                ad *= 0.5;
            }
            if (halved == 30) {
                sol.status = SolveStatus::near_optimal;
                sol.message = "dual step rejected after 30 halvings";
                return sol;
            }
            Y = Tmp;
            x += ap * dx;
            if (ap < 1e-10 && ad < 1e-10) {
                SdpSolution& out = best_merit < std::max({sol.gap, sol.primal_infeas,
                                                          sol.dual_infeas})
                                       ? best
                                       : sol;
                out.status = out.gap < 1e-4 ? SolveStatus::near_optimal : SolveStatus::failed;
                out.message = "search stalled";
                return out;
            }
        }
        SdpSolution& out =
            best_merit < std::max({sol.gap, sol.primal_infeas, sol.dual_infeas}) ? best : sol;
        out.status = (out.gap <= 1e-4 && out.primal_infeas <= 1e-5 && out.dual_infeas <= 1e-5)
                         ? SolveStatus::near_optimal
                         : SolveStatus::failed;
        out.message = "iteration limit reached";
        return out;
    }

  private:
    const SdpProblem& p_;
    const SolveOptions& opts_;
    Work work_;
    int nu_ = 1;

    // out = scale * A*B per block (dense product; diagonal blocks elementwise)
    static void mul_blocks(const BlockMatrix& A, const BlockMatrix& Bm, BlockMatrix& out,
                           double scale) {
        for (int b = 0; b < A.num_blocks(); ++b) {
            if (A.dim(b) == 0) continue;
            if (A.is_diag(b))
                out.dvec(b) = scale * A.dvec(b).cwiseProduct(Bm.dvec(b));
            else
                out.mat(b) = scale * A.mat(b) * Bm.mat(b);
        }
    }

    static void add_identity(BlockMatrix& M, double s) {
        for (int b = 0; b < M.num_blocks(); ++b) {
            if (M.dim(b) == 0) continue;
            if (M.is_diag(b))
                M.dvec(b).array() += s;
            else
                M.mat(b).diagonal().array() += s;
        }
    }

    // B_{ji} = sum_blocks <F_j, X^{-1} F_i Y>
    void build_schur(const BlockFactors& Xf, const BlockMatrix& Y, Eigen::MatrixXd& B) {
        const int m = p_.m;
        B.setZero(m, m);
        const SdpProblem& p = p_;
        // diagonal blocks: rank-1 row contributions with weight y_r / x_r
        for (int b = 0; b < p.num_blocks(); ++b) {
            if (!p.block_diagonal(b)) continue;
            for (int r = 0; r < p.block_dim(b); ++r) {
                const auto& vars = work_.row_vars[b][r];
                if (vars.empty()) continue;
                const double w = Y.dvec(b)(r) * Xf.dinv[b](r);
                for (size_t a = 0; a < vars.size(); ++a) {
                    const double va = vars[a].second * w;
                    for (size_t c = a; c < vars.size(); ++c) {
                        B(vars[a].first, vars[c].first) += va * vars[c].second;
                        if (vars[a].first != vars[c].first)
                            B(vars[c].first, vars[a].first) += va * vars[c].second;
                    }
                }
            }
        }
        // dense blocks
        for (int b = 0; b < p.num_blocks(); ++b) {
            if (p.block_diagonal(b)) continue;
            const auto& vars = work_.block_vars[b];
            const int d = p.block_dim(b);
            Eigen::MatrixXd Fi(d, d), W(d, d);
            for (size_t s = 0; s < vars.size(); ++s) {
                Fi.setZero();
                for (const auto& e : work_.block_entries[b][s]) {
                    Fi(e.row, e.col) += e.value;
                    if (e.row != e.col) Fi(e.col, e.row) += e.value;
                }
                W.noalias() = Xf.inv[b] * Fi * Y.mat(b);
                for (size_t s2 = 0; s2 < vars.size(); ++s2) {
                    double acc = 0.0;
                    for (const auto& e : work_.block_entries[b][s2])
                        acc += (e.row == e.col) ? e.value * W(e.row, e.row)
                                                : e.value * (W(e.row, e.col) + W(e.col, e.row));
                    B(vars[s2], vars[s]) += acc;
                }
            }
        }
        B = 0.5 * (B + B.transpose()).eval();
    }

    // With the HKM right-hand side Rc = sigma_mu*I - XY - Q (Q the Mehrotra
    // cross term dXa*dYa), the Schur right-hand side reduces to
    //   g_j = <F_j, sigma_mu X^{-1} - Y - X^{-1}(Q + P Y)> - (c_j - <F_j, Y>);
    // the X^{-1}X cancellation is carried out exactly.
    void make_g(double sigma_mu, const BlockMatrix& Q, const BlockMatrix& P, const BlockMatrix& Y,
                const BlockFactors& Xf, const Eigen::VectorXd& rd, Eigen::VectorXd& g) {
        BlockMatrix G(p_);
        for (int b = 0; b < G.num_blocks(); ++b) {
            if (G.dim(b) == 0) continue;
            if (G.is_diag(b)) {
                G.dvec(b) = Xf.dinv[b].cwiseProduct(
                                Eigen::VectorXd::Constant(G.dim(b), sigma_mu) - Q.dvec(b) -
                                P.dvec(b).cwiseProduct(Y.dvec(b))) -
                            Y.dvec(b);
            } else {
                G.mat(b).noalias() =
                    Xf.inv[b] * (sigma_mu * Eigen::MatrixXd::Identity(G.dim(b), G.dim(b)) -
                                 Q.mat(b) - P.mat(b) * Y.mat(b));
                G.mat(b) -= Y.mat(b);
            }
        }
        for (int i = 0; i < p_.m; ++i) g(i) = inner_asym(p_.F[i + 1], G) - rd(i);
    }

    // dX = P + sum dx_i F_i;  dY = sym(sigma_mu X^{-1} - Y - X^{-1}(Q + dX Y))
    void make_directions(double sigma_mu, const BlockMatrix& Q, const BlockMatrix& P,
                         const BlockMatrix& Y, const BlockFactors& Xf, const Eigen::VectorXd& dx,
                         BlockMatrix& dX, BlockMatrix& dY) {
        dX.set_zero();
        add_combination(p_, dx, 0.0, dX);
        dX.axpy(1.0, P);
        for (int b = 0; b < dY.num_blocks(); ++b) {
            if (dY.dim(b) == 0) continue;
            if (dY.is_diag(b)) {
                dY.dvec(b) = Xf.dinv[b].cwiseProduct(
                                 Eigen::VectorXd::Constant(dY.dim(b), sigma_mu) - Q.dvec(b) -
                                 dX.dvec(b).cwiseProduct(Y.dvec(b))) -
                             Y.dvec(b);
            } else {
                Eigen::MatrixXd D =
                    Xf.inv[b] * (sigma_mu * Eigen::MatrixXd::Identity(dY.dim(b), dY.dim(b)) -
                                 Q.mat(b) - dX.mat(b) * Y.mat(b));
                D -= Y.mat(b);
                dY.mat(b) = 0.5 * (D + D.transpose());
            }
        }
    }

    // <F, G> where G need not be symmetric
    static double inner_asym(const std::vector<Entry>& f, const BlockMatrix& G) {
        double s = 0.0;
        for (const auto& e : f) {
            if (G.is_diag(e.block)) {
                if (e.row == e.col) s += e.value * G.dvec(e.block)(e.row);
            } else {
                s += (e.row == e.col) ? e.value * G.mat(e.block)(e.row, e.row)
                                      : e.value * (G.mat(e.block)(e.row, e.col) +
                                                   G.mat(e.block)(e.col, e.row));
            }
        }
        return s;
    }
};

}  // namespace

// ---- scaling wrapper and external bridge --------------------------------------

namespace {

SdpSolution solve_builtin(const SdpProblem& orig, const SolveOptions& opts) {
    SdpProblem p = orig;
    p.canonicalize();
    p.validate();

    // per-block scale and objective scale keep the iterates well conditioned
    std::vector<double> bscale(p.num_blocks(), 1.0);
    for (const auto& mat : p.F)
        for (const auto& e : mat) bscale[e.block] = std::max(bscale[e.block], std::fabs(e.value));
    for (auto& mat : p.F)
        for (auto& e : mat) e.value /= bscale[e.block];
    double cscale = 1.0;
    for (double v : p.c) cscale = std::max(cscale, std::fabs(v));
    for (auto& v : p.c) v /= cscale;

    Ipm ipm(p, opts);
    SdpSolution sol = ipm.run();

    // undo scaling: Y_orig = cscale / bscale * Y, X_orig = bscale * X
    for (int b = 0; b < sol.Y.num_blocks(); ++b) {
        const double fy = cscale / bscale[b], fx = bscale[b];
        if (sol.Y.is_diag(b)) {
            sol.Y.dvec(b) *= fy;
            sol.Xslack.dvec(b) *= fx;
        } else {
            sol.Y.mat(b) *= fy;
            sol.Xslack.mat(b) *= fx;
        }
    }
    double pobj = 0.0;
    for (int i = 0; i < orig.m; ++i) pobj += orig.c[i] * sol.x[i];
    sol.primal_obj = pobj;
    sol.dual_obj = sparse_inner(orig.F[0], sol.Y);
    sol.gap = std::fabs(sol.primal_obj - sol.dual_obj) /
              (1.0 + std::fabs(sol.primal_obj) + std::fabs(sol.dual_obj));
    return sol;
}

std::string fresh_path(const char* tag) {
    static std::mt19937_64 rng(std::random_device{}());
    std::ostringstream name;
    name << "codesdp_" << tag << "_" << std::hex << rng() << ".tmp";
    return (std::filesystem::temp_directory_path() / name.str()).string();
}

SdpSolution solve_external(const SdpProblem& p, const SolveOptions& opts) {
    SdpSolution sol;
    if (opts.command_template.find("{in}") == std::string::npos ||
        opts.command_template.find("{out}") == std::string::npos) {
        sol.status = SolveStatus::failed;
        sol.message = "external backend: command template must contain {in} and {out}";
        return sol;
    }
    const std::string in = fresh_path("in"), out = fresh_path("out");
    {
        std::ofstream os(in);
        write_sdpa(p, os);
        if (!os) {
            sol.status = SolveStatus::failed;
            sol.message = "external backend: cannot write " + in;
            return sol;
        }
    }
    std::string cmd = opts.command_template;
    auto subst = [&cmd](const std::string& key, const std::string& val) {
        for (size_t pos; (pos = cmd.find(key)) != std::string::npos;)
            cmd.replace(pos, key.size(), val);
    };
    subst("{in}", in);
    subst("{out}", out);
    const int rc = std::system(cmd.c_str());
    if (rc != 0) {
        std::filesystem::remove(in);
        sol.status = SolveStatus::failed;
        sol.message = "external solver exited with code " + std::to_string(rc);
        return sol;
    }
    std::ifstream is(out);
    if (!is) {
        std::filesystem::remove(in);
        sol.status = SolveStatus::failed;
        sol.message = "external solver produced no output file";
        return sol;
    }
    try {
        sol = read_sdpa_solution(is, p);
    } catch (const std::exception& ex) {
        sol.status = SolveStatus::failed;
        sol.message = std::string("external solution parse failure: ") + ex.what();
    }
    std::filesystem::remove(in);
    std::filesystem::remove(out);
    return sol;
}

}  // namespace

SdpSolution solve(const SdpProblem& p, const SolveOptions& opts) {
    if (opts.backend == SolveOptions::Backend::external) return solve_external(p, opts);
    return solve_builtin(p, opts);
}

}  // namespace codesdp::sdp
