#pragma once

#include <string>
#include <vector>

#include "codesdp/sdp.hpp"

namespace codesdp::certify {

// Dual-side certificate data: Y together with the recomputed constraint
// residuals eps_i = <F_i,Y> - c_i. For any feasible x of the minimization
// with x inside the box,
//   <F_0,Y> <= c^T x + sum_i x_i eps_i,
// so  <F_0,Y> - sum_i max(lo_i eps_i, hi_i eps_i)  bounds the optimum from
// below.
struct DualCertificate {
    sdp::BlockMatrix y_blocks;
    std::vector<double> epsilons;  // recomputed from the problem, never trusted
    double dual_obj = 0.0;
    double min_eig = 0.0;  // least eigenvalue over the blocks of Y
    std::vector<std::pair<double, double>> box;
    bool psd_ok = false;
};

struct VerifyResult {
    bool ok = false;
    double certified = 0.0;  // lower bound on the primal minimum
    DualCertificate cert;
    std::string message;
};

// Recomputes the residuals in double precision with compensated summation,
// checks Y >= -delta*I blockwise (delta = 1e-9 * ||Y||), and applies the
// worst-case box adjustment. The box must cover every variable.
VerifyResult verify_certificate(const sdp::SdpProblem& p, const sdp::SdpSolution& sol,
                                const std::vector<std::pair<double, double>>& box);

// Projects each Y block onto the psd cone when its least eigenvalue lies in
// [-1e-7*||Y||, 0); otherwise returns the solution unchanged.
sdp::SdpSolution clamp_dual(const sdp::SdpSolution& sol);

// JSON with blocks as dense row-major arrays, for archival next to reports.
std::string certificate_json(const DualCertificate& cert);

}  // namespace codesdp::certify
