#include "codesdp/certify.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace codesdp::certify {

using sdp::BlockMatrix;
using sdp::Entry;

namespace {

// Kahan-compensated <F_i, Y> (off-diagonal entries twice). Fixed summation
// order keeps the result bit-identical across runs.
double compensated_inner(const std::vector<Entry>& f, const BlockMatrix& y) {
    double sum = 0.0, comp = 0.0;
    for (const auto& e : f) {
        const double yv = y.is_diag(e.block) ? (e.row == e.col ? y.dvec(e.block)(e.row) : 0.0)
                                             : y.mat(e.block)(e.row, e.col);
        const double term = (e.row == e.col) ? e.value * yv : 2.0 * e.value * yv;
        const double t = sum + term;
        if (std::fabs(sum) >= std::fabs(term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
    }
    return sum + comp;
}

}  // namespace

VerifyResult verify_certificate(const sdp::SdpProblem& p, const sdp::SdpSolution& sol,
                                const std::vector<std::pair<double, double>>& box) {
    VerifyResult out;
    if (sol.Y.empty()) {
        out.message = "solution carries no dual matrix";
        return out;
    }
    if (static_cast<int>(box.size()) != p.m) {
        out.message = "box does not cover all variables";
        return out;
    }
    DualCertificate& cert = out.cert;
    cert.y_blocks = sol.Y;
    cert.box = box;
    cert.dual_obj = compensated_inner(p.F[0], sol.Y);
    cert.min_eig = sol.Y.min_eigenvalue();
    const double ynorm = sol.Y.max_abs_eigenvalue();
    const double delta = 1e-9 * ynorm;
    cert.psd_ok = cert.min_eig >= -delta;

    cert.epsilons.resize(p.m);
    double adjust = 0.0, comp = 0.0;
    for (int i = 0; i < p.m; ++i) {
        const double eps = compensated_inner(p.F[i + 1], sol.Y) - p.c[i];
        cert.epsilons[i] = eps;
        const double worst = std::max(box[i].first * eps, box[i].second * eps);
        const double t = adjust + worst;
        if (std::fabs(adjust) >= std::fabs(worst))
            comp += (adjust - t) + worst;
        else
            comp += (worst - t) + adjust;
        adjust = t;
    }
    adjust += comp;

    if (!cert.psd_ok) {
        out.message = "dual matrix is not positive semidefinite (min eig " +
                      std::to_string(cert.min_eig) + ")";
        return out;
    }
    out.ok = true;
    out.certified = cert.dual_obj - adjust;
    return out;
}

sdp::SdpSolution clamp_dual(const sdp::SdpSolution& sol) {
    if (sol.Y.empty()) return sol;
    const double ynorm = sol.Y.max_abs_eigenvalue();
    const double min_eig = sol.Y.min_eigenvalue();
    if (min_eig >= 0.0 || min_eig < -1e-7 * ynorm) return sol;
    sdp::SdpSolution out = sol;
    for (int b = 0; b < out.Y.num_blocks(); ++b) {
        if (out.Y.dim(b) == 0) continue;
        if (out.Y.is_diag(b)) {
            out.Y.dvec(b) = out.Y.dvec(b).cwiseMax(0.0);
        } else {
            Eigen::MatrixXd s = 0.5 * (out.Y.mat(b) + out.Y.mat(b).transpose());
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
            Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
            out.Y.mat(b) = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
        }
    }
    return out;
}

std::string certificate_json(const DualCertificate& cert) {
    nlohmann::json j;
    j["dual_obj"] = cert.dual_obj;
    j["min_eig"] = cert.min_eig;
    j["psd_ok"] = cert.psd_ok;
    j["epsilons"] = cert.epsilons;
    nlohmann::json blocks = nlohmann::json::array();
    for (int b = 0; b < cert.y_blocks.num_blocks(); ++b) {
        nlohmann::json blk;
        const int d = cert.y_blocks.dim(b);
        blk["dim"] = d;
        blk["diagonal"] = cert.y_blocks.is_diag(b);
        std::vector<double> vals;
        if (cert.y_blocks.is_diag(b)) {
            vals.assign(cert.y_blocks.dvec(b).data(), cert.y_blocks.dvec(b).data() + d);
        } else {
            vals.reserve(static_cast<size_t>(d) * d);
            for (int r = 0; r < d; ++r)
                for (int c = 0; c < d; ++c) vals.push_back(cert.y_blocks.mat(b)(r, c));
        }
        blk["values"] = vals;
        blocks.push_back(blk);
    }
    j["blocks"] = blocks;
    nlohmann::json boxes = nlohmann::json::array();
    for (const auto& [lo, hi] : cert.box) boxes.push_back({lo, hi});
    j["box"] = boxes;
    return j.dump();
}

}  // namespace codesdp::certify
