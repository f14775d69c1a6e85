#pragma once

#include "codesdp/report.hpp"
#include "codesdp/sdp.hpp"

namespace codesdp::codes {

enum class Method { delsarte, sdp_basic, sdp_laurent, matrixcut_nplus, matrixcut_ntilde };

Method method_from_string(const std::string& s);  // delsarte|sdp|sdp+|nplus|ntilde
std::string to_string(Method m);

struct CodeBoundSpec {
    int q = 3;
    int n = 1;
    int d = 1;
    Method method = Method::delsarte;
};

// Delsarte bound. The default trace formulation maximizes q^n x_0 over
// nonnegative Bose-Mesner coefficients with R(sum x_i A_i) psd (Krawtchouk
// rows plus a 2x2 border); with trace_form=false the classical distribution
// LP is emitted instead (its optimum is 1 + the negated solver minimum).
// Both give the same value.
sdp::SdpProblem build_delsarte(int q, int n, int d, bool trace_form = true);

enum class Strength { basic, laurent, variation1, variation2 };

// The triple-distance SDP over I(q,n) (q = 2 runs on the binary class set
// with the beta blocks). basic: x_{0,0}^{0,0} = 1, maximize
// sum_i C(n,i)(q-1)^i x_{i,0}^{0,0}, both block families psd.
// laurent: maximize q^n x_{0,0}^{0,0} with the second family's (0,0) block
// bordered by diag(M'') and corner 1 - x_{0,0}^{0,0}.
sdp::SdpProblem build_schrijver_sdp(int q, int n, int d, Strength strength);

enum class CutVariant { nplus, ntilde };

// The matrix-cut programs. Neither applies the triple symmetry
// identification; only the transpose pairing (i,j,t,p) ~ (j,i,t,p) is used.
sdp::SdpProblem build_matrix_cut_sdp(int q, int n, int d, CutVariant variant);

// Ternary program with the line-configuration classes x_{i,i}^{i,0} zeroed
// instead of a distance constraint; optimum 1 + (3^n - 1)/2.
sdp::SdpProblem build_affine_cap_sdp(int n);

// Build, solve, certify against the [0,1] box, floor.
BoundReport code_bound(const CodeBoundSpec& spec, const RunOptions& opts = {});

// Debug entry points for the two objective variations of the basic SDP;
// variation 1 provably matches the basic value, variation 2 is one-sided.
BoundReport code_bound_variation(int q, int n, int d, int which, const RunOptions& opts = {});

BoundReport affine_cap_bound(int n, const RunOptions& opts = {});

}  // namespace codesdp::codes
