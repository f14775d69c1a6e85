#pragma once

#include <optional>
#include <string>

#include "codesdp/sdp.hpp"

namespace codesdp {

struct RunOptions {
    sdp::SolveOptions solver;
    bool keep_problem = false;  // attach the built problem to the report
};

// Result of one bound computation. `certified_value` is always a valid bound
// in the direction given by `direction`; `integer_bound` is its floor (upper
// bounds) or ceiling (lower bounds) with a 1e-9 representation guard.
// `raw_integer_bound` applies the same rounding to the plain solver
// objective; the two are reported side by side.
struct BoundReport {
    std::string kind;    // "code" or "cover"
    int q = 0, n = 0;
    int d = 0;           // minimum distance (code) or covering radius (cover)
    std::string method;
    std::string ineq;    // covering only
    std::string direction = "upper";
    double solver_objective = 0.0;
    double certified_value = 0.0;
    long long integer_bound = 0;
    long long raw_integer_bound = 0;
    std::string status = "failed";
    double gap = 0.0;
    double residual_max = 0.0;
    double wall_time_ms = 0.0;
    std::optional<std::string> exact;  // exact rational value when available

    std::string to_json() const;
    std::string to_text() const;
};

}  // namespace codesdp
