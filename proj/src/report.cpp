#include "codesdp/report.hpp"

#include <sstream>

#include <json.hpp>

namespace codesdp {

std::string BoundReport::to_json() const {
    nlohmann::json j;
    j["q"] = q;
    j["n"] = n;
    if (kind == "cover") {
        j["r"] = d;
        j["ineq"] = ineq;
    } else {
        j["d"] = d;
    }
    j["method"] = method;
    j["direction"] = direction;
    j["solver_objective"] = solver_objective;
    j["certified_value"] = certified_value;
    j["integer_bound"] = integer_bound;
    j["raw_integer_bound"] = raw_integer_bound;
    j["status"] = status;
    j["gap"] = gap;
    j["residual_max"] = residual_max;
    j["wall_time_ms"] = wall_time_ms;
    if (exact) j["exact"] = *exact;
    return j.dump();
}

std::string BoundReport::to_text() const {
    std::ostringstream os;
    os << (kind == "cover" ? "K" : "A") << "_" << q << "(" << n << "," << d << ")  method="
       << method;
    if (!ineq.empty()) os << "  ineq=" << ineq;
    os << "  " << (direction == "upper" ? "<=" : ">=") << " " << integer_bound;
    if (exact) os << "  (exact " << *exact << ")";
    os.precision(10);
    os << "  [solver " << solver_objective << ", certified " << certified_value << ", status "
       << status << ", gap " << gap << ", " << wall_time_ms << " ms]";
    return os.str();
}

}  // namespace codesdp
