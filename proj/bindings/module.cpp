#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "codesdp/bounds_code.hpp"
#include "codesdp/bounds_covering.hpp"
#include "codesdp/combinatorics.hpp"
#include "codesdp/terwilliger.hpp"

namespace py = pybind11;
namespace comb = codesdp::comb;
namespace tw = codesdp::terwilliger;
namespace codes = codesdp::codes;
namespace covering = codesdp::covering;

namespace {

py::dict report_to_dict(const codesdp::BoundReport& r) {
    py::dict d;
    d["kind"] = r.kind;
    d["q"] = r.q;
    d["n"] = r.n;
    d[r.kind == "cover" ? "r" : "d"] = r.d;
    d["method"] = r.method;
    d["direction"] = r.direction;
    d["solver_objective"] = r.solver_objective;
    d["certified_value"] = r.certified_value;
    d["integer_bound"] = r.integer_bound;
    d["raw_integer_bound"] = r.raw_integer_bound;
    d["status"] = r.status;
    d["gap"] = r.gap;
    if (r.exact) d["exact"] = *r.exact;
    return d;
}

codesdp::RunOptions run_options(double tol_gap, int max_iterations) {
    codesdp::RunOptions o;
    o.solver.tol_gap = tol_gap;
    o.solver.max_iterations = max_iterations;
    return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Semidefinite programming bounds for error-correcting and covering codes";

    m.def("binomial", [](long n, long k) { return py::cast(comb::binomial(n, k).get_str()); });
    m.def("krawtchouk", [](int q, int n, int j, int x) {
        return py::cast(comb::krawtchouk(q, n, j, x).get_str());
    });
    m.def("sphere_covering_bound", [](int q, int n, int r) {
        return py::cast(comb::sphere_covering_bound(q, n, r).get_str());
    });
    m.def("class_count", [](int q, int n) { return tw::ClassIndex(q, n).size(); });
    m.def("block_specs", [](int q, int n) {
        py::list out;
        for (const auto& s : tw::block_specs(q, n)) {
            py::dict d;
            d["a"] = s.a;
            d["k"] = s.k;
            d["size"] = s.size;
            d["multiplicity"] = s.multiplicity.get_str();
            out.append(d);
        }
        return out;
    });

    m.def(
        "code_bound",
        [](int q, int n, int d, const std::string& method, double tol_gap, int max_iterations) {
            codes::CodeBoundSpec spec{q, n, d, codes::method_from_string(method)};
            return report_to_dict(codes::code_bound(spec, run_options(tol_gap, max_iterations)));
        },
        py::arg("q"), py::arg("n"), py::arg("d"), py::arg("method") = "sdp+",
        py::arg("tol_gap") = 1e-7, py::arg("max_iterations") = 200,
        py::call_guard<py::gil_scoped_release>());

    m.def(
        "covering_bound",
        [](int q, int n, int r, const std::string& method, const std::string& ineq, double tol_gap,
           int max_iterations) {
            covering::CoverBoundSpec spec;
            spec.q = q;
            spec.n = n;
            spec.r = r;
            spec.method = covering::method_from_string(method);
            if (ineq == "sphere")
                spec.inequalities.push_back(covering::sphere_covering_ineq(q, n, r));
            else if (ineq == "vanwee")
                spec.inequalities.push_back(covering::van_wee_ineq(n, r));
            else
                throw std::invalid_argument("ineq must be 'sphere' or 'vanwee'");
            return report_to_dict(
                covering::covering_bound(spec, run_options(tol_gap, max_iterations)));
        },
        py::arg("q"), py::arg("n"), py::arg("r"), py::arg("method") = "sdp2",
        py::arg("ineq") = "sphere", py::arg("tol_gap") = 1e-7, py::arg("max_iterations") = 200,
        py::call_guard<py::gil_scoped_release>());

    m.def(
        "affine_cap_bound",
        [](int n, double tol_gap, int max_iterations) {
            return report_to_dict(codes::affine_cap_bound(n, run_options(tol_gap, max_iterations)));
        },
        py::arg("n"), py::arg("tol_gap") = 1e-7, py::arg("max_iterations") = 200,
        py::call_guard<py::gil_scoped_release>());
}
