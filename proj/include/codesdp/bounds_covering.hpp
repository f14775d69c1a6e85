#pragma once

#include <iosfwd>
#include <map>

#include "codesdp/report.hpp"
#include "codesdp/sdp.hpp"
#include "codesdp/terwilliger.hpp"

namespace codesdp::covering {

// A family of valid inequalities sum_i lambda_i A_i(u) >= beta on the
// per-word distance counts of a covering code. Coefficients are exact
// rationals; conversion to floating point happens only at SDP assembly.
struct LinearInequalitySet {
    int q = 2;
    int n = 1;
    std::vector<Rat> lambda;  // length n+1, nonnegative
    Rat beta = 1;
    std::string name;

    void validate() const;  // throws on negative lambda / nonpositive beta
};

// User-supplied exact covering-design numbers F(m,k). Values are never
// synthesized; a missing entry is an error.
struct CoveringNumberTable {
    std::map<std::pair<int, int>, Int> entries;
    const Int& at(int m, int k) const;  // throws naming (m,k) when absent
};

enum class Method { lin, sdp1, sdp2 };
Method method_from_string(const std::string& s);
std::string to_string(Method m);

struct CoverBoundSpec {
    int q = 2;
    int n = 1;
    int r = 1;
    Method method = Method::lin;
    std::vector<LinearInequalitySet> inequalities;
};

LinearInequalitySet sphere_covering_ineq(int q, int n, int r);
// Binary only; lambda_i = ceil((n+1)/(r+1)) below r, 1 at r and r+1.
LinearInequalitySet van_wee_ineq(int n, int r);
// Binary only, r >= 2; the Johnson/Zhang pair covering inequality built from
// table values F(n-r+1, r+2) and F(n-i*r+1, r+2).
LinearInequalitySet pair_covering_ineq(int q, int n, int r, const CoveringNumberTable& table);

// alpha_{i,j}^k: number of words v with |S(v)| = i and d(v,u) = j when
// |S(u)| = k. Symmetric in i and j.
Int pair_intersection(int q, int n, int i, int j, int k);

// Summing the inequality over the sphere S_i(u) gives
// lambda'_k = sum_j lambda_j alpha_{i,j}^k, beta' = C(n,i)(q-1)^i beta.
LinearInequalitySet induce_inequality(int q, int n, const LinearInequalitySet& ineq, int i);
// Divide everything by `divisor` > 0 and round each entry up.
LinearInequalitySet scale_round(const LinearInequalitySet& ineq, const Rat& divisor);
// Nonnegative combination (plain sum) of two inequality sets.
LinearInequalitySet add(const LinearInequalitySet& a, const LinearInequalitySet& b);

// beta q^n / sum_i lambda_i C(n,i)(q-1)^i, exact.
Rat lin_ineq_bound(int q, int n, const LinearInequalitySet& ineq);

// Number of words w with d(base-word, u, w) in class (i, jp, tp, pp) and
// d(v, w) = d, where (u, v) realizes `base`. For q = 2 pass the binary class
// (p = t) and pp = tp.
Int triple_intersection(int q, int n, const terwilliger::TripleClass& base, int jp, int tp, int pp,
                        int d);

// min q^n x_0 over the Bose-Mesner relaxation: x >= 0, Krawtchouk rows,
// the induced row inequalities of each set for both the row and the
// complement row of the lifted matrix, and the 2x2 border.
sdp::SdpProblem build_first_sdp(int q, int n, int r,
                                const std::vector<LinearInequalitySet>& ineqs);

// min q^n x_{0,0}^{0,0} over the Terwilliger relaxation with the four
// row-inequality families per class and the bordered second block family.
// q = 2 runs on the binary class set with the beta blocks.
sdp::SdpProblem build_second_sdp(int q, int n, int r,
                                 const std::vector<LinearInequalitySet>& ineqs);

// Solve and certify from the dual side; integer_bound = ceil(certified-1e-9).
BoundReport covering_bound(const CoverBoundSpec& spec, const RunOptions& opts = {});

// File formats: inequality sets as "q n beta" then n+1 lines "i lambda_i"
// (rationals allowed); covering tables as lines "m k F".
LinearInequalitySet read_inequality_file(std::istream& is);
CoveringNumberTable read_ftable(std::istream& is);

}  // namespace codesdp::covering
