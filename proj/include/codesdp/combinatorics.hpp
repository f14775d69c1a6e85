#pragma once

#include <gmpxx.h>

#include <vector>

namespace codesdp {

// All counting is done in arbitrary precision. Quantities such as q^{2n}
// overflow 64 bits already for moderate n, and several cross-checks in the
// test suite rely on bitwise-exact integer arithmetic.
using Int = mpz_class;
using Rat = mpq_class;

namespace comb {

// C(n,k). Out-of-range arguments (k < 0, k > n, n < 0) give 0; the
// coefficient sums built on top of this implicitly range over all integers
// with vanishing terms.
Int binomial(long n, long k);

// n! / (parts_0! parts_1! ... (n - sum parts)!); 0 if any part is negative
// or the parts exceed n.
Int multinomial(long n, const std::vector<long>& parts);

// K_j(x) = sum_k (-1)^k C(x,k) C(n-x,j-k) (q-1)^{j-k}.
// Requires q >= 2, 0 <= j <= n, 0 <= x <= n.
Int krawtchouk(int q, int n, int j, int x);

// |B_r| = sum_{i<=r} C(n,i)(q-1)^i. Requires 0 <= r <= n.
Int sphere_size(int q, int n, int r);

// ceil(q^n / |B_r|).
Int sphere_covering_bound(int q, int n, int r);

// q^e for small exact powers.
Int ipow(long q, unsigned long e);

struct DistanceVector {
    int q = 2;
    int n = 1;
    std::vector<double> x;  // length n+1
};

// True iff sum_i x_i K_j(i) >= -tol for j = 0..n, with
// tol = 1e-10 * max|x_i| * max|K|. Equivalently, the matrix
// sum_i x_i gamma_i^{-1} A_i over the Hamming scheme is positive
// semidefinite (gamma_i = q^n C(n,i)(q-1)^i counts the nonzeros of A_i);
// the Krawtchouk row sums are exactly its eigenvalues up to positive
// scaling.
bool distance_vector_psd(const DistanceVector& v);

}  // namespace comb
}  // namespace codesdp
