#include "codesdp/combinatorics.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace codesdp::comb {

Int binomial(long n, long k) {
    if (n < 0 || k < 0 || k > n) return 0;
    Int r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return r;
}

Int multinomial(long n, const std::vector<long>& parts) {
    if (n < 0) return 0;
    long used = 0;
    for (long p : parts) {
        if (p < 0) return 0;
        used += p;
    }
    if (used > n) return 0;
    Int r = 1;
    long rest = n;
    for (long p : parts) {
        r *= binomial(rest, p);
        rest -= p;
    }
    return r;
}

Int ipow(long q, unsigned long e) {
    Int r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(q), e);
    return r;
}

Int krawtchouk(int q, int n, int j, int x) {
    if (q < 2 || j < 0 || j > n || x < 0 || x > n)
        throw std::invalid_argument("krawtchouk: arguments out of range");
    Int sum = 0;
    for (int k = 0; k <= j; ++k) {
        Int term = binomial(x, k) * binomial(n - x, j - k) * ipow(q - 1, static_cast<unsigned long>(j - k));
        if (k % 2)
            sum -= term;
        else
            sum += term;
    }
    return sum;
}

Int sphere_size(int q, int n, int r) {
    if (q < 2 || r < 0 || r > n)
        throw std::invalid_argument("sphere_size: arguments out of range");
    Int s = 0;
    for (int i = 0; i <= r; ++i) s += binomial(n, i) * ipow(q - 1, static_cast<unsigned long>(i));
    return s;
}

Int sphere_covering_bound(int q, int n, int r) {
    Int vol = sphere_size(q, n, r);
    Int space = ipow(q, static_cast<unsigned long>(n));
    Int b;
    mpz_cdiv_q(b.get_mpz_t(), space.get_mpz_t(), vol.get_mpz_t());
    return b;
}

bool distance_vector_psd(const DistanceVector& v) {
    const int n = v.n;
    if (static_cast<int>(v.x.size()) != n + 1)
        throw std::invalid_argument("distance_vector_psd: x must have length n+1");
    double xmax = 0.0, kmax = 0.0;
    for (double xi : v.x) xmax = std::max(xmax, std::fabs(xi));
    std::vector<std::vector<double>> K(n + 1, std::vector<double>(n + 1));
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
            K[j][i] = krawtchouk(v.q, n, j, i).get_d();
            kmax = std::max(kmax, std::fabs(K[j][i]));
        }
    const double tol = 1e-10 * xmax * kmax;
    for (int j = 0; j <= n; ++j) {
        double s = 0.0;
        for (int i = 0; i <= n; ++i) s += v.x[i] * K[j][i];
        if (s < -tol) return false;
    }
    return true;
}

}  // namespace codesdp::comb
