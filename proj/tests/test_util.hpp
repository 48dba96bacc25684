#ifndef BSCH_TEST_UTIL_HPP
#define BSCH_TEST_UTIL_HPP

#include <cmath>
#include <cstdint>
#include <vector>

// Shared helpers for the test suites: a deterministic RNG independent of
// the library's noise generator, and dense little oracles.

namespace testutil {

// xorshift64* PRNG, fixed-seed deterministic.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : s_(seed ? seed : 0x9e3779b9ULL) {}

    std::uint64_t next_u64() {
        s_ ^= s_ >> 12;
        s_ ^= s_ << 25;
        s_ ^= s_ >> 27;
        return s_ * 0x2545F4914F6CDD1DULL;
    }

    // uniform in [lo, hi)
    double uniform(double lo, double hi) {
        const double u = static_cast<double>(next_u64() >> 11) * 0x1p-53;
        return lo + (hi - lo) * u;
    }

  private:
    std::uint64_t s_;
};

// Dense Gaussian elimination with partial pivoting; solves A x = b in
// place. Returns false on a (numerically) singular pivot.
inline bool dense_solve(std::vector<std::vector<double>> A,
                        std::vector<double> b, std::vector<double>& x) {
    const std::size_t n = A.size();
    std::vector<std::size_t> piv(n);
    for (std::size_t i = 0; i < n; ++i) piv[i] = i;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t best = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(A[r][col]) > std::abs(A[best][col])) best = r;
        }
        if (std::abs(A[best][col]) < 1e-300) return false;
        std::swap(A[col], A[best]);
        std::swap(b[col], b[best]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = A[r][col] / A[col][col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) A[r][c] -= f * A[col][c];
            b[r] -= f * b[col];
        }
    }
    x.assign(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= A[i][c] * x[c];
        x[i] = s / A[i][i];
    }
    return true;
}

// |a - b| <= tol, NaN-safe (NaN never passes).
inline bool near(double a, double b, double tol) {
    return std::abs(a - b) <= tol;
}

inline double max_abs_diff(const std::vector<double>& a,
                           const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

} // namespace testutil

#endif
