#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bsch/potentials.hpp"
#include "test_util.hpp"

using namespace bsch;

namespace {

// Independent oracle for the resolvent equation j + lam*beta(j) = r:
// plain bisection on the bracket, no Newton anywhere.
double bisect_resolvent(const Potential& base, double lam, double r,
                        double tol = 1e-12) {
    double lo, hi;
    if (base.singular()) {
        lo = -1.0 + 1e-300;
        hi = 1.0 - 1e-300;
        lo = std::nextafter(-1.0, 1.0);
        hi = std::nextafter(1.0, -1.0);
    } else {
        lo = -std::abs(r) - 1.0;
        hi = std::abs(r) + 1.0;
    }
    auto f = [&](double j) { return j + lam * base.beta(j) - r; };
    for (int it = 0; it < 400 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("logarithmic beta closed forms") {
    const Potential p = Potential::logarithmic(2.0, 4.0);
    CHECK(p.beta(0.0) == 0.0);
    CHECK(p.beta_hat(0.0) == 0.0);
    // (theta/2) ln((1+r)/(1-r)) at theta=2, r=0.5 -> ln 3
    CHECK(p.beta(0.5) == doctest::Approx(1.0986122886681098).epsilon(1e-14));
    CHECK(p.varpi() == 2.0);
    CHECK(p.beta_prime(0.0) == doctest::Approx(2.0));

    const Potential q = Potential::quartic();
    CHECK(q.beta(-1.0) == -1.0);
    CHECK(q.f(1.0) == doctest::Approx(0.0)); // (r^2-1)^2/4 at r=1
    CHECK(q.f(0.0) == doctest::Approx(0.25));
}

TEST_CASE("domain guard on singular kinds") {
    const Potential p = Potential::logarithmic(1.0, 2.0);
    CHECK_THROWS_AS(p.beta(1.0), DomainError);
    CHECK_THROWS_AS(p.beta(-1.0), DomainError);
    CHECK_THROWS_AS(p.beta_hat(1.5), DomainError);
    CHECK_THROWS_AS(p.beta_prime(-2.0), DomainError);
    CHECK_NOTHROW(p.beta(0.999999));

    const Potential obs = Potential::double_obstacle(2.0);
    CHECK_THROWS_AS(obs.beta(0.5), KindMismatch);
    CHECK(obs.beta_hat(1.0) == 0.0);
    CHECK_THROWS_AS(obs.beta_hat(1.0 + 1e-12), DomainError);
}

TEST_CASE("pi terms") {
    const Potential p = Potential::logarithmic(1.0, 2.0);
    CHECK(p.pi(0.25) == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(p.pi(0.0) == 0.0);
    CHECK(Potential::quartic().pi(1.0) == -1.0);
    CHECK(Potential::double_obstacle(2.0).pi(0.0) == 0.0);
}

TEST_CASE("beta is odd (log1p form)") {
    const Potential p = Potential::logarithmic(1.7, 3.0);
    testutil::Rng rng(42);
    for (int k = 0; k < 200; ++k) {
        const double r = rng.uniform(-0.999999, 0.999999);
        CHECK(std::abs(p.beta(-r) + p.beta(r)) <= 1e-14);
    }
}

TEST_CASE("beta_hat' = beta and pi_hat' = pi by central differences") {
    const double h = 1e-5;
    for (const Potential& p :
         {Potential::logarithmic(2.0, 4.0), Potential::quartic()}) {
        testutil::Rng rng(7);
        for (int k = 0; k < 300; ++k) {
            const double r = rng.uniform(-0.9, 0.9);
            const double db = (p.beta_hat(r + h) - p.beta_hat(r - h)) / (2 * h);
            CHECK(testutil::near(db, p.beta(r), 1e-6));
            const double dp = (p.pi_hat(r + h) - p.pi_hat(r - h)) / (2 * h);
            CHECK(testutil::near(dp, p.pi(r), 1e-6));
        }
    }
}

TEST_CASE("yosida resolvent matches the bisection oracle") {
    const Potential base = Potential::logarithmic(2.0, 4.0);
    const YosidaApprox y(base, 0.5);

    SUBCASE("r = 0 is a fixed point") {
        const auto [beps, j] = y.eval(0.0);
        CHECK(beps == 0.0);
        CHECK(j == 0.0);
    }

    SUBCASE("spec point eps=0.5, r=0.9") {
        const double j_oracle = bisect_resolvent(base, 0.5, 0.9);
        const auto [beps, j] = y.eval(0.9);
        CHECK(testutil::near(j, j_oracle, 1e-11));
        // root of j + 0.5 ln((1+j)/(1-j)) = 0.9 (theta = 2)
        CHECK(testutil::near(j + 0.5 * std::log((1 + j) / (1 - j)), 0.9, 1e-13));
        CHECK(testutil::near(beps, (0.9 - j_oracle) / 0.5, 1e-10));
    }

    SUBCASE("pointwise convergence at small eps") {
        // leading-order gap beta - beta_eps ~ eps*beta'(r)*beta(r):
        // 0.01 * (2/0.75) * ln 3 = 2.67% of beta, so 3% bounds it
        const YosidaApprox tight(base, 0.01);
        const double exact = base.beta(0.5); // ln 3
        CHECK(std::abs(tight.beta_eps(0.5) - exact) <= 0.03 * exact);
        CHECK(std::abs(tight.beta_eps(0.5) - exact) >= 0.02 * exact);
    }

    SUBCASE("random points against the oracle, both bases") {
        testutil::Rng rng(11);
        for (const Potential& b :
             {Potential::logarithmic(1.0, 2.0), Potential::quartic()}) {
            for (double eps : {0.3, 0.05}) {
                const YosidaApprox ya(b, eps);
                for (int k = 0; k < 50; ++k) {
                    const double r = rng.uniform(-2.0, 2.0);
                    const double j_o = bisect_resolvent(b, eps, r);
                    CHECK(testutil::near(ya.resolvent(r), j_o, 1e-10));
                }
            }
        }
    }
}

TEST_CASE("moreau envelope") {
    const Potential base = Potential::logarithmic(2.0, 4.0);
    const YosidaApprox y(base, 0.5);
    CHECK(y.envelope(0.0) == 0.0);

    // value from the formula with the bisection J
    const double j = bisect_resolvent(base, 0.5, 0.9);
    const double want = 0.5 * (0.9 - j) * (0.9 - j) / 0.5 + base.beta_hat(j);
    CHECK(testutil::near(y.envelope(0.9), want, 1e-9));

    // 0 <= envelope <= beta_hat on the base domain
    testutil::Rng rng(3);
    for (int k = 0; k < 200; ++k) {
        const double r = rng.uniform(-0.999, 0.999);
        const double e = y.envelope(r);
        CHECK(e >= 0.0);
        CHECK(e <= base.beta_hat(r) + 1e-12);
    }

    const YosidaApprox q(Potential::quartic(), 0.1);
    const double e2 = q.envelope(2.0);
    CHECK(std::isfinite(e2));
    CHECK(e2 < 4.0); // beta_hat(2) = 2^4/4
}

TEST_CASE("yosida monotone, Lipschitz, contraction") {
    const Potential base = Potential::logarithmic(1.0, 2.0);
    testutil::Rng rng(19);
    for (double eps : {0.5, 0.1, 0.01}) {
        const YosidaApprox y(base, eps);
        double prev_r = -3.0, prev_b = y.beta_eps(-3.0),
               prev_j = y.resolvent(-3.0);
        for (int k = 0; k < 300; ++k) {
            const double r = prev_r + rng.uniform(1e-4, 0.02);
            const auto [b, j] = y.eval(r);
            CHECK(b >= prev_b - 1e-12);
            CHECK(std::abs(b - prev_b) <= (r - prev_r) / eps + 1e-11);
            CHECK(std::abs(j - prev_j) <= (r - prev_r) + 1e-13);
            CHECK(std::abs(b) <= 1.0 / eps * std::abs(r) + 1e-12);
            prev_r = r;
            prev_b = b;
            prev_j = j;
        }
    }
    // |beta_eps| <= |beta| inside the domain
    const YosidaApprox y(base, 0.05);
    testutil::Rng rng2(23);
    for (int k = 0; k < 300; ++k) {
        const double r = rng2.uniform(-0.999, 0.999);
        CHECK(std::abs(y.beta_eps(r)) <= std::abs(base.beta(r)) + 1e-12);
    }
}

TEST_CASE("yosida rho scaling on the surface graph") {
    const Potential base = Potential::logarithmic(1.0, 2.0);
    const YosidaApprox plain(base, 0.2, 1.0);
    const YosidaApprox scaled(base, 0.1, 2.0);
    // eps*rho identical => identical resolvents; beta_eps scales by 1/rho
    const double r = 0.7;
    CHECK(testutil::near(scaled.resolvent(r), plain.resolvent(r), 1e-13));
    CHECK(testutil::near(scaled.beta_eps(r), plain.beta_eps(r), 1e-10));
}

TEST_CASE("subgradient indicator of [-1,1]") {
    CHECK(subgradient_indicator(0.3, 0.0));
    CHECK(subgradient_indicator(1.0, 2.5));
    CHECK_FALSE(subgradient_indicator(-1.0, 0.1));
    CHECK(subgradient_indicator(-1.0, -42.0));
    CHECK_FALSE(subgradient_indicator(0.0, 0.5));
    CHECK(subgradient_indicator(0.9999999999, 1e6)); // inside the band at +1
    CHECK_THROWS_AS(subgradient_indicator(1.5, 0.0), DomainError);
}

TEST_CASE("coercivity of f0 against shifted arguments") {
    // fit c_m > 0, c'_m >= 0 with f0(r)(r-m) >= c_m|f0(r)| - c'_m, then
    // verify on a fresh, denser sample.
    for (double m = -0.9; m <= 0.9001; m += 0.3) {
        const double c_m = 0.5 * (1.0 - std::abs(m));
        double c_prime = 0.0;
        const int nfit = 4000;
        for (int k = 1; k < nfit; ++k) {
            const double r = -0.999999 + 1.999998 * k / nfit;
            const double f0 = Potential::f0(r);
            c_prime = std::max(c_prime, c_m * std::abs(f0) - f0 * (r - m));
        }
        c_prime = std::max(c_prime, 0.0) + 1e-6;
        CHECK(c_prime < 10.0); // the fitted offset stays bounded
        // verify at the midpoints of the fit grid
        for (int k = 1; k + 1 < nfit; ++k) {
            const double r = -0.999999 + 1.999998 * (k + 0.5) / nfit;
            const double f0 = Potential::f0(r);
            CHECK(f0 * (r - m) >= c_m * std::abs(f0) - c_prime);
        }
    }
}

TEST_CASE("assumption audit on the logarithmic pair") {
    const Potential p = Potential::logarithmic(2.0, 4.0);
    const AssumptionReport rep = validate_assumptions(p, p, 1000);
    CHECK(rep.a1_pass);
    CHECK(rep.varpi_observed == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(rep.a2_pass);
    CHECK(rep.rho_fitted == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(testutil::near(rep.c0_fitted, 0.0, 1e-12));
    CHECK(rep.a3_pass);
    CHECK(rep.pi_lipschitz_bulk == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(rep.a5a_pass);
    CHECK(testutil::near(rep.gamma_sharp, 1.0, 1e-9));
    CHECK(rep.a5b_pass);
    CHECK(testutil::near(rep.kappa_plus, 1.0, 0.05));
    CHECK(testutil::near(rep.kappa_minus, 1.0, 0.05));
}

TEST_CASE("assumption audit rejections") {
    const Potential p = Potential::logarithmic(1.0, 2.0);
    CHECK_THROWS_AS(validate_assumptions(p, p, 50), DomainError);
    CHECK_THROWS_AS(
        validate_assumptions(p, Potential::double_obstacle(1.0), 500),
        KindMismatch);
}
