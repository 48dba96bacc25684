#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bsch/model.hpp"
#include "test_util.hpp"

using namespace bsch;

namespace {

ModelParams log_params(double K, double sigma = 0.0) {
    ModelParams p;
    p.K = K;
    p.sigma = sigma;
    p.potential_bulk = Potential::logarithmic(1.0, 2.0);
    p.potential_surf = Potential::logarithmic(1.0, 2.0);
    return p;
}

PhaseState random_state(const Grid& g, std::uint64_t seed, double amp) {
    testutil::Rng rng(seed);
    PhaseState s(g);
    for (auto& x : s.phi.v) x = rng.uniform(-amp, amp);
    for (auto& x : s.psi.bottom) x = rng.uniform(-amp, amp);
    for (auto& x : s.psi.top) x = rng.uniform(-amp, amp);
    return s;
}

// Brute-force quadrature of the five energy terms, naive loops all the way.
EnergyBreakdown dense_energy(const Grid& g, const ModelParams& p,
                             const PhaseState& s) {
    EnergyBreakdown e;
    const double hx = g.hx(), hy = g.hy();
    auto wy = [&](int j) { return (j == 0 || j == g.ny - 1) ? 0.5 * hy : hy; };
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double dx = s.phi.at((i + 1) % g.nx, j) - s.phi.at(i, j);
            e.bulk_dirichlet += 0.5 * wy(j) / hx * dx * dx;
            if (j + 1 < g.ny) {
                const double dy = s.phi.at(i, j + 1) - s.phi.at(i, j);
                e.bulk_dirichlet += 0.5 * hx / hy * dy * dy;
            }
            e.bulk_potential +=
                hx * wy(j) *
                (p.beta_hat_bulk(s.phi.at(i, j)) +
                 p.potential_bulk.pi_hat(s.phi.at(i, j)));
        }
    }
    for (int i = 0; i < g.nx; ++i) {
        for (const auto* ring : {&s.psi.bottom, &s.psi.top}) {
            const double d = (*ring)[(i + 1) % g.nx] - (*ring)[i];
            e.surf_dirichlet += 0.5 / hx * d * d;
            e.surf_potential +=
                hx * (p.beta_hat_surf((*ring)[i]) +
                      p.potential_surf.pi_hat((*ring)[i]));
        }
        if (p.K > 0.0) {
            const double db = s.psi.bottom[i] - s.phi.at(i, 0);
            const double dt = s.psi.top[i] - s.phi.at(i, g.ny - 1);
            e.penalty += 0.5 / p.K * hx * (db * db + dt * dt);
        }
    }
    e.total = e.bulk_dirichlet + e.bulk_potential + e.surf_dirichlet +
              e.surf_potential + e.penalty;
    return e;
}

// Independent dense assembly of (mu, theta) for K > 0, sigma optional.
ChemState dense_chem(const Grid& g, const ModelParams& p, const PhaseState& s,
                     const PhaseState* prev, double dt) {
    const double hx = g.hx(), hy = g.hy();
    ChemState c(g);
    auto phi = [&](int i, int j) {
        return s.phi.at(((i % g.nx) + g.nx) % g.nx, j);
    };
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            double below, above;
            if (j == 0) {
                below = phi(i, 1) +
                        2.0 * hy * (s.psi.bottom[i] - phi(i, 0)) / p.K;
            } else {
                below = phi(i, j - 1);
            }
            if (j == g.ny - 1) {
                above = phi(i, g.ny - 2) +
                        2.0 * hy * (s.psi.top[i] - phi(i, g.ny - 1)) / p.K;
            } else {
                above = phi(i, j + 1);
            }
            const double lap =
                (phi(i + 1, j) - 2.0 * phi(i, j) + phi(i - 1, j)) / (hx * hx) +
                (above - 2.0 * phi(i, j) + below) / (hy * hy);
            double m = -lap + p.beta_bulk(phi(i, j)) +
                       p.potential_bulk.pi(phi(i, j));
            if (p.sigma > 0.0) {
                m += p.sigma * (phi(i, j) - prev->phi.at(i, j)) / dt;
            }
            c.mu.at(i, j) = m;
        }
    }
    for (int i = 0; i < g.nx; ++i) {
        for (int ring = 0; ring < 2; ++ring) {
            const auto& ps = ring == 0 ? s.psi.bottom : s.psi.top;
            const double tr = ring == 0 ? phi(i, 0) : phi(i, g.ny - 1);
            const double lap =
                (ps[(i + 1) % g.nx] - 2.0 * ps[i] + ps[(i + g.nx - 1) % g.nx]) /
                (hx * hx);
            double th = (ps[i] - tr) / p.K - lap + p.beta_surf(ps[i]) +
                        p.potential_surf.pi(ps[i]);
            if (p.sigma > 0.0) {
                const auto& pp = ring == 0 ? prev->psi.bottom : prev->psi.top;
                th += p.sigma * (ps[i] - pp[i]) / dt;
            }
            (ring == 0 ? c.theta.bottom : c.theta.top)[i] = th;
        }
    }
    return c;
}

double quad_dot_bulk(const Grid& g, const BulkField& a, const BulkField& b) {
    double s = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            s += g.bulk_weight(j) * a.at(i, j) * b.at(i, j);
        }
    }
    return s;
}

double dot_surf(const Grid& g, const SurfField& a, const SurfField& b) {
    double s = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        s += g.surf_weight() *
             (a.bottom[i] * b.bottom[i] + a.top[i] * b.top[i]);
    }
    return s;
}

} // namespace

TEST_CASE("energy of constant states") {
    const Grid g(8, 6, 2.0, 1.0);
    for (double K : {0.0, 0.5, 3.0}) {
        const ModelParams p = log_params(K);
        const double m = 0.3;
        PhaseState s(g, m);
        const EnergyBreakdown e = energy(g, p, s);
        CHECK(e.bulk_dirichlet == 0.0);
        CHECK(e.surf_dirichlet == 0.0);
        CHECK(testutil::near(e.penalty, 0.0, 1e-15));
        const double F = p.potential_bulk.f(m);
        CHECK(testutil::near(e.total, g.lx * g.ly * F + 2.0 * g.lx * F,
                             1e-12));
    }
}

TEST_CASE("K=0 leaves the penalty at zero regardless of trace mismatch") {
    const Grid g(8, 4, 1.0, 1.0);
    const ModelParams p = log_params(0.0);
    PhaseState s = random_state(g, 2, 0.5); // psi unrelated to phi trace
    const EnergyBreakdown e = energy(g, p, s);
    CHECK(e.penalty == 0.0);
    CHECK(testutil::near(e.total,
                         e.bulk_dirichlet + e.bulk_potential +
                             e.surf_dirichlet + e.surf_potential,
                         1e-12));
}

TEST_CASE("energy matches the brute-force quadrature oracle") {
    const Grid g(8, 8, 2.0, 1.0);
    for (double K : {0.0, 2.0}) {
        const ModelParams p = log_params(K);
        const PhaseState s = random_state(g, 77, 0.7);
        const EnergyBreakdown a = energy(g, p, s);
        const EnergyBreakdown b = dense_energy(g, p, s);
        CHECK(testutil::near(a.bulk_dirichlet, b.bulk_dirichlet, 1e-12));
        CHECK(testutil::near(a.bulk_potential, b.bulk_potential, 1e-12));
        CHECK(testutil::near(a.surf_dirichlet, b.surf_dirichlet, 1e-12));
        CHECK(testutil::near(a.surf_potential, b.surf_potential, 1e-12));
        CHECK(testutil::near(a.penalty, b.penalty, 1e-12));
        CHECK(testutil::near(a.total, b.total, 1e-12));
        CHECK(a.penalty >= 0.0);
    }
}

TEST_CASE("energy guards the singular domain") {
    const Grid g(8, 4, 1.0, 1.0);
    const ModelParams p = log_params(1.0);
    PhaseState s(g, 0.0);
    s.phi.at(3, 2) = 1.0;
    CHECK_THROWS_AS(energy(g, p, s), DomainError);
    ModelParams py = p;
    py.yosida_eps = 0.1;
    CHECK_NOTHROW(energy(g, py, s));
}

TEST_CASE("chemistry of constant states") {
    const Grid g(8, 6, 2.0, 1.0);
    const ModelParams p = log_params(1.5);
    const double m = 0.25;
    PhaseState s(g, m);
    const ChemState c = chemical_potentials(g, p, s);
    const double want_mu = p.potential_bulk.f_prime(m);
    const double want_th = p.potential_surf.f_prime(m);
    for (double v : c.mu.v) CHECK(testutil::near(v, want_mu, 1e-13));
    for (int i = 0; i < g.nx; ++i) {
        CHECK(testutil::near(c.theta.bottom[i], want_th, 1e-13));
        CHECK(testutil::near(c.theta.top[i], want_th, 1e-13));
    }
}

TEST_CASE("Robin exchange term by direct substitution") {
    // K=2, phi trace 0.1, psi 0.3: dn(phi) = (0.3-0.1)/2 = 0.1 per node
    const Grid g(8, 5, 1.0, 1.0);
    const ModelParams p = log_params(2.0);
    PhaseState s(g, 0.1);
    for (int i = 0; i < g.nx; ++i) {
        s.psi.bottom[i] = 0.3;
        s.psi.top[i] = 0.3;
    }
    const SurfField flux = coupling_flux(g, p, s);
    for (int i = 0; i < g.nx; ++i) {
        CHECK(testutil::near(flux.bottom[i], 0.1, 1e-15));
        CHECK(testutil::near(flux.top[i], 0.1, 1e-15));
    }
    const ChemState c = chemical_potentials(g, p, s);
    const double want_th = 0.1 + p.potential_surf.f_prime(0.3);
    for (int i = 0; i < g.nx; ++i) {
        CHECK(testutil::near(c.theta.bottom[i], want_th, 1e-13));
    }
}

TEST_CASE("chemistry matches the dense oracle (K>0, with and without sigma)") {
    const Grid g(6, 4, 1.0, 0.75);
    for (double sigma : {0.0, 0.1}) {
        ModelParams p = log_params(1.7, sigma);
        const PhaseState s = random_state(g, 5, 0.6);
        const PhaseState prev = random_state(g, 6, 0.6);
        const double dt = 1e-2;
        const ChemState a =
            chemical_potentials(g, p, s, sigma > 0 ? &prev : nullptr, dt);
        const ChemState b = dense_chem(g, p, s, &prev, dt);
        for (std::size_t k = 0; k < a.mu.size(); ++k) {
            CHECK(testutil::near(a.mu.v[k], b.mu.v[k], 1e-12));
        }
        for (int i = 0; i < g.nx; ++i) {
            CHECK(testutil::near(a.theta.bottom[i], b.theta.bottom[i], 1e-12));
            CHECK(testutil::near(a.theta.top[i], b.theta.top[i], 1e-12));
        }
    }
}

TEST_CASE("sigma > 0 without the previous state raises") {
    const Grid g(8, 4, 1.0, 1.0);
    const ModelParams p = log_params(1.0, 0.2);
    const PhaseState s = random_state(g, 3, 0.3);
    CHECK_THROWS_AS(chemical_potentials(g, p, s), MissingPrev);
}

TEST_CASE("K=0 trace identification") {
    const Grid g(8, 4, 1.0, 1.0);
    const PhaseState s = random_state(g, 9, 0.5);
    const PhaseState w = with_identified_trace(g, s);
    for (int i = 0; i < g.nx; ++i) {
        CHECK(w.phi.at(i, 0) == s.psi.bottom[i]);
        CHECK(w.phi.at(i, g.ny - 1) == s.psi.top[i]);
    }
    for (int j = 1; j < g.ny - 1; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            CHECK(w.phi.at(i, j) == s.phi.at(i, j));
        }
    }
}

TEST_CASE("adding a constant to mu leaves its laplacian unchanged") {
    const Grid g(8, 6, 1.0, 1.0);
    BulkField mu = random_state(g, 33, 1.0).phi;
    BulkField shifted = mu;
    for (auto& x : shifted.v) x += 17.5;
    const BulkField a = laplace_bulk(g, mu);
    const BulkField b = laplace_bulk(g, shifted);
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(testutil::near(a.v[k], b.v[k], 1e-9));
    }
}

TEST_CASE("variational consistency: (mu,theta) is the discrete gradient") {
    const Grid g(8, 6, 1.0, 1.0);
    for (double K : {0.0, 1.0}) {
        const ModelParams p = log_params(K);
        // large amplitudes keep the cubic FD term above roundoff noise
        PhaseState s = random_state(g, 21, 0.8);
        if (p.dirichlet()) {
            s = with_identified_trace(g, s);
        }
        const ChemState c = chemical_potentials(g, p, s);

        // perturbation pair; for K=0 the trace of dphi is dpsi
        PhaseState d = random_state(g, 22, 1.0);
        if (p.dirichlet()) {
            d = with_identified_trace(g, d);
        }

        const double gdot =
            quad_dot_bulk(g, c.mu, d.phi) + dot_surf(g, c.theta, d.psi);

        double err[2];
        const double hs[2] = {1e-3, 1e-4};
        for (int hi = 0; hi < 2; ++hi) {
            const double h = hs[hi];
            PhaseState plus = s, minus = s;
            for (std::size_t k = 0; k < s.phi.size(); ++k) {
                plus.phi.v[k] += h * d.phi.v[k];
                minus.phi.v[k] -= h * d.phi.v[k];
            }
            for (int i = 0; i < g.nx; ++i) {
                plus.psi.bottom[i] += h * d.psi.bottom[i];
                plus.psi.top[i] += h * d.psi.top[i];
                minus.psi.bottom[i] -= h * d.psi.bottom[i];
                minus.psi.top[i] -= h * d.psi.top[i];
            }
            const double fd =
                (energy(g, p, plus).total - energy(g, p, minus).total) /
                (2.0 * h);
            err[hi] = std::abs(fd - gdot);
        }
        const double order = std::log10(err[0] / err[1]);
        INFO("K=", K, " err(1e-3)=", err[0], " err(1e-4)=", err[1]);
        CHECK(order >= 1.9);
    }
}

TEST_CASE("residual: stationarity, mass compatibility, dense oracle") {
    const Grid g(6, 4, 1.0, 1.0);
    const ModelParams p = log_params(1.0);

    PhaseState c(g, 0.2);
    const SystemResidual r0 = residual(g, p, c, c, 1e-3);
    for (double v : r0.r_phi.v) CHECK(testutil::near(v, 0.0, 1e-12));
    for (int i = 0; i < g.nx; ++i) {
        CHECK(testutil::near(r0.r_psi.bottom[i], 0.0, 1e-12));
        CHECK(testutil::near(r0.r_psi.top[i], 0.0, 1e-12));
    }

    // <r_phi, 1> = (mass_new - mass_old)/dt: the laplacian contributes 0
    const PhaseState a = random_state(g, 41, 0.6);
    PhaseState b = random_state(g, 42, 0.6);
    const double dt = 1e-2;
    const SystemResidual r1 = residual(g, p, b, a, dt);
    double total = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            total += g.bulk_weight(j) * r1.r_phi.at(i, j);
        }
    }
    const double want =
        (integrate_bulk(g, b.phi) - integrate_bulk(g, a.phi)) / dt;
    CHECK(testutil::near(total, want, 1e-11));

    // mean-matched pair: the weighted sum vanishes
    const double shift =
        (mean_bulk(g, b.phi) - mean_bulk(g, a.phi));
    for (auto& x : b.phi.v) x -= shift;
    const SystemResidual r2 = residual(g, p, b, a, dt);
    double total2 = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            total2 += g.bulk_weight(j) * r2.r_phi.at(i, j);
        }
    }
    CHECK(std::abs(total2) <= 1e-13 / dt);

    // dense oracle of the full residual (split chemistry at (b;a))
    const ChemState chem_o = dense_chem(g, [&] {
        ModelParams q = p;
        return q;
    }(), b, &a, dt);
    // replace the pi arguments by the old state, as the split demands
    ChemState split = chem_o;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            split.mu.at(i, j) += p.potential_bulk.pi(a.phi.at(i, j)) -
                                 p.potential_bulk.pi(b.phi.at(i, j));
        }
    }
    for (int i = 0; i < g.nx; ++i) {
        split.theta.bottom[i] += p.potential_surf.pi(a.psi.bottom[i]) -
                                 p.potential_surf.pi(b.psi.bottom[i]);
        split.theta.top[i] +=
            p.potential_surf.pi(a.psi.top[i]) - p.potential_surf.pi(b.psi.top[i]);
    }
    for (std::size_t k = 0; k < split.mu.size(); ++k) {
        CHECK(testutil::near(r2.chem.mu.v[k], split.mu.v[k], 1e-11));
    }
}
