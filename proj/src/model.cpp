#include "bsch/model.hpp"

#include <cmath>

#include "bsch/kernels.hpp"

namespace bsch {

void ModelParams::validate() const {
    if (!(K >= 0.0)) {
        throw DomainError("model.K must satisfy K >= 0");
    }
    if (!(sigma >= 0.0)) {
        throw DomainError("model.sigma must satisfy sigma >= 0");
    }
    if (yosida_eps && !(*yosida_eps > 0.0 && *yosida_eps < 1.0)) {
        throw DomainError("model.yosida_eps must lie in (0,1)");
    }
    if (!(yosida_rho >= 1.0)) {
        throw DomainError("model.yosida_rho must be >= 1");
    }
}

double ModelParams::beta_bulk(double r) const {
    if (yosida_active()) {
        return YosidaApprox(potential_bulk, *yosida_eps).beta_eps(r);
    }
    return potential_bulk.beta(r);
}

double ModelParams::beta_surf(double r) const {
    if (yosida_active()) {
        return YosidaApprox(potential_surf, *yosida_eps, yosida_rho).beta_eps(r);
    }
    return potential_surf.beta(r);
}

double ModelParams::beta_bulk_prime(double r) const {
    if (yosida_active()) {
        return YosidaApprox(potential_bulk, *yosida_eps).beta_eps_prime(r);
    }
    return potential_bulk.beta_prime(r);
}

double ModelParams::beta_surf_prime(double r) const {
    if (yosida_active()) {
        return YosidaApprox(potential_surf, *yosida_eps, yosida_rho)
            .beta_eps_prime(r);
    }
    return potential_surf.beta_prime(r);
}

double ModelParams::beta_hat_bulk(double r) const {
    if (yosida_active()) {
        return YosidaApprox(potential_bulk, *yosida_eps).envelope(r);
    }
    return potential_bulk.beta_hat(r);
}

double ModelParams::beta_hat_surf(double r) const {
    if (yosida_active()) {
        return YosidaApprox(potential_surf, *yosida_eps, yosida_rho).envelope(r);
    }
    return potential_surf.beta_hat(r);
}

namespace {

void require_state(const Grid& g, const PhaseState& s) {
    require_match(g, s.phi);
    require_match(g, s.psi);
}

} // namespace

EnergyBreakdown energy(const Grid& g, const ModelParams& p,
                       const PhaseState& s) {
    require_state(g, s);
    EnergyBreakdown e;
    e.bulk_dirichlet = dirichlet_energy_bulk(g, s.phi);
    e.surf_dirichlet = dirichlet_energy_surface(g, s.psi);

    BulkField fphi(g);
    const std::size_t n = s.phi.size();
    for (std::size_t k = 0; k < n; ++k) {
        const double r = s.phi.v[k];
        fphi.v[k] = p.beta_hat_bulk(r) + p.potential_bulk.pi_hat(r);
    }
    e.bulk_potential = integrate_bulk(g, fphi);

    SurfField gpsi(g);
    for (int i = 0; i < g.nx; ++i) {
        gpsi.bottom[i] = p.beta_hat_surf(s.psi.bottom[i]) +
                         p.potential_surf.pi_hat(s.psi.bottom[i]);
        gpsi.top[i] = p.beta_hat_surf(s.psi.top[i]) +
                      p.potential_surf.pi_hat(s.psi.top[i]);
    }
    e.surf_potential = integrate_surface(g, gpsi);

    if (p.K > 0.0) {
        SurfField mism(g);
        const std::size_t off = static_cast<std::size_t>(g.ny - 1) * g.nx;
        for (int i = 0; i < g.nx; ++i) {
            const double db = s.psi.bottom[i] - s.phi.v[i];
            const double dt_ = s.psi.top[i] - s.phi.v[off + i];
            mism.bottom[i] = db * db;
            mism.top[i] = dt_ * dt_;
        }
        e.penalty = 0.5 * p.chi() * integrate_surface(g, mism);
    } else {
        e.penalty = 0.0;
    }

    e.total = e.bulk_dirichlet + e.bulk_potential + e.surf_dirichlet +
              e.surf_potential + e.penalty;
    return e;
}

PhaseState with_identified_trace(const Grid& g, const PhaseState& s) {
    require_state(g, s);
    PhaseState out = s;
    const std::size_t off = static_cast<std::size_t>(g.ny - 1) * g.nx;
    for (int i = 0; i < g.nx; ++i) {
        out.phi.v[i] = s.psi.bottom[i];
        out.phi.v[off + i] = s.psi.top[i];
    }
    return out;
}

SurfField coupling_flux(const Grid& g, const ModelParams& p,
                        const PhaseState& s) {
    require_state(g, s);
    if (p.K > 0.0) {
        SurfField flux(g);
        const std::size_t off = static_cast<std::size_t>(g.ny - 1) * g.nx;
        for (int i = 0; i < g.nx; ++i) {
            flux.bottom[i] = (s.psi.bottom[i] - s.phi.v[i]) / p.K;
            flux.top[i] = (s.psi.top[i] - s.phi.v[off + i]) / p.K;
        }
        return flux;
    }
    return normal_derivative(g, with_identified_trace(g, s).phi);
}

ChemState assemble_chem_split(const Grid& g, const ModelParams& p,
                              const PhaseState& s_beta,
                              const PhaseState& s_pi,
                              const PhaseState* s_visc, double dt) {
    require_state(g, s_beta);
    require_state(g, s_pi);
    if (p.sigma > 0.0) {
        if (!s_visc || !(dt > 0.0)) {
            throw MissingPrev("sigma > 0 requires the previous state and dt");
        }
        require_state(g, *s_visc);
    }

    const PhaseState work =
        p.dirichlet() ? with_identified_trace(g, s_beta) : s_beta;
    const SurfField flux = coupling_flux(g, p, s_beta);
    const BulkField lap = laplace_bulk(g, work.phi, &flux);
    const SurfField lap_psi = laplace_surface(g, s_beta.psi);

    ChemState c(g);
    const std::size_t n = work.phi.size();
    for (std::size_t k = 0; k < n; ++k) {
        double m = -lap.v[k] + p.beta_bulk(work.phi.v[k]) +
                   p.potential_bulk.pi(s_pi.phi.v[k]);
        if (p.sigma > 0.0) {
            m += p.sigma * (work.phi.v[k] - s_visc->phi.v[k]) / dt;
        }
        c.mu.v[k] = m;
    }
    for (int i = 0; i < g.nx; ++i) {
        double tb = flux.bottom[i] - lap_psi.bottom[i] +
                    p.beta_surf(s_beta.psi.bottom[i]) +
                    p.potential_surf.pi(s_pi.psi.bottom[i]);
        double tt = flux.top[i] - lap_psi.top[i] +
                    p.beta_surf(s_beta.psi.top[i]) +
                    p.potential_surf.pi(s_pi.psi.top[i]);
        if (p.sigma > 0.0) {
            tb += p.sigma * (s_beta.psi.bottom[i] - s_visc->psi.bottom[i]) / dt;
            tt += p.sigma * (s_beta.psi.top[i] - s_visc->psi.top[i]) / dt;
        }
        c.theta.bottom[i] = tb;
        c.theta.top[i] = tt;
    }
    return c;
}

ChemState chemical_potentials(const Grid& g, const ModelParams& p,
                              const PhaseState& s, const PhaseState* s_prev,
                              double dt) {
    return assemble_chem_split(g, p, s, s, s_prev, dt);
}

SystemResidual residual(const Grid& g, const ModelParams& p,
                        const PhaseState& s_new, const PhaseState& s_old,
                        double dt) {
    if (!(dt > 0.0)) {
        throw DomainError("residual requires dt > 0");
    }
    SystemResidual r{BulkField(g), SurfField(g),
                     assemble_chem_split(g, p, s_new, s_old, &s_old, dt)};
    const BulkField lap_mu = laplace_bulk(g, r.chem.mu, nullptr);
    const SurfField lap_th = laplace_surface(g, r.chem.theta);
    const std::size_t n = s_new.phi.size();
    for (std::size_t k = 0; k < n; ++k) {
        r.r_phi.v[k] = (s_new.phi.v[k] - s_old.phi.v[k]) / dt - lap_mu.v[k];
    }
    for (int i = 0; i < g.nx; ++i) {
        r.r_psi.bottom[i] =
            (s_new.psi.bottom[i] - s_old.psi.bottom[i]) / dt - lap_th.bottom[i];
        r.r_psi.top[i] =
            (s_new.psi.top[i] - s_old.psi.top[i]) / dt - lap_th.top[i];
    }
    return r;
}

} // namespace bsch
