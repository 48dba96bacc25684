#ifndef BSCH_MODEL_HPP
#define BSCH_MODEL_HPP

#include <optional>

#include "bsch/grid.hpp"
#include "bsch/potentials.hpp"

namespace bsch {

// Coupled bulk-surface model parameters. K >= 0 is the transmission
// parameter: K > 0 imposes the Robin condition K*dn(phi) = psi - phi
// through boundary ghosts, K = 0 identifies the trace of phi with psi.
// sigma >= 0 adds viscous terms sigma*d_t(phi), sigma*d_t(psi) to the
// chemical potentials. An active yosida_eps replaces the singular beta
// by its Lipschitz regularisation (rho scales the surface resolvent).
struct ModelParams {
    double K = 1.0;
    double sigma = 0.0;
    Potential potential_bulk = Potential::logarithmic(1.0, 2.0);
    Potential potential_surf = Potential::logarithmic(1.0, 2.0);
    std::optional<double> yosida_eps;
    double yosida_rho = 1.0;

    void validate() const;
    bool dirichlet() const { return K == 0.0; }
    double chi() const { return K == 0.0 ? 0.0 : 1.0 / K; }
    bool yosida_active() const { return yosida_eps.has_value(); }

    // Convex-part evaluations dispatching exact beta vs beta_eps.
    double beta_bulk(double r) const;
    double beta_surf(double r) const;
    double beta_bulk_prime(double r) const;
    double beta_surf_prime(double r) const;
    double beta_hat_bulk(double r) const;
    double beta_hat_surf(double r) const;
};

// The pair (phi, psi) at time t.
struct PhaseState {
    PhaseState() = default;
    PhaseState(const Grid& g, double fill = 0.0)
        : phi(g, fill), psi(g, fill) {}
    BulkField phi;
    SurfField psi;
    double t = 0.0;
};

// The pair (mu, theta).
struct ChemState {
    ChemState() = default;
    explicit ChemState(const Grid& g) : mu(g), theta(g) {}
    BulkField mu;
    SurfField theta;
};

// The five additive terms of the free energy.
struct EnergyBreakdown {
    double bulk_dirichlet = 0.0;
    double bulk_potential = 0.0;
    double surf_dirichlet = 0.0;
    double surf_potential = 0.0;
    double penalty = 0.0;
    double total = 0.0;
};

// E = 1/2 int |grad phi|^2 + int F(phi) + 1/2 int_G |grad_G psi|^2
//   + int_G G(psi) + chi(K)/2 int_G |psi - phi|^2, by quadrature. The
// penalty pairs psi with the raw boundary-row values of phi.
EnergyBreakdown energy(const Grid& g, const ModelParams& p,
                       const PhaseState& s);

// The discrete normal derivative entering the theta equation and the
// boundary ghosts of -laplace(phi): (psi - phi|_G)/K for K > 0; for K = 0
// the one-sided stencil applied after trace identification.
SurfField coupling_flux(const Grid& g, const ModelParams& p,
                        const PhaseState& s);

// Copy of s with the boundary rows of phi overwritten by psi (the K = 0
// transmission).
PhaseState with_identified_trace(const Grid& g, const PhaseState& s);

// mu = sigma*(phi - phi_prev)/dt - laplace(phi) + beta(phi) + pi(phi),
// theta = sigma*(psi - psi_prev)/dt + dn(phi) - laplace_G(psi)
//         + beta_G(psi) + pi_G(psi),
// with the coupling flux as the phi-ghost. sigma > 0 requires s_prev+dt.
ChemState chemical_potentials(const Grid& g, const ModelParams& p,
                              const PhaseState& s,
                              const PhaseState* s_prev = nullptr,
                              double dt = 0.0);

// Same assembly with the convex-splitting argument mix: beta terms at
// s_beta, pi terms at s_pi, viscous difference s_beta - s_visc.
ChemState assemble_chem_split(const Grid& g, const ModelParams& p,
                              const PhaseState& s_beta,
                              const PhaseState& s_pi,
                              const PhaseState* s_visc, double dt);

// Time-discrete residual of the weak system under the convex split
// (beta at s_new, pi at s_old):
//   r_phi = (phi_new - phi_old)/dt - laplace(mu),   no-flux mu ghosts,
//   r_psi = (psi_new - psi_old)/dt - laplace_G(theta).
struct SystemResidual {
    BulkField r_phi;
    SurfField r_psi;
    ChemState chem;
};

SystemResidual residual(const Grid& g, const ModelParams& p,
                        const PhaseState& s_new, const PhaseState& s_old,
                        double dt);

} // namespace bsch

#endif
