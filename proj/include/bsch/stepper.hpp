#ifndef BSCH_STEPPER_HPP
#define BSCH_STEPPER_HPP

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <memory>

#include "bsch/model.hpp"

namespace bsch {

struct LinearSolverConfig {
    enum class Kind { DirectSparse, BiCGStab };
    Kind kind = Kind::DirectSparse;
    double tol = 1e-10;  // BiCGStab only
    int max_iter = 500;  // BiCGStab only
};

struct StepperConfig {
    double dt = 1e-3;
    double newton_tol = 1e-11; // max-norm of the combined residual
    int newton_max_iter = 50;
    double linesearch_shrink = 0.5;
    // Trial iterates may close the gap to |value| = 1 by at most this
    // fraction per Newton iteration; steps are shrunk, never clamped.
    double separation_guard = 0.9;
    LinearSolverConfig linear;

    void validate() const;
};

struct StepReport {
    int newton_iters = 0;
    double final_residual = 0.0;
    int linesearch_backtracks = 0;
    double energy_before = 0.0;
    double energy_after = 0.0;
    double dt_used = 0.0;
    int refactorizations = 0;
};

struct StepResult {
    PhaseState state;
    ChemState chem;
    StepReport report;
};

// One implicit convex-splitting step of the coupled system, solved by
// damped Newton on the mixed unknowns. The nonlinear system per step:
//
//   (phi - phi_n)/dt = L mu            (no-flux mu ghosts)
//   mu = sigma (phi - phi_n)/dt - L_K phi + beta(phi) + pi(phi_n)
//   (psi - psi_n)/dt = L_G theta
//   theta = sigma (psi - psi_n)/dt + dn(phi) - L_G psi
//           + beta_G(psi) + pi_G(psi_n)
//
// For K > 0 the phi-ghosts carry dn(phi) = (psi - phi|_G)/K and the
// unknowns are (phi, mu, psi, theta). For K = 0 the ring values are the
// boundary rows of phi (one shared unknown per ring node) and the flux
// dn(phi) becomes an explicit unknown q recovered from the bulk stencil,
// giving unknowns (phi, mu, theta, q).
//
// beta implicit / pi explicit makes the energy decrease unconditional;
// bulk and surface quadrature means are preserved exactly by the
// divergence structure.
class Stepper {
  public:
    Stepper(const Grid& g, const ModelParams& p, const StepperConfig& cfg);
    ~Stepper();
    Stepper(Stepper&&) noexcept;
    Stepper& operator=(Stepper&&) noexcept;

    StepResult step(const PhaseState& s_old);

    const StepperConfig& config() const { return cfg_; }
    // Keeps the symbolic analysis, drops the numeric factorisation.
    void set_dt(double dt);

    // --- solver plumbing, exposed for verification ---------------------
    bool dirichlet_mode() const;
    int n_dofs() const;
    int nbulk() const; // N = nx*ny
    int nsurf() const; // M = 2*nx
    int dof_phi(int k) const;
    int dof_mu(int k) const;
    int dof_psi(int m) const;   // K>0: ring unknown; K=0: shared phi row dof
    int dof_theta(int m) const;
    int dof_q(int m) const;     // K=0 only

    Eigen::VectorXd pack(const PhaseState& s, const ChemState& c,
                         const SurfField* q = nullptr) const;
    void unpack(const Eigen::VectorXd& x, PhaseState& s, ChemState& c) const;

    Eigen::VectorXd system_residual(const Eigen::VectorXd& x,
                                    const PhaseState& s_old) const;
    Eigen::SparseMatrix<double> system_jacobian(const Eigen::VectorXd& x) const;
    Eigen::VectorXd solve_linearized(const Eigen::SparseMatrix<double>& J,
                                     const Eigen::VectorXd& rhs);

  private:
    struct Impl;
    Grid grid_;
    ModelParams params_;
    StepperConfig cfg_;
    std::unique_ptr<Impl> impl_;
};

} // namespace bsch

#endif
