#include "bsch/stepper.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <algorithm>
#include <cmath>
#include <vector>

#include "bsch/kernels.hpp"

namespace bsch {

void StepperConfig::validate() const {
    if (!(dt > 0.0)) {
        throw DomainError("stepper.dt must be > 0");
    }
    if (!(newton_tol > 0.0)) {
        throw DomainError("stepper.newton_tol must be > 0");
    }
    if (newton_max_iter < 1) {
        throw DomainError("stepper.newton_max_iter must be >= 1");
    }
    if (!(linesearch_shrink > 0.0 && linesearch_shrink < 1.0)) {
        throw DomainError("stepper.linesearch_shrink must lie in (0,1)");
    }
    if (!(separation_guard > 0.0 && separation_guard < 1.0)) {
        throw DomainError("stepper.separation_guard must lie in (0,1)");
    }
}

struct Stepper::Impl {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    bool analyzed = false;
    bool factorized = false;
    Eigen::SparseMatrix<double> last_jacobian;
};

Stepper::Stepper(const Grid& g, const ModelParams& p, const StepperConfig& cfg)
    : grid_(g), params_(p), cfg_(cfg), impl_(std::make_unique<Impl>()) {
    params_.validate();
    cfg_.validate();
    if (params_.potential_bulk.kind() == PotentialKind::DoubleObstacle ||
        params_.potential_surf.kind() == PotentialKind::DoubleObstacle) {
        throw KindMismatch("the stepper needs pointwise beta; the "
                           "double-obstacle kind enters only as a limit");
    }
}

Stepper::~Stepper() = default;
Stepper::Stepper(Stepper&&) noexcept = default;
Stepper& Stepper::operator=(Stepper&&) noexcept = default;

void Stepper::set_dt(double dt) {
    if (!(dt > 0.0)) {
        throw DomainError("stepper.dt must be > 0");
    }
    cfg_.dt = dt;
    impl_->factorized = false;
}

bool Stepper::dirichlet_mode() const { return params_.dirichlet(); }
int Stepper::nbulk() const { return grid_.nx * grid_.ny; }
int Stepper::nsurf() const { return 2 * grid_.nx; }
int Stepper::n_dofs() const { return 2 * nbulk() + 2 * nsurf(); }
int Stepper::dof_phi(int k) const { return k; }
int Stepper::dof_mu(int k) const { return nbulk() + k; }

int Stepper::dof_psi(int m) const {
    if (dirichlet_mode()) {
        // shared with the boundary rows of phi
        const int i = m % grid_.nx;
        const int row = m < grid_.nx ? 0 : grid_.ny - 1;
        return row * grid_.nx + i;
    }
    return 2 * nbulk() + m;
}

int Stepper::dof_theta(int m) const {
    return dirichlet_mode() ? 2 * nbulk() + m : 2 * nbulk() + nsurf() + m;
}

int Stepper::dof_q(int m) const {
    if (!dirichlet_mode()) {
        throw DomainError("flux unknowns exist only for K = 0");
    }
    return 2 * nbulk() + nsurf() + m;
}

Eigen::VectorXd Stepper::pack(const PhaseState& s, const ChemState& c,
                              const SurfField* q) const {
    const int N = nbulk(), M = nsurf(), nx = grid_.nx;
    Eigen::VectorXd x(n_dofs());
    for (int k = 0; k < N; ++k) {
        x[dof_phi(k)] = s.phi.v[k];
        x[dof_mu(k)] = c.mu.v[k];
    }
    for (int m = 0; m < M; ++m) {
        const int i = m % nx;
        const bool top = m >= nx;
        if (!dirichlet_mode()) {
            x[dof_psi(m)] = top ? s.psi.top[i] : s.psi.bottom[i];
        }
        x[dof_theta(m)] = top ? c.theta.top[i] : c.theta.bottom[i];
        if (dirichlet_mode()) {
            x[dof_q(m)] = q ? (top ? q->top[i] : q->bottom[i]) : 0.0;
        }
    }
    return x;
}

void Stepper::unpack(const Eigen::VectorXd& x, PhaseState& s,
                     ChemState& c) const {
    const int N = nbulk(), M = nsurf(), nx = grid_.nx;
    s.phi = BulkField(grid_);
    s.psi = SurfField(grid_);
    c.mu = BulkField(grid_);
    c.theta = SurfField(grid_);
    for (int k = 0; k < N; ++k) {
        s.phi.v[k] = x[dof_phi(k)];
        c.mu.v[k] = x[dof_mu(k)];
    }
    for (int m = 0; m < M; ++m) {
        const int i = m % nx;
        const bool top = m >= nx;
        const double psi = x[dof_psi(m)];
        const double th = x[dof_theta(m)];
        if (top) {
            s.psi.top[i] = psi;
            c.theta.top[i] = th;
        } else {
            s.psi.bottom[i] = psi;
            c.theta.bottom[i] = th;
        }
    }
}

Eigen::VectorXd Stepper::system_residual(const Eigen::VectorXd& x,
                                         const PhaseState& s_old) const {
    const Grid& g = grid_;
    const ModelParams& p = params_;
    const int N = nbulk(), M = nsurf(), nx = g.nx, ny = g.ny;
    const double dt = cfg_.dt;
    const double hy = g.hy();
    const double sig = p.sigma;

    BulkField phi(g), mu(g);
    for (int k = 0; k < N; ++k) {
        phi.v[k] = x[dof_phi(k)];
        mu.v[k] = x[dof_mu(k)];
    }
    SurfField psi(g), theta(g), flux(g);
    for (int m = 0; m < M; ++m) {
        const int i = m % nx;
        const bool top = m >= nx;
        (top ? psi.top[i] : psi.bottom[i]) = x[dof_psi(m)];
        (top ? theta.top[i] : theta.bottom[i]) = x[dof_theta(m)];
        double f;
        if (dirichlet_mode()) {
            f = x[dof_q(m)];
        } else {
            f = (x[dof_psi(m)] - x[dof_phi(top ? (ny - 1) * nx + i : i)]) / p.K;
        }
        (top ? flux.top[i] : flux.bottom[i]) = f;
    }

    BulkField lap_mu(g), lap_phi(g);
    kernels::laplace_bulk(nx, ny, g.hx(), hy, mu.data(), nullptr, nullptr,
                          lap_mu.data());
    kernels::laplace_bulk(nx, ny, g.hx(), hy, phi.data(), flux.bottom.data(),
                          flux.top.data(), lap_phi.data());
    SurfField lap_th(g), lap_psi(g);
    kernels::laplace_ring(nx, g.hx(), theta.bottom.data(), lap_th.bottom.data());
    kernels::laplace_ring(nx, g.hx(), theta.top.data(), lap_th.top.data());
    kernels::laplace_ring(nx, g.hx(), psi.bottom.data(), lap_psi.bottom.data());
    kernels::laplace_ring(nx, g.hx(), psi.top.data(), lap_psi.top.data());

    Eigen::VectorXd r(n_dofs());
    for (int k = 0; k < N; ++k) {
        r[dof_phi(k)] = (phi.v[k] - s_old.phi.v[k]) / dt - lap_mu.v[k];
        r[dof_mu(k)] = mu.v[k] - sig * (phi.v[k] - s_old.phi.v[k]) / dt +
                       lap_phi.v[k] - p.beta_bulk(phi.v[k]) -
                       p.potential_bulk.pi(s_old.phi.v[k]);
    }
    for (int m = 0; m < M; ++m) {
        const int i = m % nx;
        const bool top = m >= nx;
        const double ps = top ? psi.top[i] : psi.bottom[i];
        const double ps_old = top ? s_old.psi.top[i] : s_old.psi.bottom[i];
        const double th = top ? theta.top[i] : theta.bottom[i];
        const double lth = top ? lap_th.top[i] : lap_th.bottom[i];
        const double lps = top ? lap_psi.top[i] : lap_psi.bottom[i];
        const double fl = top ? flux.top[i] : flux.bottom[i];
        const double r3 = (ps - ps_old) / dt - lth;
        const double r4 = th - sig * (ps - ps_old) / dt - fl + lps -
                          p.beta_surf(ps) -
                          p.potential_surf.pi(ps_old);
        if (dirichlet_mode()) {
            // R3 shares its slot with theta; the flux slot carries R4.
            r[dof_theta(m)] = r3;
            r[dof_q(m)] = r4;
        } else {
            r[2 * N + m] = r3;          // psi-evolution row
            r[2 * N + M + m] = r4;      // theta-identity row
        }
    }
    return r;
}

Eigen::SparseMatrix<double> Stepper::system_jacobian(
    const Eigen::VectorXd& x) const {
    const Grid& g = grid_;
    const ModelParams& p = params_;
    const int N = nbulk(), M = nsurf(), nx = g.nx, ny = g.ny;
    const double dt = cfg_.dt;
    const double hx = g.hx(), hy = g.hy();
    const double ihx2 = 1.0 / (hx * hx), ihy2 = 1.0 / (hy * hy);
    const double sig = p.sigma;

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(14) * N + 12 * M);

    auto node = [&](int i, int j) { return j * nx + i; };
    auto xwrap = [&](int i) { return ((i % nx) + nx) % nx; };

    // Stencil of the no-flux bulk Laplacian into (row, column-of-field).
    auto add_laplace = [&](int rowdof, int k, double scale,
                           auto&& coldof) {
        const int j = k / nx, i = k % nx;
        trip.emplace_back(rowdof, coldof(node(xwrap(i + 1), j)), scale * ihx2);
        trip.emplace_back(rowdof, coldof(node(xwrap(i - 1), j)), scale * ihx2);
        trip.emplace_back(rowdof, coldof(k), -2.0 * scale * ihx2);
        if (j == 0) {
            trip.emplace_back(rowdof, coldof(node(i, 1)), 2.0 * scale * ihy2);
            trip.emplace_back(rowdof, coldof(k), -2.0 * scale * ihy2);
        } else if (j == ny - 1) {
            trip.emplace_back(rowdof, coldof(node(i, ny - 2)),
                              2.0 * scale * ihy2);
            trip.emplace_back(rowdof, coldof(k), -2.0 * scale * ihy2);
        } else {
            trip.emplace_back(rowdof, coldof(node(i, j - 1)), scale * ihy2);
            trip.emplace_back(rowdof, coldof(node(i, j + 1)), scale * ihy2);
            trip.emplace_back(rowdof, coldof(k), -2.0 * scale * ihy2);
        }
    };
    auto add_ring_laplace = [&](int rowdof, int m, double scale,
                                auto&& coldof) {
        const int i = m % nx;
        const int base = m - i;
        trip.emplace_back(rowdof, coldof(base + xwrap(i + 1)), scale * ihx2);
        trip.emplace_back(rowdof, coldof(base + xwrap(i - 1)), scale * ihx2);
        trip.emplace_back(rowdof, coldof(m), -2.0 * scale * ihx2);
    };

    auto phi_col = [&](int k) { return dof_phi(k); };
    auto mu_col = [&](int k) { return dof_mu(k); };
    auto psi_col = [&](int m) { return dof_psi(m); };
    auto theta_col = [&](int m) { return dof_theta(m); };

    // R1 rows.
    for (int k = 0; k < N; ++k) {
        trip.emplace_back(dof_phi(k), dof_phi(k), 1.0 / dt);
        add_laplace(dof_phi(k), k, -1.0, mu_col);
    }

    // R2 rows: mu - sigma*dphi/dt + L_K phi - beta(phi) - pi(phi_n).
    for (int k = 0; k < N; ++k) {
        const int row = dof_mu(k);
        trip.emplace_back(row, dof_mu(k), 1.0);
        add_laplace(row, k, 1.0, phi_col);
        trip.emplace_back(row, dof_phi(k),
                          -sig / dt - p.beta_bulk_prime(x[dof_phi(k)]));
        const int j = k / nx, i = k % nx;
        if (j == 0 || j == ny - 1) {
            const int m = (j == 0) ? i : nx + i;
            if (dirichlet_mode()) {
                trip.emplace_back(row, dof_q(m), 2.0 / hy);
            } else {
                // ghost carries (psi - phi)/K
                trip.emplace_back(row, dof_psi(m), (2.0 / hy) / p.K);
                trip.emplace_back(row, dof_phi(k), -(2.0 / hy) / p.K);
            }
        }
    }

    // R3 rows: dpsi/dt - L_G theta.
    for (int m = 0; m < M; ++m) {
        const int row = dirichlet_mode() ? dof_theta(m) : 2 * N + m;
        trip.emplace_back(row, dof_psi(m), 1.0 / dt);
        add_ring_laplace(row, m, -1.0, theta_col);
    }

    // R4 rows: theta - sigma*dpsi/dt - flux + L_G psi - beta_G(psi) - ...
    for (int m = 0; m < M; ++m) {
        const int row = dirichlet_mode() ? dof_q(m) : 2 * N + M + m;
        trip.emplace_back(row, dof_theta(m), 1.0);
        add_ring_laplace(row, m, 1.0, psi_col);
        trip.emplace_back(row, dof_psi(m),
                          -sig / dt - p.beta_surf_prime(x[dof_psi(m)]));
        if (dirichlet_mode()) {
            trip.emplace_back(row, dof_q(m), -1.0);
        } else {
            const int i = m % nx;
            const int k = (m < nx) ? i : (ny - 1) * nx + i;
            trip.emplace_back(row, dof_psi(m), -1.0 / p.K);
            trip.emplace_back(row, dof_phi(k), 1.0 / p.K);
        }
    }

    Eigen::SparseMatrix<double> J(n_dofs(), n_dofs());
    J.setFromTriplets(trip.begin(), trip.end());
    return J;
}

Eigen::VectorXd Stepper::solve_linearized(const Eigen::SparseMatrix<double>& J,
                                          const Eigen::VectorXd& rhs) {
    if (cfg_.linear.kind == LinearSolverConfig::Kind::DirectSparse) {
        if (!impl_->analyzed) {
            impl_->lu.analyzePattern(J);
            impl_->analyzed = true;
        }
        impl_->lu.factorize(J);
        if (impl_->lu.info() != Eigen::Success) {
            throw LinearBreakdown("sparse LU factorisation failed");
        }
        return impl_->lu.solve(rhs);
    }
    Eigen::BiCGSTAB<Eigen::SparseMatrix<double>,
                    Eigen::IncompleteLUT<double>> solver;
    solver.setTolerance(cfg_.linear.tol);
    solver.setMaxIterations(cfg_.linear.max_iter);
    solver.compute(J);
    Eigen::VectorXd out = solver.solve(rhs);
    if (solver.info() != Eigen::Success) {
        throw LinearBreakdown("BiCGStab stagnated at residual " +
                              std::to_string(solver.error()));
    }
    return out;
}

namespace {

double bound_of(const Eigen::VectorXd& x, int nphi) {
    double b = 0.0;
    for (int k = 0; k < nphi; ++k) {
        b = std::max(b, std::abs(x[k]));
    }
    return b;
}

} // namespace

StepResult Stepper::step(const PhaseState& s_old) {
    const Grid& g = grid_;
    const ModelParams& p = params_;
    const int N = nbulk(), M = nsurf();
    const bool guard_active = !p.yosida_active() &&
                              (p.potential_bulk.singular() ||
                               p.potential_surf.singular());

    // K = 0 shares the ring unknowns with the boundary rows; make the old
    // state honour that before it enters any difference quotient.
    const PhaseState s_prev =
        dirichlet_mode() ? with_identified_trace(g, s_old) : s_old;

    StepResult out;
    out.report.dt_used = cfg_.dt;
    out.report.energy_before = energy(g, p, s_prev).total;

    // Initial guess: previous state with its own split chemistry.
    ChemState c0 = assemble_chem_split(g, p, s_prev, s_prev,
                                       p.sigma > 0.0 ? &s_prev : nullptr,
                                       cfg_.dt);
    SurfField q0 = coupling_flux(g, p, s_prev);
    Eigen::VectorXd x = pack(s_prev, c0, &q0);

    auto phase_bound = [&](const Eigen::VectorXd& v) {
        double b = bound_of(v, N);
        if (!dirichlet_mode()) {
            for (int m = 0; m < M; ++m) {
                b = std::max(b, std::abs(v[dof_psi(m)]));
            }
        }
        return b;
    };

    Eigen::VectorXd r = system_residual(x, s_prev);
    double rnorm = r.lpNorm<Eigen::Infinity>();
    bool fresh = false;

    int iter = 0;
    for (; iter < cfg_.newton_max_iter && rnorm > cfg_.newton_tol; ++iter) {
        // The previous factorisation is reused while contraction stays
        // fast; it is refreshed below as soon as it degrades.
        if (!impl_->factorized) {
            impl_->last_jacobian = system_jacobian(x);
            if (cfg_.linear.kind == LinearSolverConfig::Kind::DirectSparse) {
                if (!impl_->analyzed) {
                    impl_->lu.analyzePattern(impl_->last_jacobian);
                    impl_->analyzed = true;
                }
                impl_->lu.factorize(impl_->last_jacobian);
                if (impl_->lu.info() != Eigen::Success) {
                    throw LinearBreakdown("sparse LU factorisation failed");
                }
            }
            impl_->factorized = true;
            fresh = true;
            ++out.report.refactorizations;
        }

        Eigen::VectorXd delta;
        try {
            if (cfg_.linear.kind == LinearSolverConfig::Kind::DirectSparse) {
                delta = impl_->lu.solve(-r);
            } else {
                delta = solve_linearized(impl_->last_jacobian, -r);
            }
        } catch (const LinearBreakdown&) {
            if (fresh) {
                throw NewtonDivergence("linear core broke down on a fresh "
                                       "Jacobian");
            }
            impl_->factorized = false;
            --iter;
            continue;
        }

        // Backtracking on the residual norm plus the separation guard.
        double alpha = 1.0;
        const double allowed =
            cfg_.separation_guard +
            (1.0 - cfg_.separation_guard) * phase_bound(x);
        Eigen::VectorXd x_trial;
        double rnorm_trial = 0.0;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            x_trial = x + alpha * delta;
            if (guard_active && phase_bound(x_trial) > allowed) {
                alpha *= cfg_.linesearch_shrink;
                ++out.report.linesearch_backtracks;
                continue;
            }
            Eigen::VectorXd r_trial = system_residual(x_trial, s_prev);
            rnorm_trial = r_trial.lpNorm<Eigen::Infinity>();
            if (rnorm_trial < rnorm || rnorm_trial <= cfg_.newton_tol) {
                r = std::move(r_trial);
                accepted = true;
                break;
            }
            alpha *= cfg_.linesearch_shrink;
            ++out.report.linesearch_backtracks;
            if (alpha < 1e-14) {
                break;
            }
        }

        if (!accepted) {
            if (guard_active && phase_bound(x + alpha * delta) > allowed) {
                throw SeparationBreach(
                    "Newton trial escaped the separation guard after full "
                    "backtracking");
            }
            if (!fresh) {
                impl_->factorized = false;
                --iter;
                continue;
            }
            throw NewtonDivergence("Newton line search stalled at residual " +
                                   std::to_string(rnorm));
        }

        // Poor contraction with a stale Jacobian: refresh next iteration.
        if (!fresh && (alpha < 1.0 || rnorm_trial > 0.5 * rnorm)) {
            impl_->factorized = false;
        }
        x = std::move(x_trial);
        rnorm = rnorm_trial;
        fresh = false;
    }

    if (rnorm > cfg_.newton_tol) {
        throw NewtonDivergence("Newton used its full budget; residual " +
                               std::to_string(rnorm));
    }

    out.report.newton_iters = iter;
    out.report.final_residual = rnorm;
    unpack(x, out.state, out.chem);
    out.state.t = s_old.t + cfg_.dt;
    out.report.energy_after = energy(g, p, out.state).total;
    return out;
}

} // namespace bsch
