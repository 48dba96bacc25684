#ifndef BSCH_DIAGNOSTICS_HPP
#define BSCH_DIAGNOSTICS_HPP

#include <optional>
#include <string>
#include <vector>

#include "bsch/model.hpp"
#include "bsch/stepper.hpp"

namespace bsch {

// One row of the time series: conservation, energy split, dissipation
// integrand, separation margins and chemical-potential statistics.
struct TimeSeriesRecord {
    double t = 0.0;
    double mass_bulk = 0.0;
    double mass_surf = 0.0;
    double energy_total = 0.0;
    double e_bulk_dir = 0.0;
    double e_bulk_pot = 0.0;
    double e_surf_dir = 0.0;
    double e_surf_pot = 0.0;
    double e_penalty = 0.0;
    double grad_mu_sq = 0.0;    // |grad mu|^2 by quadrature
    double grad_theta_sq = 0.0; // |grad_G theta|^2
    double sep_bulk = 0.0;      // 1 - max|phi|
    double sep_surf = 0.0;      // 1 - max|psi|
    double mu_mean = 0.0;
    double mu_std = 0.0;
    double theta_mean = 0.0;
    double theta_std = 0.0;
    int newton_iters = 0;
};

inline constexpr const char* series_csv_header =
    "t,mass_bulk,mass_surf,energy,e_bulk_dir,e_bulk_pot,e_surf_dir,"
    "e_surf_pot,e_penalty,grad_mu_sq,grad_theta_sq,sep_bulk,sep_surf,"
    "mu_mean,mu_std,theta_mean,theta_std,newton_iters";

TimeSeriesRecord record(const Grid& g, const ModelParams& p,
                        const PhaseState& s, const ChemState& c,
                        const StepReport& rpt);

// Full-precision comma-separated row (no trailing newline).
std::string to_csv_row(const TimeSeriesRecord& r);

// L2 and H1 readouts (quadrature mass + twice the Dirichlet forms).
double norm_l2_bulk(const Grid& g, const BulkField& u);
double norm_l2_surface(const Grid& g, const SurfField& v);
double l2_distance(const Grid& g, const PhaseState& a, const PhaseState& b);
double h1_distance(const Grid& g, const PhaseState& a, const PhaseState& b);

struct SteadyStateReport {
    bool converged = false;
    double t_detect = 0.0;
    double rate = 0.0; // max-norm state change per unit time
    double mu_inf_measured = 0.0;
    double theta_inf_measured = 0.0;
    double mu_inf_formula = 0.0;
    double theta_inf_formula = 0.0;
    double mu_stddev = 0.0;
    double theta_stddev = 0.0;
    std::optional<double> fitted_rate_exponent;
};

// Steady when ||s - s_prev||_inf / dt falls under tol_rate; then the
// stationary constants are evaluated both ways:
//   mu_inf    = |Omega|^-1 [ int (beta+pi)(phi)  - int_G dn(phi) ],
//   theta_inf = |Gamma|^-1   int_G (dn(phi) + beta_G(psi) + pi_G(psi)),
// against the measured spatial means of (mu, theta).
SteadyStateReport detect_steady(const Grid& g, const ModelParams& p,
                                const std::vector<TimeSeriesRecord>& history,
                                const PhaseState& current,
                                const PhaseState& previous, double dt,
                                double tol_rate = 1e-8);

// Decay-law fit of the H1 distance to the terminal state over saved
// snapshots. Algebraic branch fits log d against log(1+t); if a plain
// exponential fits better the exponent reports +infinity and `rate`
// carries the e-folding rate.
struct RateFit {
    bool exponential = false;
    double exponent = 0.0; // +inf sentinel on the exponential branch
    double rate = 0.0;     // exponential rate when on that branch
};

RateFit fit_rate(const Grid& g,
                 const std::vector<std::pair<double, PhaseState>>& snapshots,
                 const PhaseState& s_inf);

// Per-step residuals of the discrete energy identity on a uniform-dt
// segment of per-step records:
//   E(t_{n+1}) - E(t_n) + dt*(grad_mu_sq + grad_theta_sq)_{n+1}.
std::vector<double> dissipation_residual(
    const std::vector<TimeSeriesRecord>& history);

} // namespace bsch

#endif
