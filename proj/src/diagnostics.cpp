#include "bsch/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "bsch/kernels.hpp"

namespace bsch {

namespace {

double bulk_std(const Grid& g, const BulkField& u, double mean) {
    BulkField d(g);
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double e = u.v[k] - mean;
        d.v[k] = e * e;
    }
    return std::sqrt(integrate_bulk(g, d) / g.bulk_measure());
}

double surf_std(const Grid& g, const SurfField& v, double mean) {
    SurfField d(g);
    for (int i = 0; i < g.nx; ++i) {
        const double eb = v.bottom[i] - mean;
        const double et = v.top[i] - mean;
        d.bottom[i] = eb * eb;
        d.top[i] = et * et;
    }
    return std::sqrt(integrate_surface(g, d) / g.surf_measure());
}

void append_g17(std::string& s, double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    s += buf;
}

std::pair<double, double> fit_line(const std::vector<double>& x,
                                   const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    const double b = (n * sxy - sx * sy) / denom;
    const double a = (sy - b * sx) / n;
    return {a, b};
}

double fit_residual(const std::vector<double>& x, const std::vector<double>& y,
                    double a, double b) {
    double r = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (a + b * x[i]);
        r += e * e;
    }
    return r;
}

} // namespace

TimeSeriesRecord record(const Grid& g, const ModelParams& p,
                        const PhaseState& s, const ChemState& c,
                        const StepReport& rpt) {
    TimeSeriesRecord r;
    r.t = s.t;
    r.mass_bulk = mean_bulk(g, s.phi);
    r.mass_surf = mean_surface(g, s.psi);

    const EnergyBreakdown e = energy(g, p, s);
    r.energy_total = e.total;
    r.e_bulk_dir = e.bulk_dirichlet;
    r.e_bulk_pot = e.bulk_potential;
    r.e_surf_dir = e.surf_dirichlet;
    r.e_surf_pot = e.surf_potential;
    r.e_penalty = e.penalty;

    r.grad_mu_sq = 2.0 * dirichlet_energy_bulk(g, c.mu);
    r.grad_theta_sq = 2.0 * dirichlet_energy_surface(g, c.theta);
    r.sep_bulk = 1.0 - max_abs(s.phi);
    r.sep_surf = 1.0 - max_abs(s.psi);
    r.mu_mean = mean_bulk(g, c.mu);
    r.theta_mean = mean_surface(g, c.theta);
    r.mu_std = bulk_std(g, c.mu, r.mu_mean);
    r.theta_std = surf_std(g, c.theta, r.theta_mean);
    r.newton_iters = rpt.newton_iters;
    return r;
}

std::string to_csv_row(const TimeSeriesRecord& r) {
    std::string s;
    s.reserve(400);
    const double cols[] = {r.t,          r.mass_bulk,  r.mass_surf,
                           r.energy_total, r.e_bulk_dir, r.e_bulk_pot,
                           r.e_surf_dir, r.e_surf_pot, r.e_penalty,
                           r.grad_mu_sq, r.grad_theta_sq, r.sep_bulk,
                           r.sep_surf,   r.mu_mean,    r.mu_std,
                           r.theta_mean, r.theta_std};
    for (double v : cols) {
        append_g17(s, v);
        s += ',';
    }
    s += std::to_string(r.newton_iters);
    return s;
}

double norm_l2_bulk(const Grid& g, const BulkField& u) {
    return std::sqrt(
        kernels::bulk_quad_dot(g.nx, g.ny, g.hx(), g.hy(), u.data(), u.data()));
}

double norm_l2_surface(const Grid& g, const SurfField& v) {
    const double s =
        kernels::dot(v.bottom.data(), v.bottom.data(), v.bottom.size()) +
        kernels::dot(v.top.data(), v.top.data(), v.top.size());
    return std::sqrt(g.surf_weight() * s);
}

double l2_distance(const Grid& g, const PhaseState& a, const PhaseState& b) {
    BulkField db(g);
    for (std::size_t k = 0; k < db.size(); ++k) {
        db.v[k] = a.phi.v[k] - b.phi.v[k];
    }
    SurfField ds(g);
    for (int i = 0; i < g.nx; ++i) {
        ds.bottom[i] = a.psi.bottom[i] - b.psi.bottom[i];
        ds.top[i] = a.psi.top[i] - b.psi.top[i];
    }
    const double nb = norm_l2_bulk(g, db);
    const double ns = norm_l2_surface(g, ds);
    return std::sqrt(nb * nb + ns * ns);
}

double h1_distance(const Grid& g, const PhaseState& a, const PhaseState& b) {
    BulkField db(g);
    for (std::size_t k = 0; k < db.size(); ++k) {
        db.v[k] = a.phi.v[k] - b.phi.v[k];
    }
    SurfField ds(g);
    for (int i = 0; i < g.nx; ++i) {
        ds.bottom[i] = a.psi.bottom[i] - b.psi.bottom[i];
        ds.top[i] = a.psi.top[i] - b.psi.top[i];
    }
    const double nb = norm_l2_bulk(g, db);
    const double ns = norm_l2_surface(g, ds);
    return std::sqrt(nb * nb + ns * ns + 2.0 * dirichlet_energy_bulk(g, db) +
                     2.0 * dirichlet_energy_surface(g, ds));
}

SteadyStateReport detect_steady(const Grid& g, const ModelParams& p,
                                const std::vector<TimeSeriesRecord>& history,
                                const PhaseState& current,
                                const PhaseState& previous, double dt,
                                double tol_rate) {
    SteadyStateReport rep;
    if (history.size() < 2 || !(dt > 0.0)) {
        return rep;
    }

    double dmax = 0.0;
    for (std::size_t k = 0; k < current.phi.size(); ++k) {
        dmax = std::max(dmax, std::abs(current.phi.v[k] - previous.phi.v[k]));
    }
    for (int i = 0; i < g.nx; ++i) {
        dmax = std::max(dmax,
                        std::abs(current.psi.bottom[i] - previous.psi.bottom[i]));
        dmax = std::max(dmax, std::abs(current.psi.top[i] - previous.psi.top[i]));
    }
    rep.rate = dmax / dt;
    rep.t_detect = current.t;
    if (rep.rate > tol_rate) {
        return rep;
    }
    rep.converged = true;

    const ChemState c = chemical_potentials(g, p, current);
    rep.mu_inf_measured = mean_bulk(g, c.mu);
    rep.theta_inf_measured = mean_surface(g, c.theta);
    rep.mu_stddev = bulk_std(g, c.mu, rep.mu_inf_measured);
    rep.theta_stddev = surf_std(g, c.theta, rep.theta_inf_measured);

    // Stationary constants from the state alone.
    const SurfField flux = coupling_flux(g, p, current);
    BulkField fp(g);
    for (std::size_t k = 0; k < current.phi.size(); ++k) {
        const double r = current.phi.v[k];
        fp.v[k] = p.beta_bulk(r) + p.potential_bulk.pi(r);
    }
    rep.mu_inf_formula = (integrate_bulk(g, fp) - integrate_surface(g, flux)) /
                         g.bulk_measure();

    SurfField gp(g);
    for (int i = 0; i < g.nx; ++i) {
        gp.bottom[i] = flux.bottom[i] + p.beta_surf(current.psi.bottom[i]) +
                       p.potential_surf.pi(current.psi.bottom[i]);
        gp.top[i] = flux.top[i] + p.beta_surf(current.psi.top[i]) +
                    p.potential_surf.pi(current.psi.top[i]);
    }
    rep.theta_inf_formula = integrate_surface(g, gp) / g.surf_measure();
    return rep;
}

RateFit fit_rate(const Grid& g,
                 const std::vector<std::pair<double, PhaseState>>& snapshots,
                 const PhaseState& s_inf) {
    std::vector<double> ts, ds;
    for (const auto& [t, s] : snapshots) {
        const double d = h1_distance(g, s, s_inf);
        if (d > 1e-15) {
            ts.push_back(t);
            ds.push_back(d);
        }
    }
    if (ts.size() < 10) {
        throw InsufficientData("rate fit needs >= 10 snapshots with nonzero "
                               "distance to the terminal state");
    }

    std::vector<double> x_alg(ts.size()), x_exp(ts.size()), y(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        x_alg[i] = std::log1p(ts[i]);
        x_exp[i] = ts[i];
        y[i] = std::log(ds[i]);
    }
    const auto [aa, ba] = fit_line(x_alg, y);
    const auto [ae, be] = fit_line(x_exp, y);
    const double res_alg = fit_residual(x_alg, y, aa, ba);
    const double res_exp = fit_residual(x_exp, y, ae, be);

    RateFit out;
    if (res_exp < res_alg) {
        out.exponential = true;
        out.exponent = std::numeric_limits<double>::infinity();
        out.rate = -be;
    } else {
        out.exponent = -ba;
        out.rate = 0.0;
    }
    return out;
}

std::vector<double> dissipation_residual(
    const std::vector<TimeSeriesRecord>& history) {
    std::vector<double> out;
    for (std::size_t n = 0; n + 1 < history.size(); ++n) {
        const auto& a = history[n];
        const auto& b = history[n + 1];
        const double dt = b.t - a.t;
        out.push_back(b.energy_total - a.energy_total +
                      dt * (b.grad_mu_sq + b.grad_theta_sq));
    }
    return out;
}

} // namespace bsch
