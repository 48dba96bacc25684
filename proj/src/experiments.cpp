#include "bsch/experiments.hpp"

#include <cmath>
#include <cstdio>

namespace bsch {

std::uint64_t splitmix64(std::uint64_t state) {
    std::uint64_t z = state + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double noise_unit(std::uint64_t seed, std::uint64_t counter) {
    const std::uint64_t bits =
        splitmix64(seed + (counter + 1) * 0x9e3779b97f4a7c15ULL);
    const double u = static_cast<double>(bits >> 11) * 0x1p-53; // [0,1)
    return 2.0 * u - 1.0;
}

namespace {

void copy_trace_rows(const Grid& g, PhaseState& s) {
    const std::size_t off = static_cast<std::size_t>(g.ny - 1) * g.nx;
    for (int i = 0; i < g.nx; ++i) {
        s.psi.bottom[i] = s.phi.v[i];
        s.psi.top[i] = s.phi.v[off + i];
    }
}

} // namespace

PhaseState make_initial_state(const Grid& g, const InitConfig& init,
                              bool trace_from_bulk) {
    PhaseState s(g);

    if (init.kind == "constant") {
        for (double& x : s.phi.v) x = init.mean_bulk;
        for (int i = 0; i < g.nx; ++i) {
            s.psi.bottom[i] = init.mean_surf;
            s.psi.top[i] = init.mean_surf;
        }
        if (trace_from_bulk) copy_trace_rows(g, s);
        return s;
    }

    if (init.kind == "seeded_noise") {
        const std::size_t n = s.phi.size();
        for (std::size_t k = 0; k < n; ++k) {
            s.phi.v[k] = noise_unit(init.seed, k);
        }
        project_zero_mean(g, s.phi);
        const double mb = max_abs(s.phi);
        const double sb = mb > 0.0 ? init.amplitude / mb : 0.0;
        for (double& x : s.phi.v) x = init.mean_bulk + sb * x;

        if (trace_from_bulk) {
            copy_trace_rows(g, s);
        } else {
            for (int i = 0; i < g.nx; ++i) {
                s.psi.bottom[i] = noise_unit(init.seed, n + i);
                s.psi.top[i] = noise_unit(init.seed, n + g.nx + i);
            }
            project_zero_mean(g, s.psi);
            const double ms = max_abs(s.psi);
            const double ss = ms > 0.0 ? init.amplitude / ms : 0.0;
            for (int i = 0; i < g.nx; ++i) {
                s.psi.bottom[i] = init.mean_surf + ss * s.psi.bottom[i];
                s.psi.top[i] = init.mean_surf + ss * s.psi.top[i];
            }
        }
        return s;
    }

    if (init.kind == "two_phase_band") {
        const double yc = init.position * g.ly;
        const double w = init.width * g.ly;
        const double delta = 3.0 * g.hy();
        const double amp = 0.9;
        for (int j = 0; j < g.ny; ++j) {
            const double v =
                amp * std::tanh((0.5 * w - std::abs(g.y(j) - yc)) / delta);
            for (int i = 0; i < g.nx; ++i) {
                s.phi.at(i, j) = v;
            }
        }
        copy_trace_rows(g, s); // bands are y-profiles, trace is exact
        return s;
    }

    throw DomainError("unknown init kind: " + init.kind);
}

SweepSpec make_sweep_spec(const RunConfig& cfg) {
    if (!cfg.sweep) {
        throw DomainError("config has no sweep block");
    }
    SweepSpec spec;
    spec.base = cfg;
    spec.values = cfg.sweep->values;
    spec.t_end = cfg.sweep->t_end;
    if (cfg.sweep->param == "theta") {
        spec.param = SweepParam::Theta;
    } else if (cfg.sweep->param == "K") {
        spec.param = SweepParam::RobinK;
    } else {
        spec.param = SweepParam::YosidaEps;
    }
    return spec;
}

RunConfig apply_sweep_value(const SweepSpec& spec, double value) {
    RunConfig c = spec.base;
    c.sweep.reset();
    c.time.t_end = spec.t_end;
    switch (spec.param) {
    case SweepParam::Theta:
        c.model.potential.theta = value;
        break;
    case SweepParam::RobinK:
        c.model.K = value;
        break;
    case SweepParam::YosidaEps:
        c.model.yosida_eps = value;
        break;
    }
    c.output.directory = sweep_run_id(spec.param, value);
    return c;
}

std::string sweep_param_name(SweepParam p) {
    switch (p) {
    case SweepParam::Theta: return "theta";
    case SweepParam::RobinK: return "K";
    case SweepParam::YosidaEps: return "yosida_eps";
    }
    return "?";
}

std::string sweep_run_id(SweepParam p, double value) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s=%g", sweep_param_name(p).c_str(),
                  value);
    return buf;
}

void summarize_member(SweepMember& m) {
    if (m.failed || m.traj.records.empty()) {
        return;
    }
    const auto& recs = m.traj.records;
    m.final_energy = recs.back().energy_total;
    double sep = recs.front().sep_bulk;
    double drift = 0.0;
    const double m0 = recs.front().mass_bulk;
    const double mg0 = recs.front().mass_surf;
    for (const auto& r : recs) {
        sep = std::min({sep, r.sep_bulk, r.sep_surf});
        drift = std::max({drift, std::abs(r.mass_bulk - m0),
                          std::abs(r.mass_surf - mg0)});
    }
    m.min_separation = sep;
    m.mass_drift = drift;
}

double trajectory_distance(const Grid& g, const Trajectory& a,
                           const Trajectory& b) {
    const std::size_t n = std::min(a.snapshots.size(), b.snapshots.size());
    double d = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        d = std::max(d, l2_distance(g, a.snapshots[k].state,
                                    b.snapshots[k].state));
    }
    return d;
}

namespace {

std::pair<double, double> trajectory_distance_split(const Grid& g,
                                                    const Trajectory& a,
                                                    const Trajectory& b) {
    const std::size_t n = std::min(a.snapshots.size(), b.snapshots.size());
    double db = 0.0, ds = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const auto& sa = a.snapshots[k].state;
        const auto& sb = b.snapshots[k].state;
        BulkField diff(g);
        for (std::size_t i = 0; i < diff.size(); ++i) {
            diff.v[i] = sa.phi.v[i] - sb.phi.v[i];
        }
        SurfField diffs(g);
        for (int i = 0; i < g.nx; ++i) {
            diffs.bottom[i] = sa.psi.bottom[i] - sb.psi.bottom[i];
            diffs.top[i] = sa.psi.top[i] - sb.psi.top[i];
        }
        db = std::max(db, norm_l2_bulk(g, diff));
        ds = std::max(ds, norm_l2_surface(g, diffs));
    }
    return {db, ds};
}

} // namespace

void compute_sweep_distances(const Grid& g, SweepReport& rep) {
    auto& ms = rep.members;
    for (std::size_t k = 0; k + 1 < ms.size(); ++k) {
        if (ms[k].failed || ms[k + 1].failed) continue;
        ms[k].pairwise_dist_to_next =
            trajectory_distance(g, ms[k].traj, ms[k + 1].traj);
    }
    if (ms.empty() || ms.back().failed) return;
    const Trajectory& limit = ms.back().traj;
    for (auto& m : ms) {
        if (m.failed) continue;
        m.dist_to_limit = trajectory_distance(g, m.traj, limit);
        const auto [db, dsf] = trajectory_distance_split(g, m.traj, limit);
        m.dist_to_limit_bulk = db;
        m.dist_to_limit_surf = dsf;
    }
}

ObstacleReport obstacle_limit_checks(const Grid& g, const ModelParams& p,
                                     const Trajectory& run_theta) {
    if (p.potential_bulk.kind() != PotentialKind::Logarithmic) {
        throw KindMismatch("obstacle checks need a logarithmic run");
    }
    const double theta = p.potential_bulk.theta();
    ObstacleReport rep;

    double time_integral = 0.0;
    std::vector<double> xi_sq; // per snapshot, |xi|_L2^2 over the bulk
    for (const auto& snap : run_theta.snapshots) {
        rep.sup_phi = std::max(rep.sup_phi, max_abs(snap.state.phi));
        BulkField xi(g);
        for (std::size_t k = 0; k < xi.size(); ++k) {
            xi.v[k] = theta * Potential::f0(snap.state.phi.v[k]);
        }
        const double nb = norm_l2_bulk(g, xi);
        xi_sq.push_back(nb * nb);

        for (std::size_t k = 0; k < xi.size(); ++k) {
            const double phi = snap.state.phi.v[k];
            if (1.0 - std::abs(phi) <= 1e-3) {
                ++rep.contact_count;
                const double side = phi > 0.0 ? 1.0 : -1.0;
                if (!subgradient_indicator(side, xi.v[k])) {
                    rep.sign_fraction = 0.0; // recomputed below
                }
            }
        }
    }

    // trapezoid in time over the snapshot grid
    for (std::size_t k = 0; k + 1 < run_theta.snapshots.size(); ++k) {
        const double dt =
            run_theta.snapshots[k + 1].t - run_theta.snapshots[k].t;
        time_integral += 0.5 * dt * (xi_sq[k] + xi_sq[k + 1]);
    }
    rep.xi_l2_qt = std::sqrt(time_integral);

    // exact fraction
    if (rep.contact_count > 0) {
        std::size_t pass = 0, total = 0;
        for (const auto& snap : run_theta.snapshots) {
            for (std::size_t k = 0; k < snap.state.phi.size(); ++k) {
                const double phi = snap.state.phi.v[k];
                if (1.0 - std::abs(phi) <= 1e-3) {
                    ++total;
                    const double side = phi > 0.0 ? 1.0 : -1.0;
                    if (subgradient_indicator(side,
                                              theta * Potential::f0(phi))) {
                        ++pass;
                    }
                }
            }
        }
        rep.sign_fraction =
            static_cast<double>(pass) / static_cast<double>(total);
    }
    return rep;
}

RunConfig spinodal_scenario(std::uint64_t seed, double K,
                            const PotentialConfig& potential) {
    RunConfig c;
    c.grid = GridConfig{64, 32, 2.0, 1.0};
    c.time = TimeConfig{1e-3, 2.0, 1000.0, 20, std::nullopt};
    c.model.K = K;
    c.model.potential = potential;
    c.init.kind = "seeded_noise";
    c.init.mean_bulk = 0.0;
    c.init.mean_surf = 0.0;
    c.init.amplitude = 0.05;
    c.init.seed = seed;
    c.output.directory = "spinodal";
    return c;
}

} // namespace bsch
