#include "bsch/run.hpp"

#include <cmath>

namespace bsch {

Trajectory run(const Grid& g, const ModelParams& p, const StepperConfig& cfg,
               const PhaseState& s0, double t_end, const RunSchedule& sched,
               const RunCallbacks& cb) {
    if (!(t_end >= 0.0)) {
        throw DomainError("run requires t_end >= 0");
    }

    Trajectory traj;
    traj.initial_state = p.dirichlet() ? with_identified_trace(g, s0) : s0;
    traj.prev_state = traj.initial_state;

    Stepper stepper(g, p, cfg);
    double dt = cfg.dt;
    const double dt_floor = cfg.dt / 1024.0;

    auto record_interval = [&](double dt_now) {
        const double steps = 1.0 / (dt_now * sched.records_per_unit_time);
        return std::max<long long>(1, std::llround(steps));
    };

    // Initial record and snapshot carry the sigma-free chemistry readout.
    {
        ModelParams p0 = p;
        p0.sigma = 0.0;
        const ChemState c0 = chemical_potentials(g, p0, traj.initial_state);
        const TimeSeriesRecord r0 =
            record(g, p, traj.initial_state, c0, StepReport{});
        traj.records.push_back(r0);
        if (cb.on_record) cb.on_record(r0);
        Snapshot snap{traj.initial_state.t, traj.initial_state, c0};
        traj.snapshots.push_back(snap);
        if (cb.on_snapshot) cb.on_snapshot(traj.snapshots.back());
    }

    const double t0 = traj.initial_state.t;
    const double t_stop = t0 + t_end;
    int next_snap = 1;
    auto snap_target = [&](int k) {
        return t0 + t_end * static_cast<double>(k) / sched.snapshots;
    };

    PhaseState state = traj.initial_state;
    long long step_index = 0;
    long long rec_every = record_interval(dt);

    while (state.t < t_stop - 0.5 * dt) {
        StepResult res;
        for (;;) {
            try {
                res = stepper.step(state);
                break;
            } catch (const NewtonDivergence&) {
                if (dt * 0.5 < dt_floor) {
                    throw Aborted("time step floor reached at t = " +
                                  std::to_string(state.t));
                }
                traj.dt_events.push_back({state.t, dt, dt * 0.5});
                dt *= 0.5;
                stepper.set_dt(dt);
                rec_every = record_interval(dt);
            }
        }
        traj.prev_state = state;
        state = res.state;
        ++step_index;

        const bool last = !(state.t < t_stop - 0.5 * dt);
        bool want_snap = next_snap <= sched.snapshots &&
                         state.t >= snap_target(next_snap) - 1e-9 * dt;
        double rate = 0.0;
        if (sched.stop_at_rate) {
            double dmax = 0.0;
            for (std::size_t k = 0; k < state.phi.size(); ++k) {
                dmax = std::max(
                    dmax, std::abs(state.phi.v[k] - traj.prev_state.phi.v[k]));
            }
            for (int i = 0; i < g.nx; ++i) {
                dmax = std::max(dmax, std::abs(state.psi.bottom[i] -
                                               traj.prev_state.psi.bottom[i]));
                dmax = std::max(dmax, std::abs(state.psi.top[i] -
                                               traj.prev_state.psi.top[i]));
            }
            rate = dmax / dt;
            if (rate <= *sched.stop_at_rate) {
                traj.stopped_steady = true;
            }
        }

        if (step_index % rec_every == 0 || last || want_snap ||
            traj.stopped_steady) {
            const TimeSeriesRecord r = record(g, p, state, res.chem, res.report);
            traj.records.push_back(r);
            if (cb.on_record) cb.on_record(r);
        }
        if (want_snap || ((last || traj.stopped_steady) &&
                          next_snap <= sched.snapshots)) {
            while (next_snap < sched.snapshots &&
                   state.t >= snap_target(next_snap + 1) - 1e-9 * dt) {
                ++next_snap; // dt coarser than the snapshot grid: skip slots
            }
            traj.snapshots.push_back({state.t, state, res.chem});
            if (cb.on_snapshot) cb.on_snapshot(traj.snapshots.back());
            ++next_snap;
        }
        traj.final_chem = res.chem;
        if (traj.stopped_steady) {
            break;
        }
    }

    traj.final_state = state;
    traj.dt_final = dt;
    if (step_index == 0) {
        ModelParams p0 = p;
        p0.sigma = 0.0;
        traj.final_chem = chemical_potentials(g, p0, state);
    }
    return traj;
}

} // namespace bsch
