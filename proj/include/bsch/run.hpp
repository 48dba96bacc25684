#ifndef BSCH_RUN_HPP
#define BSCH_RUN_HPP

#include <functional>
#include <optional>

#include "bsch/diagnostics.hpp"
#include "bsch/stepper.hpp"

namespace bsch {

struct RunSchedule {
    double records_per_unit_time = 1000.0;
    int snapshots = 20;
    // Stop early once the max-norm state change per unit time falls
    // below this rate (steady-state runs).
    std::optional<double> stop_at_rate;
};

struct Snapshot {
    double t = 0.0;
    PhaseState state;
    ChemState chem;
};

struct DtEvent {
    double t = 0.0;
    double old_dt = 0.0;
    double new_dt = 0.0;
};

struct Trajectory {
    std::vector<TimeSeriesRecord> records;
    std::vector<Snapshot> snapshots;
    PhaseState initial_state;
    PhaseState final_state;
    PhaseState prev_state; // one step before the final state
    ChemState final_chem;
    std::vector<DtEvent> dt_events;
    double dt_final = 0.0;
    bool stopped_steady = false;
};

struct RunCallbacks {
    std::function<void(const TimeSeriesRecord&)> on_record;
    std::function<void(const Snapshot&)> on_snapshot;
};

// Advances s0 to t_end. Snapshot times are the uniform grid
// k*t_end/snapshots (k = 0..snapshots); a record is also emitted at every
// snapshot step. On NewtonDivergence the step is retried at dt/2, down to
// a floor of the initial dt/1024; the reduction persists and is logged in
// dt_events. Aborted is thrown at the floor.
Trajectory run(const Grid& g, const ModelParams& p, const StepperConfig& cfg,
               const PhaseState& s0, double t_end, const RunSchedule& sched,
               const RunCallbacks& cb = {});

} // namespace bsch

#endif
