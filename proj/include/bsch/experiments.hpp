#ifndef BSCH_EXPERIMENTS_HPP
#define BSCH_EXPERIMENTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "bsch/config.hpp"
#include "bsch/run.hpp"

namespace bsch {

// Counter-based 64-bit generator (splitmix64): node k of a field draws
// output(seed + (k+1)*gamma), so identical seeds give bit-identical
// fields on every platform.
std::uint64_t splitmix64(std::uint64_t state);
double noise_unit(std::uint64_t seed, std::uint64_t counter); // in [-1,1)

// Builds (phi0, psi0) from the init block. Noise fields are mean-projected
// then rescaled to the exact amplitude, so the quadrature means equal the
// requested ones to roundoff. With trace_from_bulk (required when K = 0)
// the rings are the boundary rows of phi0 and mean_surf is ignored.
PhaseState make_initial_state(const Grid& g, const InitConfig& init,
                              bool trace_from_bulk);

enum class SweepParam { YosidaEps, RobinK, Theta };

struct SweepSpec {
    RunConfig base;
    SweepParam param = SweepParam::Theta;
    std::vector<double> values; // strictly decreasing toward the limit
    double t_end = 0.5;
};

SweepSpec make_sweep_spec(const RunConfig& cfg);

// Applies one sweep value to a copy of the base config.
RunConfig apply_sweep_value(const SweepSpec& spec, double value);

std::string sweep_param_name(SweepParam p);
std::string sweep_run_id(SweepParam p, double value);

struct SweepMember {
    double value = 0.0;
    std::string run_id;
    bool failed = false;
    std::string error;
    Trajectory traj;
    // summary readouts
    double final_energy = 0.0;
    double min_separation = 0.0;
    double mass_drift = 0.0;
    double pairwise_dist_to_next = 0.0; // unset on the last member
    double dist_to_limit = 0.0;         // distance to the last member's run
    double dist_to_limit_bulk = 0.0;
    double dist_to_limit_surf = 0.0;
};

struct SweepReport {
    SweepParam param = SweepParam::Theta;
    std::vector<SweepMember> members;
    bool all_ok() const {
        for (const auto& m : members) {
            if (m.failed) return false;
        }
        return true;
    }
};

// Fills the summary readouts of one finished member.
void summarize_member(SweepMember& m);

// max over common snapshot times of the product-space L2 distance.
double trajectory_distance(const Grid& g, const Trajectory& a,
                           const Trajectory& b);

// Pairwise and to-limit distances across finished members.
void compute_sweep_distances(const Grid& g, SweepReport& rep);

// Deep-quench readouts of one logarithmic run: xi = theta*f0(phi).
struct ObstacleReport {
    double xi_l2_qt = 0.0;  // space-time L2 norm of xi over the horizon
    double sup_phi = 0.0;   // max |phi| over saved snapshots
    std::size_t contact_count = 0; // bulk nodes within 1e-3 of +-1
    double sign_fraction = 1.0;    // share passing the subgradient check
};

ObstacleReport obstacle_limit_checks(const Grid& g, const ModelParams& p,
                                     const Trajectory& run_theta);

// Canonical spinodal-decomposition configuration: seeded noise with zero
// means, amplitude 0.05, 64x32 strip, dt 1e-3.
RunConfig spinodal_scenario(std::uint64_t seed, double K,
                            const PotentialConfig& potential);

} // namespace bsch

#endif
