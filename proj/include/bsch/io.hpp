#ifndef BSCH_IO_HPP
#define BSCH_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "bsch/config.hpp"
#include "bsch/experiments.hpp"

namespace bsch {

// Run directory layout:
//   <dir>/config.json          echo of the effective configuration
//   <dir>/series.csv           one record per row (see series_csv_header)
//   <dir>/snapshots/index.csv  k,t
//   <dir>/snapshots/<k>_{phi,psi,mu,theta}.dat
//   <dir>/plots.gp             optional gnuplot script
struct RunArtifacts {
    std::filesystem::path dir;
    Trajectory traj;
};

// Executes one trajectory and writes its directory under out_root.
RunArtifacts execute_run(const RunConfig& cfg,
                         const std::filesystem::path& out_root);

// Recomputes the state-derived series columns from the stored snapshots
// and compares them byte for byte (newton_iters is step metadata and is
// skipped). Returns 0 on success, 1 on any mismatch.
int replay_check(const std::filesystem::path& run_dir, std::ostream& log);

// Runs every sweep member (concurrently up to BSCH_THREADS), writes
// sweep/<param>=<value>/... and the summary CSV
//   param_value,run_id,final_energy,min_separation,mass_drift,
//   pairwise_dist_to_next
// and returns the in-memory report with pairwise distances filled in.
SweepReport execute_sweep(const RunConfig& cfg,
                          const std::filesystem::path& out_root);

// Scans a finished trajectory for violations of the runtime invariants
// (mass drift, energy monotonicity, separation for singular runs).
// Returns human-readable violation strings, empty when clean.
std::vector<std::string> verify_trajectory_invariants(
    const RunConfig& cfg, const Trajectory& traj);

} // namespace bsch

#endif
