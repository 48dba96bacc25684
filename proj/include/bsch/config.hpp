#ifndef BSCH_CONFIG_HPP
#define BSCH_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bsch/model.hpp"
#include "bsch/run.hpp"
#include "bsch/stepper.hpp"

namespace bsch {

struct GridConfig {
    int nx = 64;
    int ny = 32;
    double lx = 2.0;
    double ly = 1.0;
};

struct TimeConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    double records_per_unit_time = 1000.0;
    int snapshots = 20;
    std::optional<double> stop_at_rate;
};

struct PotentialConfig {
    std::string kind = "logarithmic"; // logarithmic | quartic | double_obstacle
    double theta = 1.0;
    double theta_c = 2.0;
};

struct ModelConfig {
    double K = 1.0;
    double sigma = 0.0;
    std::optional<double> yosida_eps;
    double yosida_rho = 1.0;
    PotentialConfig potential;
};

struct InitConfig {
    std::string kind = "seeded_noise"; // constant | seeded_noise | two_phase_band
    double mean_bulk = 0.0;
    double mean_surf = 0.0;
    double amplitude = 0.05;
    std::uint64_t seed = 1;
    double position = 0.5; // two_phase_band: band centre in y
    double width = 0.4;    // two_phase_band: band width
};

struct SolverConfig {
    double newton_tol = 1e-11;
    int newton_max_iter = 50;
    double linesearch_shrink = 0.5;
    double separation_guard = 0.9;
    std::string linear_kind = "direct"; // direct | bicgstab
    double linear_tol = 1e-10;
    int linear_max_iter = 500;
};

struct OutputConfig {
    std::string directory = "run";
    bool emit_plots = false;
};

struct SweepConfig {
    std::string param; // theta | K | yosida_eps
    std::vector<double> values;
    double t_end = 0.5;
};

struct RunConfig {
    GridConfig grid;
    TimeConfig time;
    ModelConfig model;
    InitConfig init;
    SolverConfig solver;
    OutputConfig output;
    std::optional<SweepConfig> sweep;

    Grid make_grid() const;
    ModelParams make_model() const;
    StepperConfig make_stepper_config() const;
    RunSchedule make_schedule() const;
};

// Parses and fully validates; ParseError carries line/column, semantic
// problems are collected into one ValidationError with key paths.
RunConfig parse_config(const std::string& text);

// Canonical JSON; parse_config(emit_config(c)) round-trips.
std::string emit_config(const RunConfig& c);

RunConfig default_config();

} // namespace bsch

#endif
