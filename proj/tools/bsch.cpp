#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "bsch/io.hpp"
#include "bsch/kernels.hpp"

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot open " + path);
    }
    std::stringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

int cmd_run(const std::string& config_path, const fs::path& out,
            bool is_sweep) {
    const bsch::RunConfig cfg = bsch::parse_config(read_file(config_path));
    if (is_sweep) {
        if (!cfg.sweep) {
            std::cerr << "sweep: config has no sweep block\n";
            return 2;
        }
        const bsch::SweepReport rep = bsch::execute_sweep(cfg, out);
        int bad = 0;
        for (const auto& m : rep.members) {
            if (m.failed) {
                std::cerr << m.run_id << " failed: " << m.error << "\n";
                ++bad;
                continue;
            }
            std::cout << m.run_id << ": E_final=" << m.final_energy
                      << " min_sep=" << m.min_separation
                      << " mass_drift=" << m.mass_drift << "\n";
        }
        std::cout << "sweep summary: " << (out / "sweep" / "summary.csv")
                  << "\n";
        return bad ? 1 : 0;
    }

    const bsch::RunArtifacts art = bsch::execute_run(cfg, out);
    const auto violations = bsch::verify_trajectory_invariants(cfg, art.traj);
    for (const auto& v : violations) {
        std::cerr << "invariant violated: " << v << "\n";
    }
    const auto& last = art.traj.records.back();
    std::cout << "run finished: t=" << last.t << " E=" << last.energy_total
              << " records=" << art.traj.records.size()
              << " snapshots=" << art.traj.snapshots.size() << "\n"
              << "artifacts: " << art.dir << "\n";
    return violations.empty() ? 0 : 1;
}

void print_assumption_report(const bsch::AssumptionReport& rep) {
    auto line = [](const char* name, bool pass, const std::string& detail) {
        std::cout << "  " << name << ": " << (pass ? "pass" : "FAIL") << "  ("
                  << detail << ")\n";
    };
    line("A1 monotone/uniformly convex", rep.a1_pass,
         "min beta' = " + std::to_string(rep.varpi_observed));
    line("A2 surface dominates bulk", rep.a2_pass,
         "rho = " + std::to_string(rep.rho_fitted) +
             ", c0 = " + std::to_string(rep.c0_fitted) +
             "; reverse rho = " + std::to_string(rep.reverse_rho) +
             ", c0 = " + std::to_string(rep.reverse_c0));
    line("A3 pi globally Lipschitz", rep.a3_pass,
         "L_bulk = " + std::to_string(rep.pi_lipschitz_bulk) +
             ", L_surf = " + std::to_string(rep.pi_lipschitz_surf));
    line("A5a beta' exponential bound", rep.a5a_pass,
         "C# = " + std::to_string(rep.c_sharp) +
             ", gamma# = " + std::to_string(rep.gamma_sharp) +
             ", fit rms = " + std::to_string(rep.a5a_fit_residual));
    line("A5b blow-up rate", rep.a5b_pass,
         "kappa+ = " + std::to_string(rep.kappa_plus) +
             ", kappa- = " + std::to_string(rep.kappa_minus));
}

// Small direct audit of the discrete operators on the configured grid.
bool operator_property_suite(const bsch::Grid& g) {
    using namespace bsch;
    bool ok = true;
    auto check = [&](bool pass, const char* what) {
        std::cout << "  " << what << ": " << (pass ? "pass" : "FAIL") << "\n";
        ok = ok && pass;
    };

    BulkField u(g), w(g);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            u.at(i, j) = std::sin(2.0 * M_PI * g.x(i) / g.lx) +
                         0.3 * std::cos(2.0 * M_PI * g.y(j) / g.ly);
            w.at(i, j) = std::cos(4.0 * M_PI * g.x(i) / g.lx) * g.y(j);
        }
    }
    const BulkField lu = laplace_bulk(g, u);
    const BulkField lw = laplace_bulk(g, w);
    check(std::abs(integrate_bulk(g, lu)) < 1e-10 * g.bulk_nodes(),
          "divergence theorem <L u, 1> = 0");
    const double s1 = kernels::bulk_quad_dot(g.nx, g.ny, g.hx(), g.hy(),
                                             lu.data(), w.data());
    const double s2 = kernels::bulk_quad_dot(g.nx, g.ny, g.hx(), g.hy(),
                                             u.data(), lw.data());
    check(std::abs(s1 - s2) < 1e-9 * (1.0 + std::abs(s1)),
          "summation by parts <Lu,w> = <u,Lw>");
    const double ed = dirichlet_energy_bulk(g, u);
    const double viaop = -0.5 * kernels::bulk_quad_dot(
                                    g.nx, g.ny, g.hx(), g.hy(), lu.data(),
                                    u.data());
    check(std::abs(ed - viaop) < 1e-9 * (1.0 + std::abs(ed)),
          "dirichlet form = -1/2 <Lu,u>");
    return ok;
}

int cmd_validate(const std::string& config_path, bool print_defaults,
                 const fs::path&) {
    if (print_defaults) {
        std::cout << bsch::emit_config(bsch::default_config());
        return 0;
    }
    const bsch::RunConfig cfg = bsch::parse_config(read_file(config_path));
    const bsch::ModelParams p = cfg.make_model();
    std::cout << "potential assumptions (" << p.potential_bulk.describe()
              << " / " << p.potential_surf.describe() << "):\n";
    const auto rep =
        bsch::validate_assumptions(p.potential_bulk, p.potential_surf, 1000);
    print_assumption_report(rep);
    std::cout << "operator properties on " << cfg.grid.nx << "x" << cfg.grid.ny
              << ":\n";
    const bool ops_ok = operator_property_suite(cfg.make_grid());
    return (rep.all_pass() && ops_ok) ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"bulk-surface Cahn-Hilliard strip simulator"};
    app.require_subcommand(1);

    std::string out_dir = "./out";
    app.add_option("--out", out_dir, "output root directory");

    std::string config_path, run_dir;
    auto* run_cmd = app.add_subcommand("run", "advance one trajectory");
    run_cmd->add_option("config", config_path, "config file")->required();
    auto* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep");
    sweep_cmd->add_option("config", config_path, "config file")->required();
    auto* val_cmd =
        app.add_subcommand("validate", "audit potential assumptions and "
                                       "discrete operators");
    val_cmd->add_option("config", config_path, "config file");
    bool print_defaults = false;
    val_cmd->add_flag("--print-defaults", print_defaults,
                      "print the default configuration and exit");
    auto* replay_cmd = app.add_subcommand(
        "replay-check", "recompute diagnostics from stored snapshots");
    replay_cmd->add_option("run_dir", run_dir, "run directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run_cmd->parsed()) {
            return cmd_run(config_path, out_dir, false);
        }
        if (sweep_cmd->parsed()) {
            return cmd_run(config_path, out_dir, true);
        }
        if (val_cmd->parsed()) {
            if (!print_defaults && config_path.empty()) {
                std::cerr << "validate: config path required\n";
                return 2;
            }
            return cmd_validate(config_path, print_defaults, out_dir);
        }
        if (replay_cmd->parsed()) {
            return bsch::replay_check(run_dir, std::cout);
        }
    } catch (const bsch::ParseError& e) {
        std::cerr << "config parse error at line " << e.line << ", column "
                  << e.column << ": " << e.what() << "\n";
        return 2;
    } catch (const bsch::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
