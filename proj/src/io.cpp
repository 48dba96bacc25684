#include "bsch/io.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

namespace bsch {

namespace fs = std::filesystem;

namespace {

std::string g17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot write " + p.string());
    }
    f << text;
}

std::string plot_script() {
    return "set datafile separator ','\n"
           "set key autotitle columnhead\n"
           "set terminal pngcairo size 900,600\n"
           "set output 'energy.png'\n"
           "set logscale y\n"
           "plot 'series.csv' using 1:4 with lines title 'E(t)'\n"
           "unset logscale y\n"
           "set output 'separation.png'\n"
           "plot 'series.csv' using 1:12 with lines title 'sep bulk', \\\n"
           "     'series.csv' using 1:13 with lines title 'sep surf'\n"
           "set output 'dissipation.png'\n"
           "set logscale y\n"
           "plot 'series.csv' using 1:($10+$11) with lines "
           "title '|grad mu|^2 + |grad theta|^2'\n";
}

} // namespace

RunArtifacts execute_run(const RunConfig& cfg, const fs::path& out_root) {
    const Grid g = cfg.make_grid();
    const ModelParams p = cfg.make_model();
    const StepperConfig scfg = cfg.make_stepper_config();
    const PhaseState s0 =
        make_initial_state(g, cfg.init, /*trace_from_bulk=*/p.dirichlet());

    RunArtifacts art;
    art.dir = out_root / cfg.output.directory;
    fs::create_directories(art.dir / "snapshots");
    write_text(art.dir / "config.json", emit_config(cfg));

    std::ofstream series(art.dir / "series.csv", std::ios::binary);
    series << series_csv_header << '\n';
    std::ofstream snap_index(art.dir / "snapshots" / "index.csv",
                             std::ios::binary);
    snap_index << "k,t\n";

    int snap_k = 0;
    RunCallbacks cb;
    cb.on_record = [&](const TimeSeriesRecord& r) {
        series << to_csv_row(r) << '\n';
    };
    cb.on_snapshot = [&](const Snapshot& snap) {
        const std::string stem = std::to_string(snap_k);
        save_field(art.dir / "snapshots" / (stem + "_phi.dat"), g,
                   snap.state.phi);
        save_field(art.dir / "snapshots" / (stem + "_psi.dat"), g,
                   snap.state.psi);
        save_field(art.dir / "snapshots" / (stem + "_mu.dat"), g,
                   snap.chem.mu);
        save_field(art.dir / "snapshots" / (stem + "_theta.dat"), g,
                   snap.chem.theta);
        snap_index << snap_k << ',' << g17(snap.t) << '\n';
        ++snap_k;
    };

    art.traj = run(g, p, scfg, s0, cfg.time.t_end, cfg.make_schedule(), cb);

    if (cfg.output.emit_plots) {
        write_text(art.dir / "plots.gp", plot_script());
    }
    return art;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace

int replay_check(const fs::path& run_dir, std::ostream& log) {
    std::ifstream cf(run_dir / "config.json", std::ios::binary);
    if (!cf) {
        log << "replay-check: missing config.json in " << run_dir << "\n";
        return 1;
    }
    std::stringstream cbuf;
    cbuf << cf.rdbuf();
    RunConfig cfg;
    try {
        cfg = parse_config(cbuf.str());
    } catch (const std::exception& e) {
        log << "replay-check: bad config: " << e.what() << "\n";
        return 1;
    }
    const Grid g = cfg.make_grid();
    const ModelParams p = cfg.make_model();

    // series rows keyed by the t column (exact string)
    std::ifstream series(run_dir / "series.csv", std::ios::binary);
    if (!series) {
        log << "replay-check: missing series.csv\n";
        return 1;
    }
    std::string line;
    std::getline(series, line);
    if (line != series_csv_header) {
        log << "replay-check: unexpected series header\n";
        return 1;
    }
    std::vector<std::pair<std::string, std::string>> rows;
    while (std::getline(series, line)) {
        if (line.empty()) continue;
        rows.emplace_back(line.substr(0, line.find(',')), line);
    }

    std::ifstream index(run_dir / "snapshots" / "index.csv",
                        std::ios::binary);
    if (!index) {
        log << "replay-check: missing snapshots/index.csv\n";
        return 1;
    }
    std::getline(index, line); // header
    int failures = 0;
    int checked = 0;
    while (std::getline(index, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        const std::string k = line.substr(0, comma);
        const std::string t_str = line.substr(comma + 1);
        const double t = std::strtod(t_str.c_str(), nullptr);

        PhaseState s(g);
        ChemState c(g);
        const fs::path snapdir = run_dir / "snapshots";
        try {
            s.phi = load_bulk_field(snapdir / (k + "_phi.dat"), g);
            s.psi = load_surf_field(snapdir / (k + "_psi.dat"), g);
            c.mu = load_bulk_field(snapdir / (k + "_mu.dat"), g);
            c.theta = load_surf_field(snapdir / (k + "_theta.dat"), g);
        } catch (const std::exception& e) {
            log << "replay-check: snapshot " << k << ": " << e.what() << "\n";
            ++failures;
            continue;
        }
        s.t = t;

        const TimeSeriesRecord rec = record(g, p, s, c, StepReport{});
        const auto want = split_csv(to_csv_row(rec));
        const auto* stored_row = [&]() -> const std::string* {
            for (const auto& [tkey, row] : rows) {
                if (tkey == want[0]) return &row;
            }
            return nullptr;
        }();
        if (!stored_row) {
            log << "replay-check: no series row at t=" << want[0]
                << " (snapshot " << k << ")\n";
            ++failures;
            continue;
        }
        const auto got = split_csv(*stored_row);
        // all columns are state-derived except the trailing newton_iters
        for (std::size_t col = 0; col + 1 < want.size(); ++col) {
            if (got[col] != want[col]) {
                log << "replay-check: snapshot " << k << " column " << col
                    << " mismatch: stored=" << got[col]
                    << " recomputed=" << want[col] << "\n";
                ++failures;
            }
        }
        ++checked;
    }
    if (checked == 0) {
        log << "replay-check: no snapshots found\n";
        return 1;
    }
    if (failures == 0) {
        log << "replay-check: " << checked << " snapshots verified\n";
        return 0;
    }
    return 1;
}

SweepReport execute_sweep(const RunConfig& cfg, const fs::path& out_root) {
    const SweepSpec spec = make_sweep_spec(cfg);
    const Grid g = spec.base.make_grid();

    // Shared initial data, trace-compatible whenever any member runs K=0.
    bool any_dirichlet = spec.base.model.K == 0.0;
    if (spec.param == SweepParam::RobinK) {
        for (double v : spec.values) {
            if (v == 0.0) any_dirichlet = true;
        }
    }

    SweepReport rep;
    rep.param = spec.param;
    rep.members.resize(spec.values.size());

    const fs::path sweep_dir = out_root / "sweep";
    fs::create_directories(sweep_dir);

    int max_threads = static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("BSCH_THREADS")) {
        max_threads = std::max(1, std::atoi(env));
    }
    max_threads = std::max(1, std::min<int>(max_threads,
                                            static_cast<int>(spec.values.size())));

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= spec.values.size()) break;
            SweepMember& m = rep.members[idx];
            m.value = spec.values[idx];
            m.run_id = sweep_run_id(spec.param, m.value);
            RunConfig member_cfg = apply_sweep_value(spec, m.value);
            // identical initial data handling across all members
            if (any_dirichlet && member_cfg.model.K > 0.0) {
                member_cfg.init.mean_surf = member_cfg.init.mean_bulk;
            }
            try {
                const Grid gm = member_cfg.make_grid();
                const ModelParams pm = member_cfg.make_model();
                const PhaseState s0 = make_initial_state(
                    gm, member_cfg.init,
                    /*trace_from_bulk=*/any_dirichlet || pm.dirichlet());
                RunArtifacts art;
                art.dir = sweep_dir / member_cfg.output.directory;
                fs::create_directories(art.dir / "snapshots");
                write_text(art.dir / "config.json", emit_config(member_cfg));
                std::ofstream series(art.dir / "series.csv", std::ios::binary);
                series << series_csv_header << '\n';
                std::ofstream snap_index(
                    art.dir / "snapshots" / "index.csv", std::ios::binary);
                snap_index << "k,t\n";
                int snap_k = 0;
                RunCallbacks cb;
                cb.on_record = [&](const TimeSeriesRecord& r) {
                    series << to_csv_row(r) << '\n';
                };
                cb.on_snapshot = [&](const Snapshot& snap) {
                    const std::string stem = std::to_string(snap_k);
                    const fs::path sd = art.dir / "snapshots";
                    save_field(sd / (stem + "_phi.dat"), gm, snap.state.phi);
                    save_field(sd / (stem + "_psi.dat"), gm, snap.state.psi);
                    save_field(sd / (stem + "_mu.dat"), gm, snap.chem.mu);
                    save_field(sd / (stem + "_theta.dat"), gm,
                               snap.chem.theta);
                    snap_index << snap_k << ',' << g17(snap.t) << '\n';
                    ++snap_k;
                };
                m.traj = run(gm, pm, member_cfg.make_stepper_config(), s0,
                             member_cfg.time.t_end,
                             member_cfg.make_schedule(), cb);
                summarize_member(m);
            } catch (const std::exception& e) {
                m.failed = true;
                m.error = e.what();
            }
        }
    };

    if (max_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(max_threads);
        for (int t = 0; t < max_threads; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) th.join();
    }

    compute_sweep_distances(g, rep);

    std::string csv = "param_value,run_id,final_energy,min_separation,"
                      "mass_drift,pairwise_dist_to_next\n";
    for (std::size_t i = 0; i < rep.members.size(); ++i) {
        const SweepMember& m = rep.members[i];
        csv += g17(m.value);
        csv += ',' + m.run_id + ',';
        if (m.failed) {
            csv += "failed: " + m.error;
        } else {
            csv += g17(m.final_energy);
            csv += ',' + g17(m.min_separation);
            csv += ',' + g17(m.mass_drift);
            csv += ',';
            if (i + 1 < rep.members.size()) {
                csv += g17(m.pairwise_dist_to_next);
            }
        }
        csv += '\n';
    }
    write_text(sweep_dir / "summary.csv", csv);
    return rep;
}

std::vector<std::string> verify_trajectory_invariants(const RunConfig& cfg,
                                                      const Trajectory& traj) {
    std::vector<std::string> bad;
    if (traj.records.empty()) {
        bad.push_back("trajectory produced no records");
        return bad;
    }
    const bool singular = cfg.model.potential.kind != "quartic" &&
                          !cfg.model.yosida_eps.has_value();
    const double m0 = traj.records.front().mass_bulk;
    const double mg0 = traj.records.front().mass_surf;
    double e_prev = traj.records.front().energy_total;
    for (std::size_t i = 0; i < traj.records.size(); ++i) {
        const auto& r = traj.records[i];
        char where[64];
        std::snprintf(where, sizeof where, "record %zu (t=%.6g)", i, r.t);
        if (std::abs(r.mass_bulk - m0) > 1e-10) {
            bad.push_back(std::string(where) + ": bulk mass drift " +
                          g17(r.mass_bulk - m0));
        }
        if (std::abs(r.mass_surf - mg0) > 1e-10) {
            bad.push_back(std::string(where) + ": surface mass drift " +
                          g17(r.mass_surf - mg0));
        }
        if (r.energy_total > e_prev + 1e-10) {
            bad.push_back(std::string(where) + ": energy increased by " +
                          g17(r.energy_total - e_prev));
        }
        e_prev = r.energy_total;
        if (singular && (r.sep_bulk <= 0.0 || r.sep_surf <= 0.0)) {
            bad.push_back(std::string(where) + ": separation lost (bulk " +
                          g17(r.sep_bulk) + ", surf " + g17(r.sep_surf) + ")");
        }
    }
    return bad;
}

} // namespace bsch
