#include "bsch/config.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

namespace bsch {

using json = nlohmann::ordered_json;

Grid RunConfig::make_grid() const { return Grid(grid.nx, grid.ny, grid.lx, grid.ly); }

namespace {

Potential make_potential(const PotentialConfig& pc) {
    if (pc.kind == "logarithmic") {
        return Potential::logarithmic(pc.theta, pc.theta_c);
    }
    if (pc.kind == "quartic") {
        return Potential::quartic();
    }
    if (pc.kind == "double_obstacle") {
        return Potential::double_obstacle(pc.theta_c);
    }
    throw DomainError("unknown potential kind: " + pc.kind);
}

} // namespace

ModelParams RunConfig::make_model() const {
    ModelParams p;
    p.K = model.K;
    p.sigma = model.sigma;
    p.potential_bulk = make_potential(model.potential);
    p.potential_surf = make_potential(model.potential);
    p.yosida_eps = model.yosida_eps;
    p.yosida_rho = model.yosida_rho;
    return p;
}

StepperConfig RunConfig::make_stepper_config() const {
    StepperConfig c;
    c.dt = time.dt;
    c.newton_tol = solver.newton_tol;
    c.newton_max_iter = solver.newton_max_iter;
    c.linesearch_shrink = solver.linesearch_shrink;
    c.separation_guard = solver.separation_guard;
    c.linear.kind = solver.linear_kind == "bicgstab"
                        ? LinearSolverConfig::Kind::BiCGStab
                        : LinearSolverConfig::Kind::DirectSparse;
    c.linear.tol = solver.linear_tol;
    c.linear.max_iter = solver.linear_max_iter;
    return c;
}

RunSchedule RunConfig::make_schedule() const {
    RunSchedule s;
    s.records_per_unit_time = time.records_per_unit_time;
    s.snapshots = time.snapshots;
    s.stop_at_rate = time.stop_at_rate;
    return s;
}

namespace {

struct Checker {
    std::vector<std::string> issues;

    void require(bool ok, const std::string& path, const std::string& what) {
        if (!ok) {
            issues.push_back(path + ": " + what);
        }
    }
};

// Reads cfg[key] if present, complaining about wrong types with the path.
template <class T>
void get_to(Checker& ck, const json& obj, const std::string& path,
            const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
        obj.at(key).get_to(out);
    } catch (const json::exception&) {
        ck.issues.push_back(path + "." + key + ": wrong type");
    }
}

void get_opt(Checker& ck, const json& obj, const std::string& path,
             const char* key, std::optional<double>& out) {
    if (!obj.contains(key) || obj.at(key).is_null()) return;
    try {
        out = obj.at(key).get<double>();
    } catch (const json::exception&) {
        ck.issues.push_back(path + "." + key + ": wrong type");
    }
}

void check_known_keys(Checker& ck, const json& obj, const std::string& path,
                      std::initializer_list<const char*> known) {
    if (!obj.is_object()) {
        ck.issues.push_back(path + ": expected an object");
        return;
    }
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* k : known) {
            if (key == k) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            ck.issues.push_back(path + "." + key + ": unknown key");
        }
    }
}

void parse_potential(Checker& ck, const json& j, const std::string& path,
                     PotentialConfig& pc) {
    check_known_keys(ck, j, path, {"kind", "theta", "theta_c"});
    get_to(ck, j, path, "kind", pc.kind);
    get_to(ck, j, path, "theta", pc.theta);
    get_to(ck, j, path, "theta_c", pc.theta_c);
    const bool known = pc.kind == "logarithmic" || pc.kind == "quartic" ||
                       pc.kind == "double_obstacle";
    ck.require(known, path + ".kind",
               "must be logarithmic, quartic or double_obstacle");
    if (pc.kind == "logarithmic") {
        ck.require(pc.theta > 0.0, path + ".theta", "theta > 0 required");
        ck.require(pc.theta_c > 0.0, path + ".theta_c", "theta_c > 0 required");
    }
    if (pc.kind == "double_obstacle") {
        ck.require(pc.theta_c > 0.0, path + ".theta_c", "theta_c > 0 required");
    }
}

} // namespace

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        int line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError(e.what(), line, col);
    }

    RunConfig c;
    Checker ck;
    check_known_keys(ck, j, "config",
                     {"grid", "time", "model", "init", "solver", "output",
                      "sweep"});

    if (j.contains("grid")) {
        const auto& g = j["grid"];
        check_known_keys(ck, g, "grid", {"nx", "ny", "lx", "ly"});
        get_to(ck, g, "grid", "nx", c.grid.nx);
        get_to(ck, g, "grid", "ny", c.grid.ny);
        get_to(ck, g, "grid", "lx", c.grid.lx);
        get_to(ck, g, "grid", "ly", c.grid.ly);
    }
    ck.require(c.grid.nx >= 4, "grid.nx", "nx >= 4 required");
    ck.require(c.grid.ny >= 4, "grid.ny", "ny >= 4 required");
    ck.require(c.grid.lx > 0.0, "grid.lx", "lx > 0 required");
    ck.require(c.grid.ly > 0.0, "grid.ly", "ly > 0 required");

    if (j.contains("time")) {
        const auto& t = j["time"];
        check_known_keys(ck, t, "time",
                         {"dt", "t_end", "records_per_unit_time", "snapshots",
                          "stop_at_rate"});
        get_to(ck, t, "time", "dt", c.time.dt);
        get_to(ck, t, "time", "t_end", c.time.t_end);
        get_to(ck, t, "time", "records_per_unit_time",
               c.time.records_per_unit_time);
        get_to(ck, t, "time", "snapshots", c.time.snapshots);
        get_opt(ck, t, "time", "stop_at_rate", c.time.stop_at_rate);
    }
    ck.require(c.time.dt > 0.0, "time.dt", "dt > 0 required");
    ck.require(c.time.t_end >= 0.0, "time.t_end", "t_end >= 0 required");
    ck.require(c.time.records_per_unit_time > 0.0,
               "time.records_per_unit_time", "must be > 0");
    ck.require(c.time.snapshots >= 1, "time.snapshots", "must be >= 1");
    if (c.time.stop_at_rate) {
        ck.require(*c.time.stop_at_rate > 0.0, "time.stop_at_rate",
                   "must be > 0");
    }

    if (j.contains("model")) {
        const auto& m = j["model"];
        check_known_keys(ck, m, "model",
                         {"K", "sigma", "yosida_eps", "yosida_rho",
                          "potential"});
        get_to(ck, m, "model", "K", c.model.K);
        get_to(ck, m, "model", "sigma", c.model.sigma);
        get_opt(ck, m, "model", "yosida_eps", c.model.yosida_eps);
        get_to(ck, m, "model", "yosida_rho", c.model.yosida_rho);
        if (m.contains("potential")) {
            parse_potential(ck, m["potential"], "model.potential",
                            c.model.potential);
        }
    }
    ck.require(c.model.K >= 0.0, "model.K", "K >= 0 required");
    ck.require(c.model.sigma >= 0.0, "model.sigma", "sigma >= 0 required");
    if (c.model.yosida_eps) {
        ck.require(*c.model.yosida_eps > 0.0 && *c.model.yosida_eps < 1.0,
                   "model.yosida_eps", "must lie in (0,1)");
    }
    ck.require(c.model.yosida_rho >= 1.0, "model.yosida_rho",
               "must be >= 1");
    ck.require(c.model.potential.kind != "double_obstacle",
               "model.potential.kind",
               "the obstacle potential is a limit target, not steppable");

    if (j.contains("init")) {
        const auto& i = j["init"];
        check_known_keys(ck, i, "init",
                         {"kind", "mean_bulk", "mean_surf", "amplitude",
                          "seed", "position", "width"});
        get_to(ck, i, "init", "kind", c.init.kind);
        get_to(ck, i, "init", "mean_bulk", c.init.mean_bulk);
        get_to(ck, i, "init", "mean_surf", c.init.mean_surf);
        get_to(ck, i, "init", "amplitude", c.init.amplitude);
        get_to(ck, i, "init", "seed", c.init.seed);
        get_to(ck, i, "init", "position", c.init.position);
        get_to(ck, i, "init", "width", c.init.width);
    }
    {
        const bool known = c.init.kind == "constant" ||
                           c.init.kind == "seeded_noise" ||
                           c.init.kind == "two_phase_band";
        ck.require(known, "init.kind",
                   "must be constant, seeded_noise or two_phase_band");
        ck.require(std::abs(c.init.mean_bulk) < 1.0, "init.mean_bulk",
                   "mean must lie in (-1,1)");
        ck.require(std::abs(c.init.mean_surf) < 1.0, "init.mean_surf",
                   "mean must lie in (-1,1)");
        if (c.init.kind == "seeded_noise") {
            ck.require(c.init.amplitude > 0.0, "init.amplitude",
                       "must be > 0");
            const bool singular = c.model.potential.kind != "quartic";
            if (singular) {
                ck.require(std::abs(c.init.mean_bulk) + c.init.amplitude <=
                               0.999,
                           "init.amplitude",
                           "singular potential needs |mean|+amplitude <= "
                           "0.999");
                ck.require(std::abs(c.init.mean_surf) + c.init.amplitude <=
                               0.999,
                           "init.mean_surf",
                           "singular potential needs |mean|+amplitude <= "
                           "0.999");
            }
        }
        if (c.init.kind == "two_phase_band") {
            ck.require(c.init.width > 0.0, "init.width", "must be > 0");
            ck.require(c.init.position >= 0.0 && c.init.position <= 1.0,
                       "init.position", "fraction of ly in [0,1]");
        }
        if (c.model.K == 0.0 && c.init.kind == "constant") {
            ck.require(c.init.mean_bulk == c.init.mean_surf, "init.mean_surf",
                       "K = 0 identifies the trace with psi; constant data "
                       "needs mean_bulk == mean_surf");
        }
    }

    if (j.contains("solver")) {
        const auto& s = j["solver"];
        check_known_keys(ck, s, "solver",
                         {"newton_tol", "newton_max_iter", "linesearch_shrink",
                          "separation_guard", "linear"});
        get_to(ck, s, "solver", "newton_tol", c.solver.newton_tol);
        get_to(ck, s, "solver", "newton_max_iter", c.solver.newton_max_iter);
        get_to(ck, s, "solver", "linesearch_shrink",
               c.solver.linesearch_shrink);
        get_to(ck, s, "solver", "separation_guard",
               c.solver.separation_guard);
        if (s.contains("linear")) {
            const auto& l = s["linear"];
            check_known_keys(ck, l, "solver.linear",
                             {"kind", "tol", "max_iter"});
            get_to(ck, l, "solver.linear", "kind", c.solver.linear_kind);
            get_to(ck, l, "solver.linear", "tol", c.solver.linear_tol);
            get_to(ck, l, "solver.linear", "max_iter",
                   c.solver.linear_max_iter);
        }
    }
    ck.require(c.solver.newton_tol > 0.0, "solver.newton_tol", "must be > 0");
    ck.require(c.solver.newton_max_iter >= 1, "solver.newton_max_iter",
               "must be >= 1");
    ck.require(c.solver.linesearch_shrink > 0.0 &&
                   c.solver.linesearch_shrink < 1.0,
               "solver.linesearch_shrink", "must lie in (0,1)");
    ck.require(c.solver.separation_guard > 0.0 &&
                   c.solver.separation_guard < 1.0,
               "solver.separation_guard", "must lie in (0,1)");
    ck.require(c.solver.linear_kind == "direct" ||
                   c.solver.linear_kind == "bicgstab",
               "solver.linear.kind", "must be direct or bicgstab");
    ck.require(c.solver.linear_tol > 0.0, "solver.linear.tol", "must be > 0");
    ck.require(c.solver.linear_max_iter >= 1, "solver.linear.max_iter",
               "must be >= 1");

    if (j.contains("output")) {
        const auto& o = j["output"];
        check_known_keys(ck, o, "output", {"directory", "emit_plots"});
        get_to(ck, o, "output", "directory", c.output.directory);
        get_to(ck, o, "output", "emit_plots", c.output.emit_plots);
    }
    ck.require(!c.output.directory.empty(), "output.directory",
               "must not be empty");

    if (j.contains("sweep") && !j["sweep"].is_null()) {
        const auto& s = j["sweep"];
        SweepConfig sc;
        check_known_keys(ck, s, "sweep", {"param", "values", "t_end"});
        get_to(ck, s, "sweep", "param", sc.param);
        get_to(ck, s, "sweep", "values", sc.values);
        get_to(ck, s, "sweep", "t_end", sc.t_end);
        const bool known = sc.param == "theta" || sc.param == "K" ||
                           sc.param == "yosida_eps";
        ck.require(known, "sweep.param", "must be theta, K or yosida_eps");
        ck.require(!sc.values.empty(), "sweep.values", "must not be empty");
        for (std::size_t i = 0; i + 1 < sc.values.size(); ++i) {
            ck.require(sc.values[i] > sc.values[i + 1], "sweep.values",
                       "must decrease strictly toward the limit");
        }
        for (double v : sc.values) {
            if (sc.param == "theta") {
                ck.require(v > 0.0 && v <= 1.0, "sweep.values",
                           "theta sweep needs values in (0,1]");
            } else if (sc.param == "K") {
                ck.require(v >= 0.0, "sweep.values", "K >= 0 required");
            } else {
                ck.require(v > 0.0 && v < 1.0, "sweep.values",
                           "yosida_eps sweep needs values in (0,1)");
            }
        }
        if (sc.param == "theta") {
            ck.require(c.model.potential.kind == "logarithmic",
                       "sweep.param",
                       "theta sweep requires the logarithmic potential");
        }
        ck.require(sc.t_end > 0.0, "sweep.t_end", "must be > 0");
        c.sweep = sc;
    }

    if (!ck.issues.empty()) {
        throw ValidationError(std::move(ck.issues));
    }
    return c;
}

std::string emit_config(const RunConfig& c) {
    json j;
    j["grid"] = {{"nx", c.grid.nx},
                 {"ny", c.grid.ny},
                 {"lx", c.grid.lx},
                 {"ly", c.grid.ly}};
    j["time"] = {{"dt", c.time.dt},
                 {"t_end", c.time.t_end},
                 {"records_per_unit_time", c.time.records_per_unit_time},
                 {"snapshots", c.time.snapshots}};
    if (c.time.stop_at_rate) {
        j["time"]["stop_at_rate"] = *c.time.stop_at_rate;
    }
    j["model"] = {{"K", c.model.K},
                  {"sigma", c.model.sigma},
                  {"yosida_rho", c.model.yosida_rho},
                  {"potential",
                   {{"kind", c.model.potential.kind},
                    {"theta", c.model.potential.theta},
                    {"theta_c", c.model.potential.theta_c}}}};
    if (c.model.yosida_eps) {
        j["model"]["yosida_eps"] = *c.model.yosida_eps;
    }
    j["init"] = {{"kind", c.init.kind},
                 {"mean_bulk", c.init.mean_bulk},
                 {"mean_surf", c.init.mean_surf},
                 {"amplitude", c.init.amplitude},
                 {"seed", c.init.seed},
                 {"position", c.init.position},
                 {"width", c.init.width}};
    j["solver"] = {{"newton_tol", c.solver.newton_tol},
                   {"newton_max_iter", c.solver.newton_max_iter},
                   {"linesearch_shrink", c.solver.linesearch_shrink},
                   {"separation_guard", c.solver.separation_guard},
                   {"linear",
                    {{"kind", c.solver.linear_kind},
                     {"tol", c.solver.linear_tol},
                     {"max_iter", c.solver.linear_max_iter}}}};
    j["output"] = {{"directory", c.output.directory},
                   {"emit_plots", c.output.emit_plots}};
    if (c.sweep) {
        j["sweep"] = {{"param", c.sweep->param},
                      {"values", c.sweep->values},
                      {"t_end", c.sweep->t_end}};
    }
    return j.dump(2) + "\n";
}

RunConfig default_config() { return RunConfig{}; }

} // namespace bsch
