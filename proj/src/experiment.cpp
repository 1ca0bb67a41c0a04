#include "miocp/experiment.hpp"

#include <array>
#include <fstream>
#include <sstream>
#include <vector>

#include "miocp/csv_io.hpp"
#include "miocp/errors.hpp"

namespace miocp {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& v, std::size_t line_no) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ValidationError("line " + std::to_string(line_no) + ": '" + v + "' is not a number");
    }
}

long to_long(const std::string& v, std::size_t line_no) {
    try {
        std::size_t used = 0;
        const long l = std::stol(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return l;
    } catch (const std::exception&) {
        throw ValidationError("line " + std::to_string(line_no) + ": '" + v + "' is not an integer");
    }
}

std::array<long, 3> parse_budget(const std::string& v, std::size_t line_no) {
    std::istringstream is(v);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(is, part, ',')) parts.push_back(trim(part));
    if (parts.size() != 3)
        throw ValidationError("line " + std::to_string(line_no) +
                              ": budget must be 'from,to,max_switches'");
    return {to_long(parts[0], line_no), to_long(parts[1], line_no), to_long(parts[2], line_no)};
}

}  // namespace

ExperimentConfig parse_experiment_config(std::istream& is) {
    ExperimentConfig cfg;
    std::string line, section;
    std::size_t line_no = 0;

    while (std::getline(is, line)) {
        ++line_no;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        if (s.front() == '[' && s.back() == ']') {
            section = trim(s.substr(1, s.size() - 2));
            if (section != "algorithm" && section != "heat2d" && section != "lotka_volterra")
                throw ValidationError("line " + std::to_string(line_no) + ": unknown section [" +
                                      section + "]");
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ValidationError("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(s.substr(0, eq));
        const std::string val = trim(s.substr(eq + 1));
        const auto bad_key = [&]() -> ValidationError {
            return ValidationError("line " + std::to_string(line_no) + ": unknown key '" + key +
                                   "' in section [" + section + "]");
        };

        if (section.empty()) {
            if (key == "model") {
                if (val != "heat2d" && val != "lotka_volterra")
                    throw ValidationError("line " + std::to_string(line_no) +
                                          ": model must be heat2d or lotka_volterra");
                cfg.model = val;
            } else if (key == "t_final") {
                cfg.t_final = to_double(val, line_no);
                if (!(cfg.t_final > 0))
                    throw ValidationError("line " + std::to_string(line_no) +
                                          ": t_final must be positive");
            } else if (key == "initial_cells") {
                cfg.initial_cells = static_cast<int>(to_long(val, line_no));
                if (cfg.initial_cells < 1)
                    throw ValidationError("line " + std::to_string(line_no) +
                                          ": initial_cells must be at least 1");
            } else if (key == "mode") {
                if (val != "sur" && val != "minmax")
                    throw ValidationError("line " + std::to_string(line_no) +
                                          ": mode must be sur or minmax");
                cfg.rounding = val;
            } else if (key == "seed") {
                cfg.seed = static_cast<std::uint64_t>(to_long(val, line_no));
            } else if (key == "out") {
                cfg.out_dir = val;
            } else if (key == "warm_start") {
                cfg.warm_start_csv = val;
            } else {
                throw bad_key();
            }
        } else if (section == "algorithm") {
            if (key == "epsilon")
                cfg.algorithm.epsilon = to_double(val, line_no);
            else if (key == "refinements")
                cfg.algorithm.refinements = static_cast<int>(to_long(val, line_no));
            else if (key == "eps0")
                cfg.algorithm.eps0 = to_double(val, line_no);
            else if (key == "eps_factor")
                cfg.algorithm.eps_factor = to_double(val, line_no);
            else if (key == "max_iters")
                cfg.algorithm.solver.max_iters = static_cast<int>(to_long(val, line_no));
            else if (key == "eliminate_last_mode")
                cfg.algorithm.solver.eliminate_last_mode = to_long(val, line_no) != 0;
            else if (key == "minmax_max_nodes")
                cfg.algorithm.minmax.max_nodes = static_cast<std::uint64_t>(to_long(val, line_no));
            else if (key == "budget")
                cfg.budgets.push_back(parse_budget(val, line_no));
            else
                throw bad_key();
        } else if (section == "heat2d") {
            if (key == "nx")
                cfg.heat.nx = static_cast<int>(to_long(val, line_no));
            else if (key == "ny")
                cfg.heat.ny = static_cast<int>(to_long(val, line_no));
            else if (key == "diffusivity")
                cfg.heat.diffusivity = to_double(val, line_no);
            else if (key == "actuator_eps")
                cfg.heat.actuator_eps = to_double(val, line_no);
            else if (key == "lambda_state")
                cfg.heat.lambda_state = to_double(val, line_no);
            else if (key == "lambda_control")
                cfg.heat.lambda_control = to_double(val, line_no);
            else if (key == "initial_scale")
                cfg.heat.initial_scale = to_double(val, line_no);
            else
                throw bad_key();
        } else {  // lotka_volterra
            if (key == "n")
                cfg.lotka.n = static_cast<int>(to_long(val, line_no));
            else if (key == "d1")
                cfg.lotka.d1 = to_double(val, line_no);
            else if (key == "d2")
                cfg.lotka.d2 = to_double(val, line_no);
            else if (key == "a1")
                cfg.lotka.a1 = to_double(val, line_no);
            else if (key == "a2")
                cfg.lotka.a2 = to_double(val, line_no);
            else if (key == "b1")
                cfg.lotka.b1 = to_double(val, line_no);
            else if (key == "b2")
                cfg.lotka.b2 = to_double(val, line_no);
            else if (key == "c1")
                cfg.lotka.c1 = to_double(val, line_no);
            else if (key == "c2")
                cfg.lotka.c2 = to_double(val, line_no);
            else if (key == "init_eps")
                cfg.lotka.init_eps = to_double(val, line_no);
            else if (key == "uniform_initial") {
                std::istringstream ss(val);
                std::string z1, z2;
                if (!std::getline(ss, z1, ',') || !std::getline(ss, z2))
                    throw ValidationError("line " + std::to_string(line_no) +
                                          ": uniform_initial must be 'z1,z2'");
                cfg.lotka.uniform_initial = {to_double(trim(z1), line_no),
                                             to_double(trim(z2), line_no)};
            } else {
                throw bad_key();
            }
        }
    }
    return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot open config file " + path.string());
    return parse_experiment_config(is);
}

ExperimentConfig preset_config(const std::string& name) {
    ExperimentConfig cfg;
    if (name == "heat") {
        cfg.model = "heat2d";
        cfg.out_dir = "out/heat";
        cfg.algorithm.epsilon = 1e-6;
    } else if (name == "lotka") {
        cfg.model = "lotka_volterra";
        cfg.t_final = 12.0;
        cfg.initial_cells = 6;
        cfg.out_dir = "out/lotka";
        cfg.algorithm.epsilon = 1e-6;
    } else {
        throw ValidationError("unknown preset '" + name + "' (have: heat, lotka)");
    }
    return cfg;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["model"] = cfg.model;
    j["t_final"] = cfg.t_final;
    j["initial_cells"] = cfg.initial_cells;
    j["mode"] = cfg.rounding;
    j["seed"] = cfg.seed;
    j["out"] = cfg.out_dir;
    if (!cfg.warm_start_csv.empty()) j["warm_start"] = cfg.warm_start_csv;
    j["algorithm"] = {{"epsilon", cfg.algorithm.epsilon},
                      {"refinements", cfg.algorithm.refinements},
                      {"eps0", cfg.algorithm.eps0},
                      {"eps_factor", cfg.algorithm.eps_factor},
                      {"max_iters", cfg.algorithm.solver.max_iters},
                      {"eliminate_last_mode", cfg.algorithm.solver.eliminate_last_mode},
                      {"minmax_max_nodes", cfg.algorithm.minmax.max_nodes}};
    for (const auto& b : cfg.budgets)
        j["algorithm"]["budgets"].push_back({b[0], b[1], b[2]});
    if (cfg.model == "heat2d") {
        j["heat2d"] = {{"nx", cfg.heat.nx},
                       {"ny", cfg.heat.ny},
                       {"diffusivity", cfg.heat.diffusivity},
                       {"actuator_eps", cfg.heat.actuator_eps},
                       {"lambda_state", cfg.heat.lambda_state},
                       {"lambda_control", cfg.heat.lambda_control},
                       {"initial_scale", cfg.heat.initial_scale}};
    } else {
        j["lotka_volterra"] = {{"n", cfg.lotka.n},     {"d1", cfg.lotka.d1}, {"d2", cfg.lotka.d2},
                               {"a1", cfg.lotka.a1},   {"a2", cfg.lotka.a2}, {"b1", cfg.lotka.b1},
                               {"b2", cfg.lotka.b2},   {"c1", cfg.lotka.c1}, {"c2", cfg.lotka.c2},
                               {"init_eps", cfg.lotka.init_eps}};
        if (cfg.lotka.uniform_initial)
            j["lotka_volterra"]["uniform_initial"] = {(*cfg.lotka.uniform_initial)[0],
                                                      (*cfg.lotka.uniform_initial)[1]};
    }
    return j;
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg_in) {
    ExperimentConfig cfg = cfg_in;
    if (cfg.model != "heat2d" && cfg.model != "lotka_volterra")
        throw ValidationError("unknown model family '" + cfg.model + "'");
    const SemilinearModel model =
        cfg.model == "heat2d" ? build_heat2d(cfg.heat) : build_lotka_volterra(cfg.lotka);
    const TimeGrid grid = TimeGrid::uniform(0.0, cfg.t_final, static_cast<std::size_t>(cfg.initial_cells));

    for (const auto& b : cfg.budgets)
        cfg.algorithm.budget.set(static_cast<int>(b[0]), static_cast<int>(b[1]), b[2]);
    if (!cfg.warm_start_csv.empty())
        cfg.algorithm.initial_control = read_control_csv(cfg.warm_start_csv);

    ExperimentOutput out;
    out.result = cfg.rounding == "minmax" ? run_algorithm2(model, grid, cfg.algorithm)
                                          : run_algorithm1(model, grid, cfg.algorithm);
    out.out_dir = cfg.out_dir;

    const std::filesystem::path dir = cfg.out_dir;
    std::filesystem::create_directories(dir);
    auto emit = [&out](const std::filesystem::path& p) { out.files.push_back(p.string()); };

    write_history_csv(dir / "history.csv", out.result);
    emit(dir / "history.csv");

    if (!out.result.artifacts.empty()) {
        const IterationArtifacts& best = out.result.artifacts[out.result.best_index];
        write_control_csv(dir / "control_relaxed.csv", best.relaxed);
        emit(dir / "control_relaxed.csv");
        write_control_csv(dir / "control_integer.csv", best.integer);
        emit(dir / "control_integer.csv");
        write_trajectory_csv(dir / "trajectory_relaxed.csv", best.relaxed_trajectory);
        write_trajectory_sidecar(dir / "trajectory_relaxed.csv", model, best.relaxed_trajectory);
        emit(dir / "trajectory_relaxed.csv");
        write_trajectory_csv(dir / "trajectory_integer.csv", best.integer_trajectory);
        write_trajectory_sidecar(dir / "trajectory_integer.csv", model, best.integer_trajectory);
        emit(dir / "trajectory_integer.csv");
        write_state_norm_csv(dir / "state_norm_relaxed.csv", model, best.relaxed_trajectory);
        emit(dir / "state_norm_relaxed.csv");
        write_state_norm_csv(dir / "state_norm_integer.csv", model, best.integer_trajectory);
        emit(dir / "state_norm_integer.csv");
    }

    nlohmann::json manifest;
    manifest["config"] = config_to_json(cfg_in);
    manifest["reason"] = stop_reason_label(out.result.reason, out.result.budget_variant);
    manifest["best_iteration"] = out.result.best_index;
    for (const RunRecord& rec : out.result.history) {
        nlohmann::json row = {{"k", rec.k},
                              {"dt_max", rec.dt_max},
                              {"eps_k", rec.eps_k},
                              {"J_rel", rec.j_relaxed},
                              {"J_int", rec.j_integer},
                              {"switches", rec.total_switches},
                              {"deviation_max", rec.deviation.overall_max},
                              {"deviation_bound", rec.deviation.bound}};
        if (out.result.budget_variant) row["J_sub"] = rec.j_sub;
        if (rec.reason) row["reason"] = stop_reason_label(*rec.reason, out.result.budget_variant);
        manifest["history"].push_back(row);
    }
    manifest["files"] = out.files;
    {
        std::ofstream os(dir / "manifest.json");
        if (!os) throw ValidationError("cannot write manifest.json");
        os << manifest.dump(2) << "\n";
        emit(dir / "manifest.json");
    }
    return out;
}

}  // namespace miocp
