#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "miocp/combinatorics.hpp"
#include "miocp/csv_io.hpp"
#include "miocp/errors.hpp"
#include "miocp/experiment.hpp"
#include "miocp/rounding.hpp"
#include "miocp/verify.hpp"

namespace fs = std::filesystem;

namespace {

std::array<long, 3> parse_budget_flag(const std::string& text) {
    std::array<long, 3> entry{};
    std::istringstream is(text);
    std::string part;
    int idx = 0;
    while (std::getline(is, part, ',')) {
        if (idx == 3) break;
        std::size_t used = 0;
        entry[static_cast<std::size_t>(idx++)] = std::stol(part, &used);
        if (used != part.size()) throw miocp::ValidationError("--budget: bad number '" + part + "'");
    }
    if (idx != 3 || is.rdbuf()->in_avail() > 0)
        throw miocp::ValidationError("--budget expects from,to,max, got '" + text + "'");
    return entry;
}

int cmd_round(const std::string& input, const std::string& out_dir, const std::string& mode,
              const std::vector<std::string>& budget_flags) {
    const miocp::RelaxedControl rc = miocp::read_control_csv(input);

    miocp::BinaryControl bc;
    if (mode == "sur") {
        bc = miocp::sur_round(rc);
    } else {
        miocp::SwitchBudget budget;
        for (const std::string& text : budget_flags) {
            const auto [from, to, cap] = parse_budget_flag(text);
            budget.set(static_cast<int>(from), static_cast<int>(to), cap);
        }
        const miocp::MinMaxSolution sol =
            miocp::solve_minmax(miocp::cell_averages(rc), rc.grid, budget);
        bc = sol.control;
        bc.omega = rc.omega;
        std::cout << "min-max objective " << sol.objective
                  << (sol.optimal ? "" : " (node cap hit, best incumbent)") << "\n";
    }

    const miocp::DeviationReport dev = miocp::accumulated_deviation(rc, bc);
    fs::create_directories(out_dir);
    const fs::path control_path = fs::path(out_dir) / "control_integer.csv";
    const fs::path report_path = fs::path(out_dir) / "deviation.csv";
    miocp::write_control_csv(control_path, bc);
    std::ofstream report(report_path);
    report << "mode,sup_deviation,bound\n";
    report.precision(17);
    for (Eigen::Index i = 0; i < dev.per_mode_max.size(); ++i)
        report << (i + 1) << "," << dev.per_mode_max(i) << "," << dev.bound << "\n";

    std::cout << "wrote " << control_path.string() << " and " << report_path.string()
              << "\nmax accumulated deviation " << dev.overall_max << " (bound " << dev.bound
              << ")\n";
    return 0;
}

int cmd_experiment(miocp::ExperimentConfig cfg) {
    const miocp::ExperimentOutput out = miocp::run_experiment(cfg);
    std::cout << "k,dt_max,J_rel,J_int\n";
    std::cout.precision(10);
    for (const miocp::RunRecord& rec : out.result.history)
        std::cout << rec.k << "," << rec.dt_max << "," << rec.j_relaxed << "," << rec.j_integer
                  << "\n";
    std::cout << "stopped: " << miocp::stop_reason_label(out.result.reason,
                                                         out.result.budget_variant)
              << ", best iteration " << out.result.best_index << "\n"
              << "artifacts in " << out.out_dir.string() << " (" << out.files.size()
              << " files, see manifest.json)\n";
    return 0;
}

int cmd_verify(const std::string& suite) {
    using Check = miocp::CheckResult (*)();
    static const std::map<std::string, Check> suites = {
        {"rounding", miocp::check_rounding_bound},
        {"minmax", miocp::check_minmax_equivalence},
        {"budget", miocp::check_budget_compliance},
        {"gradient", miocp::check_gradients},
        {"estimate", miocp::check_scalar_family_bound},
        {"integrator", miocp::check_integrator},
        {"bounds", miocp::check_bound_formulas},
        {"heat", miocp::check_heat_refinement},
        {"lotka", miocp::check_lotka_refinement},
    };
    if (suite == "all") {
        const std::vector<miocp::CheckResult> results = miocp::run_acceptance(std::cout);
        for (const miocp::CheckResult& r : results)
            if (!r.passed) return 1;
        return 0;
    }
    const miocp::CheckResult r = suites.at(suite)();
    std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << "\n";
    return r.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Integer-feasible controls for switched evolution systems"};
    app.require_subcommand(1);

    std::string round_input, round_out = "out", round_mode = "sur";
    std::vector<std::string> round_budgets;
    CLI::App* round = app.add_subcommand("round", "Round a relaxed control CSV");
    round->add_option("input", round_input, "relaxed control CSV")->required();
    round->add_option("--out", round_out, "output directory");
    round->add_option("--mode", round_mode, "rounding rule")
        ->check(CLI::IsMember({"sur", "minmax"}));
    round->add_option("--budget", round_budgets, "from,to,max transition cap (repeatable)");

    std::string exp_preset, exp_config, exp_out, exp_mode, exp_warm;
    std::vector<std::string> exp_budgets;
    std::uint64_t exp_seed = 0;
    int exp_refinements = 0;
    double exp_epsilon = 0.0;
    CLI::App* experiment = app.add_subcommand("experiment", "Run a refinement study");
    experiment->add_option("name", exp_preset, "preset: heat | lotka");
    CLI::Option* opt_config = experiment->add_option("--config", exp_config, "config file");
    CLI::Option* opt_out = experiment->add_option("--out", exp_out, "output directory");
    CLI::Option* opt_seed = experiment->add_option("--seed", exp_seed, "recorded RNG seed");
    CLI::Option* opt_mode = experiment->add_option("--mode", exp_mode, "rounding rule")
                                ->check(CLI::IsMember({"sur", "minmax"}));
    CLI::Option* opt_budget =
        experiment->add_option("--budget", exp_budgets, "from,to,max (repeatable)");
    CLI::Option* opt_refine =
        experiment->add_option("--refinements", exp_refinements, "outer iterations")
            ->check(CLI::PositiveNumber);
    CLI::Option* opt_eps = experiment->add_option("--epsilon", exp_epsilon, "outer tolerance")
                               ->check(CLI::PositiveNumber);
    CLI::Option* opt_warm =
        experiment->add_option("--warm-start", exp_warm, "relaxed control CSV");

    std::string suite = "all";
    CLI::App* verify = app.add_subcommand("verify", "Run acceptance checks");
    verify->add_option("suite", suite, "which suite (default all)")
        ->check(CLI::IsMember({"all", "rounding", "minmax", "budget", "gradient", "estimate",
                               "integrator", "bounds", "heat", "lotka"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // exit 2: invalid input
    }

    try {
        if (round->parsed()) return cmd_round(round_input, round_out, round_mode, round_budgets);
        if (experiment->parsed()) {
            if (exp_preset.empty() == exp_config.empty())
                throw miocp::ValidationError(
                    "experiment needs a preset name or --config, not both");
            miocp::ExperimentConfig cfg = exp_config.empty()
                                              ? miocp::preset_config(exp_preset)
                                              : miocp::load_experiment_config(exp_config);
            if (*opt_out) cfg.out_dir = exp_out;
            if (*opt_seed) cfg.seed = exp_seed;
            if (*opt_mode) cfg.rounding = exp_mode;
            if (*opt_budget) {
                cfg.budgets.clear();
                for (const std::string& text : exp_budgets)
                    cfg.budgets.push_back(parse_budget_flag(text));
            }
            if (*opt_refine) cfg.algorithm.refinements = exp_refinements;
            if (*opt_eps) cfg.algorithm.epsilon = exp_epsilon;
            if (*opt_warm) cfg.warm_start_csv = exp_warm;
            (void)opt_config;
            return cmd_experiment(std::move(cfg));
        }
        return cmd_verify(suite);
    } catch (const miocp::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
