#include "miocp/driver.hpp"

#include <cmath>
#include <limits>

#include "miocp/errors.hpp"

namespace miocp {

namespace {

constexpr double kBinaryTol = 1e-9;

bool is_binary(const Eigen::MatrixXd& alpha, double tol) {
    for (Eigen::Index j = 0; j < alpha.rows(); ++j)
        for (Eigen::Index i = 0; i < alpha.cols(); ++i) {
            const double a = alpha(j, i);
            if (std::abs(a) > tol && std::abs(a - 1.0) > tol) return false;
        }
    return true;
}

std::vector<int> snap_modes(const Eigen::MatrixXd& alpha) {
    std::vector<int> modes(static_cast<std::size_t>(alpha.rows()));
    for (Eigen::Index j = 0; j < alpha.rows(); ++j) {
        Eigen::Index best;
        alpha.row(j).maxCoeff(&best);
        modes[static_cast<std::size_t>(j)] = static_cast<int>(best);
    }
    return modes;
}

long total_switches(const BinaryControl& bc) {
    long s = 0;
    for (std::size_t l = 0; l + 1 < bc.mode.size(); ++l)
        if (bc.mode[l] != bc.mode[l + 1]) ++s;
    return s;
}

void validate_config(const AlgorithmConfig& c) {
    if (!(c.epsilon > 0)) throw ValidationError("outer tolerance must be positive");
    if (c.refinements < 1) throw ValidationError("need at least one outer iteration");
    if (!(c.eps0 > 0)) throw ValidationError("accuracy schedule must start positive");
    if (!(c.eps_factor > 0) || !(c.eps_factor < 1))
        throw ValidationError("accuracy schedule factor must lie in (0,1)");
}

struct Iteration {
    RelaxedSolveResult relaxed;
    double eps_k = 0.0;
};

Iteration solve_iteration(const SemilinearModel& model, const TimeGrid& grid,
                          const RelaxedControl& warm, const AlgorithmConfig& config, int k) {
    const double eps_target = config.eps0 * std::pow(config.eps_factor, k);
    RelaxedSolveOptions opts = config.solver;
    opts.kkt_tol = 0.5 * eps_target;
    opts.integrate_tol = 0.5 * eps_target;
    Iteration it;
    it.relaxed = solve_relaxed(model, grid, warm, opts);
    it.eps_k = it.relaxed.kkt_residual + it.relaxed.trajectory_accuracy;
    return it;
}

DriverResult run_outer(const SemilinearModel& model, const TimeGrid& initial_grid,
                       const AlgorithmConfig& config, bool budget_variant) {
    validate_model(model);
    validate_config(config);

    DriverResult out;
    out.budget_variant = budget_variant;

    TimeGrid grid = initial_grid;
    RelaxedControl warm = config.initial_control ? inject_control(*config.initial_control, grid)
                                                 : uniform_start(model, grid);
    double prev_j_sub = std::numeric_limits<double>::quiet_NaN();
    bool stopped = false;

    for (int k = 0; k < config.refinements && !stopped; ++k) {
        Iteration it = solve_iteration(model, grid, warm, config, k);
        const RelaxedSolveResult& rel = it.relaxed;

        RunRecord rec;
        rec.k = k;
        rec.dt_max = grid.dt_max();
        rec.eps_k = it.eps_k;
        rec.j_relaxed = rel.objective;

        IterationArtifacts art;
        art.relaxed = rel.control;
        art.relaxed_trajectory = rel.trajectory;

        const bool binary = is_binary(rel.control.alpha, kBinaryTol);
        BinaryControl bc;

        if (binary && it.eps_k <= config.epsilon) {
            bc = BinaryControl{grid, model.n_modes, snap_modes(rel.control.alpha),
                               rel.control.omega};
            if (!budget_variant || budget_feasible(bc.mode, config.budget)) {
                // already integer at tolerance: reuse the relaxed trajectory
                rec.j_integer = rel.objective;
                rec.deviation = accumulated_deviation(rel.control, bc);
                if (budget_variant) rec.j_sub = minmax_objective(rel.control.alpha, grid, bc.mode);
                rec.total_switches = total_switches(bc);
                rec.reason = StopReason::binary_relaxed;
                out.reason = StopReason::binary_relaxed;
                art.integer = bc;
                art.integer_trajectory = rel.trajectory;
                out.history.push_back(std::move(rec));
                if (config.keep_artifacts) out.artifacts.push_back(std::move(art));
                stopped = true;
                break;
            }
            // binary but over budget: fall through to the min-max rounding
        }

        if (budget_variant) {
            MinMaxSolution mm =
                solve_minmax(cell_averages(rel.control), grid, config.budget, config.minmax);
            bc = std::move(mm.control);
            bc.omega = rel.control.omega;
            rec.j_sub = mm.objective;
            for (const auto& [pair, limit] : config.budget.entries())
                if (switch_count(bc, pair.first, pair.second) > limit)
                    throw ComputationError("min-max rounding violated a switch budget");
        } else {
            bc = sur_round(rel.control);
        }

        rec.deviation = accumulated_deviation(rel.control, bc);
        rec.total_switches = total_switches(bc);

        const double eps_target = config.eps0 * std::pow(config.eps_factor, k);
        Trajectory traj_int = integrate(model, grid, bc.omega, bc.beta_matrix(),
                                        0.5 * eps_target, config.solver.integrate);
        rec.j_integer = evaluate_cost(model, traj_int, grid, bc.omega);

        art.integer = bc;
        art.integer_trajectory = std::move(traj_int);

        // stopping tests
        if (budget_variant) {
            if (k > 0 && std::abs(rec.j_sub - prev_j_sub) < config.epsilon) {
                rec.reason = StopReason::minmax_stagnation;
                out.reason = StopReason::minmax_stagnation;
                stopped = true;
            }
            prev_j_sub = rec.j_sub;
        } else {
            if (std::abs(rec.j_relaxed - rec.j_integer) <= 0.5 * config.epsilon &&
                it.eps_k <= 0.5 * config.epsilon) {
                rec.reason = StopReason::cost_gap;
                out.reason = StopReason::cost_gap;
                stopped = true;
            }
        }
        if (!stopped && k + 1 == config.refinements) {
            rec.reason = StopReason::iteration_cap;
            out.reason = StopReason::iteration_cap;
            stopped = true;
        }

        out.history.push_back(std::move(rec));
        if (config.keep_artifacts) out.artifacts.push_back(std::move(art));

        if (!stopped) {
            grid = refine_bisect(grid);
            warm = inject_control(rel.control, grid);
        }
    }

    out.best_index = 0;
    for (std::size_t i = 1; i < out.history.size(); ++i)
        if (out.history[i].j_integer < out.history[out.best_index].j_integer) out.best_index = i;
    return out;
}

}  // namespace

std::string stop_reason_label(StopReason reason, bool budget_variant) {
    switch (reason) {
        case StopReason::binary_relaxed:
            return budget_variant ? "step4'" : "step4";
        case StopReason::cost_gap:
            return "step7";
        case StopReason::minmax_stagnation:
            return "step7'";
        case StopReason::iteration_cap:
            return "cap";
    }
    return "cap";
}

DriverResult run_algorithm1(const SemilinearModel& model, const TimeGrid& initial_grid,
                            const AlgorithmConfig& config) {
    return run_outer(model, initial_grid, config, false);
}

DriverResult run_algorithm2(const SemilinearModel& model, const TimeGrid& initial_grid,
                            const AlgorithmConfig& config) {
    return run_outer(model, initial_grid, config, true);
}

}  // namespace miocp
