#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "miocp/combinatorics.hpp"
#include "miocp/integrator.hpp"
#include "miocp/model.hpp"
#include "miocp/relaxed_solver.hpp"
#include "miocp/rounding.hpp"
#include "miocp/time_grid.hpp"

namespace miocp {

enum class StopReason {
    binary_relaxed,     // relaxed solution already binary at tolerance ("step4" / "step4'")
    cost_gap,           // |J_rel - J| within tolerance ("step7")
    minmax_stagnation,  // min-max objective stopped improving ("step7'")
    iteration_cap       // refinement budget exhausted ("cap")
};

/* CSV spelling of a stop reason; the budget-constrained driver uses the
 * primed step names. */
std::string stop_reason_label(StopReason reason, bool budget_variant);

struct AlgorithmConfig {
    double epsilon = 1e-3;  // overall tolerance of the outer loop
    int refinements = 3;    // outer iterations attempted (= history rows)
    double eps0 = 1e-2;     // accuracy schedule eps_k = eps0 * eps_factor^k
    double eps_factor = 0.5;
    RelaxedSolveOptions solver;  // per-iteration base; tolerances come from the schedule
    SwitchBudget budget;         // only the budget-constrained driver reads this
    MinMaxOptions minmax;
    bool keep_artifacts = true;
    /* Warm start for the first iteration, injected cell-wise onto the initial
     * grid; later iterations warm start from the previous solution.  Absent:
     * omega = 0 (clamped), alpha = 1/N. */
    std::optional<RelaxedControl> initial_control;
};

struct RunRecord {
    int k = 0;
    double dt_max = 0.0;
    double eps_k = 0.0;      // reported accuracy: KKT residual + trajectory accuracy
    double j_relaxed = 0.0;
    double j_integer = 0.0;
    double j_sub = std::numeric_limits<double>::quiet_NaN();  // min-max objective (budget driver)
    long total_switches = 0;
    DeviationReport deviation;
    std::optional<StopReason> reason;  // set on the final record only
};

struct IterationArtifacts {
    RelaxedControl relaxed;
    BinaryControl integer;
    Trajectory relaxed_trajectory;
    Trajectory integer_trajectory;
};

struct DriverResult {
    std::vector<RunRecord> history;
    std::vector<IterationArtifacts> artifacts;  // parallel to history when kept
    StopReason reason = StopReason::iteration_cap;
    std::size_t best_index = 0;  // record with the smallest integer-control cost
    bool budget_variant = false;
};

/* Outer relaxation loop with sum-up rounding: solve the relaxed problem to
 * the scheduled accuracy, round, integrate, and bisect the control grid until
 * the relaxed solution is binary, the cost gap closes, or the refinement
 * budget runs out.  Warm starts are injected across refinements. */
DriverResult run_algorithm1(const SemilinearModel& model, const TimeGrid& initial_grid,
                            const AlgorithmConfig& config);

/* Budget-constrained variant: rounding goes through the min-max deviation
 * problem under the switch budgets; stops additionally when the attained
 * min-max objective stagnates between refinements.  Every returned control
 * satisfies the budgets by construction (audited). */
DriverResult run_algorithm2(const SemilinearModel& model, const TimeGrid& initial_grid,
                            const AlgorithmConfig& config);

}  // namespace miocp
