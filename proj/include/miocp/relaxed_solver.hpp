#pragma once

#include <Eigen/Dense>
#include <vector>

#include "miocp/integrator.hpp"
#include "miocp/model.hpp"
#include "miocp/rounding.hpp"
#include "miocp/time_grid.hpp"

namespace miocp {

/* Euclidean projection onto the unit simplex {x >= 0, sum x = 1} by the
 * sort-and-threshold rule.  Exact zeros in the inactive coordinates. */
Eigen::VectorXd simplex_project(const Eigen::VectorXd& v);

/* Euclidean projection onto {x >= 0, sum x <= 1} (the simplex with the cap
 * inactive when clamping already lands inside). */
Eigen::VectorXd simplex_cap_project(const Eigen::VectorXd& v);

struct RelaxedSolveOptions {
    double kkt_tol = 1e-6;
    int max_iters = 500;
    double integrate_tol = 1e-6;   // tolerance of the reported trajectory
    double armijo_c = 1e-4;        // sufficient-decrease constant
    int max_line_search = 60;      // step halvings per iteration
    IntegrateOptions integrate;    // substep layout search
    /* Optimize (omega, alpha_1..alpha_{N-1}) with alpha_N eliminated via the
     * simplex equality instead of projecting full rows.  Same optimizers up
     * to conditioning; kept selectable for comparison. */
    bool eliminate_last_mode = false;
};

struct RelaxedSolveResult {
    RelaxedControl control;
    Trajectory trajectory;        // re-integrated adaptively at integrate_tol
    double objective = 0.0;       // evaluate_cost on that trajectory
    double kkt_residual = 0.0;    // ||x - P(x - grad)||_inf at the final iterate
    double trajectory_accuracy = 0.0;
    int iterations = 0;
    bool converged = false;
    bool line_search_stalled = false;
    std::vector<double> objective_history;  // accepted fixed-scheme objectives
};

/* Projected gradient descent with Armijo backtracking on the discrete
 * objective.  The substep scheme is frozen from an adaptive integration of
 * the start point, so the objective the line search sees is a fixed smooth
 * function; feasibility (simplex rows, control box) holds at every iterate. */
RelaxedSolveResult solve_relaxed(const SemilinearModel& model, const TimeGrid& grid,
                                 const RelaxedControl& start, const RelaxedSolveOptions& opts = {});

/* Piecewise-constant injection of a control onto a refinement of its grid
 * (each fine cell takes the row of the coarse cell containing its midpoint). */
RelaxedControl inject_control(const RelaxedControl& rc, const TimeGrid& fine);

/* Uniform start point: omega = 0 clamped to the control box, alpha = 1/N. */
RelaxedControl uniform_start(const SemilinearModel& model, const TimeGrid& grid);

}  // namespace miocp
