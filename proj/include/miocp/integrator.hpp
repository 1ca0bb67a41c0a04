#pragma once

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <vector>

#include "miocp/model.hpp"
#include "miocp/time_grid.hpp"

namespace miocp {

/* Number of integration substeps inside each control cell. */
struct SubstepScheme {
    std::vector<int> per_cell;

    static SubstepScheme constant(std::size_t cells, int substeps);
    SubstepScheme doubled() const;
};

struct IntegrateOptions {
    int initial_substeps = 4;
    int max_doublings = 16;
    std::size_t max_state_bytes = std::size_t(1) << 30;  // cap on stored substep states
};

struct ControlGradient {
    double cost = 0.0;
    Eigen::MatrixXd d_omega;  // cells x m
    Eigen::MatrixXd d_alpha;  // cells x N
};

/* One-step theta scheme on a frozen substep layout:
 *
 *   (I - h*theta*A) z_{s+1} = (I + h*(1-theta)*A) z_s + h * F(t_mid, z*, u)
 *
 * with theta = 1/2 and F the convex mode combination treated explicitly at
 * the substep midpoint.  For state-dependent modes z* is a predictor half
 * step (I - h*theta*A) z* = z_s + (h/2) F(t_s, z_s, u); otherwise z* = z_s
 * suffices.  Both stages reuse the same implicit factor, prefactored per
 * distinct substep size, so repeated forward/adjoint sweeps on the same
 * scheme (the inner solver loop) reuse the factorizations, and the scheme is
 * second order in the substep size.  The gradient is the exact derivative of
 * this two-stage recursion together with the per-substep trapezoidal running
 * cost.
 *
 * Instances hold mutable solver caches; do not share across threads. */
class SchemeIntegrator {
public:
    SchemeIntegrator(const SemilinearModel& model, const TimeGrid& grid, SubstepScheme scheme);
    ~SchemeIntegrator();

    /* weights: cells x N mode coefficients (not validated here; deliberately
     * accepts off-simplex rows so finite differences stay well-defined). */
    Trajectory forward(const Eigen::MatrixXd& omega, const Eigen::MatrixXd& weights) const;

    ControlGradient gradient(const Eigen::MatrixXd& omega, const Eigen::MatrixXd& weights) const;

    const TimeGrid& grid() const { return grid_; }
    const SubstepScheme& scheme() const { return scheme_; }

private:
    struct Impl;
    const SemilinearModel& model_;
    TimeGrid grid_;
    SubstepScheme scheme_;
    std::unique_ptr<Impl> impl_;
};

/* Integrates with the default substep count, doubling every cell until the
 * step-halving estimate max_t ||z_h - z_{h/2}|| (weighted norm, shared nodes)
 * drops to tol.  Returns the finer trajectory with .accuracy set to the
 * estimate.  Throws ComputationError if the cap is hit, ValidationError on
 * malformed weights.  used_scheme, when non-null, receives the accepted
 * scheme. */
Trajectory integrate(const SemilinearModel& model, const TimeGrid& grid,
                     const Eigen::MatrixXd& omega, const Eigen::MatrixXd& weights, double tol,
                     const IntegrateOptions& opts = {}, SubstepScheme* used_scheme = nullptr);

/* phi(z(T)) plus the per-substep trapezoidal running cost, each substep using
 * its cell's omega.  The trajectory must have been produced on this grid. */
double evaluate_cost(const SemilinearModel& model, const Trajectory& traj, const TimeGrid& grid,
                     const Eigen::MatrixXd& omega);

/* Exact discrete gradient of forward+evaluate_cost on the given scheme via
 * the adjoint recursion. */
ControlGradient adjoint_gradient(const SemilinearModel& model, const TimeGrid& grid,
                                 const SubstepScheme& scheme, const Eigen::MatrixXd& omega,
                                 const Eigen::MatrixXd& weights);

/* Minimum of g over trajectory nodes; the overload with constants adds the
 * relaxation-transfer bound max_t zeta(t) * (C1 eps + C2 (N-1) dt). */
ConstraintReport check_state_constraint(const Trajectory& traj, const StateConstraint& constraint);

}  // namespace miocp
