#pragma once

#include <Eigen/Dense>
#include <vector>

#include "miocp/time_grid.hpp"

namespace miocp {

/* Relaxed control on a grid: per-cell ordinary controls omega (cells x m,
 * m >= 0) and convex mode multipliers alpha (cells x N, rows in the unit
 * simplex). */
struct RelaxedControl {
    TimeGrid grid;
    Eigen::MatrixXd omega;
    Eigen::MatrixXd alpha;

    Eigen::Index n_controls() const { return omega.cols(); }
    Eigen::Index n_modes() const { return alpha.cols(); }
};

/* Binary mode selection: exactly one active mode per cell, stored as the mode
 * index.  Ordinary controls are carried through rounding unchanged. */
struct BinaryControl {
    TimeGrid grid;
    int n_modes = 1;
    std::vector<int> mode;
    Eigen::MatrixXd omega;

    double beta(std::size_t cell, int i) const { return mode[cell] == i ? 1.0 : 0.0; }
    Eigen::MatrixXd beta_matrix() const;
};

struct DeviationReport {
    Eigen::VectorXd per_mode_max;  // sup_t |integral of (alpha_i - beta_i)|
    double overall_max = 0.0;
    double bound = 0.0;  // (N - 1) * dt_max
};

/* Validates and canonicalizes a relaxed control in place.
 * Rows of alpha must lie within 1e-9 of the unit simplex: entries are clamped
 * to [0,1] and the sum residual is assigned to the largest entry.  Anything
 * farther off is rejected, not renormalized.  Throws ValidationError. */
void canonicalize_relaxed(RelaxedControl& rc);

/* Sum-up rounding of row-stochastic mode weights: cell j receives the mode
 * with the largest accumulated deficit
 *   p_hat_{i,j} = integral of alpha_i over [t_0, t_{j+1}]
 *               - sum of already assigned dt_l for mode i,
 * ties broken toward the smallest mode index.  Deterministic. */
std::vector<int> sur_mode_sequence(const Eigen::MatrixXd& alpha, const TimeGrid& grid);

BinaryControl sur_round(const RelaxedControl& rc);

/* Running integral of alpha - beta, evaluated at every grid node with
 * compensated summation.  The integrand is piecewise constant, so node values
 * are the extrema of the piecewise-linear integral. */
DeviationReport accumulated_deviation(const RelaxedControl& rc, const BinaryControl& bc);

}  // namespace miocp
