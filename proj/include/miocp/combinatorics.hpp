#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <utility>

#include "miocp/rounding.hpp"
#include "miocp/time_grid.hpp"

namespace miocp {

/* Caps on the number of direct transitions from one mode to another.  A pair
 * absent from the map is unconstrained.  Mode indices are 0-based. */
class SwitchBudget {
public:
    void set(int from, int to, long max_count);
    std::optional<long> limit(int from, int to) const;
    bool empty() const { return entries_.empty(); }
    const std::map<std::pair<int, int>, long>& entries() const { return entries_; }

private:
    std::map<std::pair<int, int>, long> entries_;
};

/* Number of cells l with mode(l) == from and mode(l+1) == to.  from == to is
 * a dwell, not a switch, and is rejected. */
long switch_count(const BinaryControl& bc, int from, int to);

/* Per-cell averages of the relaxed multipliers.  For the piecewise-constant
 * representation this is the (canonicalized) alpha matrix itself; kept as an
 * operation so callers do not depend on that representation detail. */
Eigen::MatrixXd cell_averages(const RelaxedControl& rc);

struct MinMaxSolution {
    BinaryControl control;
    double objective = 0.0;  // max over modes and prefixes of |integrated mismatch|
    bool optimal = true;     // false when the node cap stopped the search
    std::uint64_t nodes_explored = 0;
};

struct MinMaxOptions {
    std::uint64_t max_nodes = 20'000'000;
};

/* Objective of a fixed mode sequence: running per-mode accumulation of
 * (q - p) * dt, maximized over prefixes.  Shared by both solvers so their
 * optima agree bit-for-bit. */
double minmax_objective(const Eigen::MatrixXd& q, const TimeGrid& grid,
                        const std::vector<int>& modes);

bool budget_feasible(const std::vector<int>& modes, const SwitchBudget& budget);

/* Minimizes minmax_objective over budget-feasible binary selections by
 * depth-first branch and bound (prefix deviations are monotone lower bounds).
 * Among optima, returns the lexicographically smallest mode sequence.  If the
 * node cap is hit, returns the best feasible incumbent with optimal=false.
 * q rows must be convex multipliers. */
MinMaxSolution solve_minmax(const Eigen::MatrixXd& q, const TimeGrid& grid,
                            const SwitchBudget& budget, const MinMaxOptions& opts = {});

/* Exhaustive reference: every one of N^cells sequences.  Guarded to 1e7
 * sequences; intended for oracle testing only. */
MinMaxSolution brute_force_minmax(const Eigen::MatrixXd& q, const TimeGrid& grid,
                                  const SwitchBudget& budget);

/* Emits the equivalent mixed-integer linear program in CPLEX LP text format
 * (binary p_i_r, auxiliaries s_from_to_r linearizing transition indicators,
 * epigraph variable t).  For offline cross-checks with external solvers. */
void write_minmax_lp(std::ostream& os, const Eigen::MatrixXd& q, const TimeGrid& grid,
                     const SwitchBudget& budget);

}  // namespace miocp
