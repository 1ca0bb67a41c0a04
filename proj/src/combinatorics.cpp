#include "miocp/combinatorics.hpp"

#include <cmath>
#include <iomanip>
#include <string>

#include "miocp/errors.hpp"

namespace miocp {

namespace {

/* Advances per-mode deviations across one cell and returns the deviation
 * magnitude after it.  Both solvers funnel through this exact arithmetic so
 * their objectives are comparable bit-for-bit. */
double advance_deviation(Eigen::VectorXd& dev, const Eigen::MatrixXd& q, Eigen::Index r, int mode,
                         double dt) {
    double peak = 0.0;
    for (Eigen::Index i = 0; i < dev.size(); ++i) {
        dev(i) += (q(r, i) - (static_cast<int>(i) == mode ? 1.0 : 0.0)) * dt;
        peak = std::max(peak, std::abs(dev(i)));
    }
    return peak;
}

Eigen::MatrixXd canonical_q(const Eigen::MatrixXd& q, const TimeGrid& grid) {
    RelaxedControl rc{grid, Eigen::MatrixXd(), q};
    canonicalize_relaxed(rc);
    return rc.alpha;
}

void check_budget_modes(const SwitchBudget& budget, int n_modes) {
    for (const auto& [pair, limit] : budget.entries()) {
        (void)limit;
        if (pair.first >= n_modes || pair.second >= n_modes)
            throw ValidationError("switch budget references mode " +
                                  std::to_string(std::max(pair.first, pair.second)) +
                                  " but the problem has " + std::to_string(n_modes) + " modes");
    }
}

struct BranchAndBound {
    const Eigen::MatrixXd& q;
    const TimeGrid& grid;
    const SwitchBudget& budget;
    std::uint64_t max_nodes;

    Eigen::Index n, n_modes;
    std::vector<Eigen::VectorXd> dev_stack;
    std::vector<int> current;
    std::map<std::pair<int, int>, long> counts;

    std::vector<int> best;
    double best_obj = 0.0;
    std::uint64_t nodes = 0;
    bool capped = false;

    BranchAndBound(const Eigen::MatrixXd& q_, const TimeGrid& grid_, const SwitchBudget& budget_,
                   std::uint64_t max_nodes_)
        : q(q_), grid(grid_), budget(budget_), max_nodes(max_nodes_) {
        n = q.rows();
        n_modes = q.cols();
        dev_stack.assign(static_cast<std::size_t>(n) + 1, Eigen::VectorXd::Zero(n_modes));
        current.reserve(static_cast<std::size_t>(n));
        for (const auto& [pair, limit] : budget.entries()) {
            (void)limit;
            counts[pair] = 0;
        }
    }

    void consider(double obj) {
        if (obj < best_obj || (obj == best_obj && current < best)) {
            best_obj = obj;
            best = current;
        }
    }

    void recurse(Eigen::Index r, double prefix_max) {
        if (capped) return;
        if (r == n) {
            consider(prefix_max);
            return;
        }
        const double dt = grid.dt(static_cast<std::size_t>(r));
        for (int m = 0; m < static_cast<int>(n_modes); ++m) {
            std::map<std::pair<int, int>, long>::iterator transition = counts.end();
            if (r > 0) {
                transition = counts.find({current.back(), m});
                if (transition != counts.end() &&
                    transition->second + 1 > *budget.limit(current.back(), m))
                    continue;
            }
            if (++nodes > max_nodes) {
                capped = true;
                return;
            }
            dev_stack[static_cast<std::size_t>(r) + 1] = dev_stack[static_cast<std::size_t>(r)];
            const double peak =
                advance_deviation(dev_stack[static_cast<std::size_t>(r) + 1], q, r, m, dt);
            const double bound = std::max(prefix_max, peak);
            // Equal-valued subtrees stay open so the lexicographic tie rule sees them.
            if (bound > best_obj) continue;
            if (transition != counts.end()) ++transition->second;
            current.push_back(m);
            recurse(r + 1, bound);
            current.pop_back();
            if (transition != counts.end()) --transition->second;
            if (capped) return;
        }
    }
};

}  // namespace

void SwitchBudget::set(int from, int to, long max_count) {
    if (from < 0 || to < 0) throw ValidationError("switch budget modes must be non-negative");
    if (from == to) throw ValidationError("a mode dwelling in itself is not a switch");
    if (max_count < 0) throw ValidationError("switch budget counts must be non-negative");
    entries_[{from, to}] = max_count;
}

std::optional<long> SwitchBudget::limit(int from, int to) const {
    auto it = entries_.find({from, to});
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

long switch_count(const BinaryControl& bc, int from, int to) {
    if (from == to) throw ValidationError("switch_count needs two distinct modes");
    if (from < 0 || to < 0 || from >= bc.n_modes || to >= bc.n_modes)
        throw ValidationError("switch_count mode out of range");
    long count = 0;
    for (std::size_t l = 0; l + 1 < bc.mode.size(); ++l)
        if (bc.mode[l] == from && bc.mode[l + 1] == to) ++count;
    return count;
}

Eigen::MatrixXd cell_averages(const RelaxedControl& rc) {
    return canonical_q(rc.alpha, rc.grid);
}

double minmax_objective(const Eigen::MatrixXd& q, const TimeGrid& grid,
                        const std::vector<int>& modes) {
    if (q.rows() != static_cast<Eigen::Index>(grid.cells()) || modes.size() != grid.cells())
        throw ValidationError("minmax_objective shape mismatch");
    Eigen::VectorXd dev = Eigen::VectorXd::Zero(q.cols());
    double obj = 0.0;
    for (Eigen::Index r = 0; r < q.rows(); ++r)
        obj = std::max(obj, advance_deviation(dev, q, r, modes[static_cast<std::size_t>(r)],
                                              grid.dt(static_cast<std::size_t>(r))));
    return obj;
}

bool budget_feasible(const std::vector<int>& modes, const SwitchBudget& budget) {
    for (const auto& [pair, limit] : budget.entries()) {
        long count = 0;
        for (std::size_t l = 0; l + 1 < modes.size(); ++l)
            if (modes[l] == pair.first && modes[l + 1] == pair.second) ++count;
        if (count > limit) return false;
    }
    return true;
}

MinMaxSolution solve_minmax(const Eigen::MatrixXd& q_in, const TimeGrid& grid,
                            const SwitchBudget& budget, const MinMaxOptions& opts) {
    const Eigen::MatrixXd q = canonical_q(q_in, grid);
    check_budget_modes(budget, static_cast<int>(q.cols()));

    BranchAndBound bnb(q, grid, budget, opts.max_nodes);

    // Warm incumbents: sum-up rounding when feasible, plus the best constant
    // sequence (always feasible since constants never switch).
    bool seeded = false;
    auto seed = [&](const std::vector<int>& modes) {
        const double obj = minmax_objective(q, grid, modes);
        if (!seeded || obj < bnb.best_obj || (obj == bnb.best_obj && modes < bnb.best)) {
            bnb.best_obj = obj;
            bnb.best = modes;
            seeded = true;
        }
    };
    const std::vector<int> sur = sur_mode_sequence(q, grid);
    if (budget_feasible(sur, budget)) seed(sur);
    for (int m = 0; m < static_cast<int>(q.cols()); ++m)
        seed(std::vector<int>(grid.cells(), m));

    bnb.recurse(0, 0.0);

    MinMaxSolution sol;
    sol.control = BinaryControl{grid, static_cast<int>(q.cols()), bnb.best,
                                Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(grid.cells()), 0)};
    sol.objective = bnb.best_obj;
    sol.optimal = !bnb.capped;
    sol.nodes_explored = bnb.nodes;
    return sol;
}

MinMaxSolution brute_force_minmax(const Eigen::MatrixXd& q_in, const TimeGrid& grid,
                                  const SwitchBudget& budget) {
    const Eigen::MatrixXd q = canonical_q(q_in, grid);
    check_budget_modes(budget, static_cast<int>(q.cols()));

    const std::size_t n = grid.cells();
    const int n_modes = static_cast<int>(q.cols());
    const double total = std::pow(static_cast<double>(n_modes), static_cast<double>(n));
    if (total > 1e7)
        throw ValidationError("brute force guard: " + std::to_string(n_modes) + "^" +
                              std::to_string(n) + " sequences exceed 1e7");

    MinMaxSolution sol;
    std::vector<int> modes(n, 0);
    bool have = false;
    std::uint64_t visited = 0;
    while (true) {
        ++visited;
        if (budget_feasible(modes, budget)) {
            const double obj = minmax_objective(q, grid, modes);
            // Lexicographic enumeration order makes strict improvement keep
            // the lexicographically smallest optimum.
            if (!have || obj < sol.objective) {
                sol.objective = obj;
                sol.control.mode = modes;
                have = true;
            }
        }
        // odometer increment, most significant digit first
        std::size_t pos = n;
        while (pos > 0) {
            --pos;
            if (++modes[pos] < n_modes) break;
            modes[pos] = 0;
            if (pos == 0) {
                sol.control.grid = grid;
                sol.control.n_modes = n_modes;
                sol.control.omega =
                    Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), 0);
                sol.optimal = true;
                sol.nodes_explored = visited;
                if (!have) throw ComputationError("no budget-feasible sequence exists");
                return sol;
            }
        }
    }
}

void write_minmax_lp(std::ostream& os, const Eigen::MatrixXd& q_in, const TimeGrid& grid,
                     const SwitchBudget& budget) {
    const Eigen::MatrixXd q = canonical_q(q_in, grid);
    check_budget_modes(budget, static_cast<int>(q.cols()));
    const Eigen::Index n = q.rows(), n_modes = q.cols();

    os << std::setprecision(17);
    os << "\\ Min-max integrated mismatch rounding as a MILP.\n";
    os << "\\ p_i_r = 1 iff mode i is active on cell r; s_i_j_r >= p_i_r + p_j_(r+1) - 1\n";
    os << "\\ linearizes the (i -> j) transition indicator used by the switch budgets.\n";
    os << "Minimize\n obj: t\n";
    os << "Subject To\n";
    for (Eigen::Index i = 0; i < n_modes; ++i) {
        double target = 0.0;
        for (Eigen::Index r = 0; r < n; ++r) {
            const double dt = grid.dt(static_cast<std::size_t>(r));
            target += q(r, i) * dt;
            os << " devlo_" << i << "_" << r << ":";
            for (Eigen::Index l = 0; l <= r; ++l)
                os << " + " << grid.dt(static_cast<std::size_t>(l)) << " p_" << i << "_" << l;
            os << " + t >= " << target << "\n";
            os << " devhi_" << i << "_" << r << ":";
            for (Eigen::Index l = 0; l <= r; ++l)
                os << " + " << grid.dt(static_cast<std::size_t>(l)) << " p_" << i << "_" << l;
            os << " - t <= " << target << "\n";
        }
    }
    for (Eigen::Index r = 0; r < n; ++r) {
        os << " sos_" << r << ":";
        for (Eigen::Index i = 0; i < n_modes; ++i) os << " + p_" << i << "_" << r;
        os << " = 1\n";
    }
    for (const auto& [pair, limit] : budget.entries()) {
        for (Eigen::Index r = 0; r + 1 < n; ++r)
            os << " trans_" << pair.first << "_" << pair.second << "_" << r << ": s_" << pair.first
               << "_" << pair.second << "_" << r << " - p_" << pair.first << "_" << r << " - p_"
               << pair.second << "_" << r + 1 << " >= -1\n";
        os << " budget_" << pair.first << "_" << pair.second << ":";
        for (Eigen::Index r = 0; r + 1 < n; ++r)
            os << " + s_" << pair.first << "_" << pair.second << "_" << r;
        os << " <= " << limit << "\n";
    }
    os << "Bounds\n t >= 0\n";
    for (const auto& [pair, limit] : budget.entries()) {
        (void)limit;
        for (Eigen::Index r = 0; r + 1 < n; ++r)
            os << " 0 <= s_" << pair.first << "_" << pair.second << "_" << r << " <= 1\n";
    }
    os << "Binaries\n";
    for (Eigen::Index i = 0; i < n_modes; ++i)
        for (Eigen::Index r = 0; r < n; ++r) os << " p_" << i << "_" << r << "\n";
    os << "End\n";
}

}  // namespace miocp
