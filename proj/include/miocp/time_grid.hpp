#pragma once

#include <cstddef>
#include <vector>

namespace miocp {

/* Strictly increasing time nodes t_0 < t_1 < ... < t_n covering the control
 * horizon.  Controls are piecewise constant on the n cells [t_j, t_{j+1}). */
class TimeGrid {
public:
    /* Default grid is the single cell [0, 1]; every invariant holds on it. */
    TimeGrid() : nodes_{0.0, 1.0} {}
    explicit TimeGrid(std::vector<double> nodes);

    static TimeGrid uniform(double t_start, double t_end, std::size_t cells);

    std::size_t cells() const { return nodes_.size() - 1; }
    const std::vector<double>& nodes() const { return nodes_; }
    double node(std::size_t i) const { return nodes_[i]; }

    double cell_start(std::size_t j) const { return nodes_[j]; }
    double cell_end(std::size_t j) const { return nodes_[j + 1]; }
    double dt(std::size_t j) const { return nodes_[j + 1] - nodes_[j]; }

    double t_start() const { return nodes_.front(); }
    double t_final() const { return nodes_.back(); }
    double horizon() const { return t_final() - t_start(); }
    double dt_max() const;

    bool operator==(const TimeGrid& other) const { return nodes_ == other.nodes_; }

private:
    std::vector<double> nodes_;
};

/* Splits every cell at its midpoint.  The result contains every original node
 * bit-identically, so piecewise-constant data injects exactly. */
TimeGrid refine_bisect(const TimeGrid& grid);

}  // namespace miocp
