#include "miocp/time_grid.hpp"

#include <algorithm>
#include <cmath>

#include "miocp/errors.hpp"

namespace miocp {

TimeGrid::TimeGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.size() < 2)
        throw ValidationError("time grid needs at least two nodes (one cell)");
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
        if (!(nodes_[i] < nodes_[i + 1]))
            throw ValidationError("time grid nodes must be strictly increasing");
    }
    if (!std::isfinite(nodes_.front()) || !std::isfinite(nodes_.back()))
        throw ValidationError("time grid nodes must be finite");
}

TimeGrid TimeGrid::uniform(double t_start, double t_end, std::size_t cells) {
    if (cells == 0) throw ValidationError("uniform grid needs at least one cell");
    if (!(t_end > t_start)) throw ValidationError("uniform grid needs t_end > t_start");
    std::vector<double> nodes(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i) {
        const double s = static_cast<double>(i) / static_cast<double>(cells);
        nodes[i] = t_start + s * (t_end - t_start);
    }
    nodes.back() = t_end;
    return TimeGrid(std::move(nodes));
}

double TimeGrid::dt_max() const {
    double m = 0.0;
    for (std::size_t j = 0; j < cells(); ++j) m = std::max(m, dt(j));
    return m;
}

TimeGrid refine_bisect(const TimeGrid& grid) {
    std::vector<double> nodes;
    nodes.reserve(2 * grid.cells() + 1);
    for (std::size_t j = 0; j < grid.cells(); ++j) {
        nodes.push_back(grid.node(j));
        nodes.push_back(0.5 * (grid.node(j) + grid.node(j + 1)));
    }
    nodes.push_back(grid.t_final());
    return TimeGrid(std::move(nodes));
}

}  // namespace miocp
