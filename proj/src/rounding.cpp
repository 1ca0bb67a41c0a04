#include "miocp/rounding.hpp"

#include <cmath>
#include <string>

#include "miocp/detail/kahan.hpp"
#include "miocp/errors.hpp"

namespace miocp {

namespace {
constexpr double kSimplexTol = 1e-9;
}

Eigen::MatrixXd BinaryControl::beta_matrix() const {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(mode.size()), n_modes);
    for (std::size_t j = 0; j < mode.size(); ++j) b(static_cast<Eigen::Index>(j), mode[j]) = 1.0;
    return b;
}

void canonicalize_relaxed(RelaxedControl& rc) {
    const auto cells = static_cast<Eigen::Index>(rc.grid.cells());
    if (rc.alpha.rows() != cells)
        throw ValidationError("alpha has " + std::to_string(rc.alpha.rows()) +
                              " rows, grid has " + std::to_string(cells) + " cells");
    if (rc.alpha.cols() < 1) throw ValidationError("need at least one mode column");
    if (rc.omega.size() > 0 && rc.omega.rows() != cells)
        throw ValidationError("omega row count does not match grid cells");
    if (rc.omega.size() == 0) rc.omega.resize(cells, 0);

    for (Eigen::Index j = 0; j < cells; ++j) {
        double sum = 0.0;
        Eigen::Index largest = 0;
        for (Eigen::Index i = 0; i < rc.alpha.cols(); ++i) {
            double a = rc.alpha(j, i);
            if (!std::isfinite(a) || a < -kSimplexTol || a > 1.0 + kSimplexTol)
                throw ValidationError("alpha(" + std::to_string(j) + "," + std::to_string(i) +
                                      ") = " + std::to_string(a) + " outside [0,1]");
            a = std::min(1.0, std::max(0.0, a));
            rc.alpha(j, i) = a;
            sum += a;
            if (a > rc.alpha(j, largest)) largest = i;
        }
        if (std::abs(sum - 1.0) > kSimplexTol)
            throw ValidationError("alpha row " + std::to_string(j) + " sums to " +
                                  std::to_string(sum) + ", not 1");
        // Residual goes to the largest entry; the row stays within tolerance of
        // the simplex even in the corner cases, which is all downstream needs.
        rc.alpha(j, largest) = std::min(1.0, rc.alpha(j, largest) + (1.0 - sum));
    }
}

std::vector<int> sur_mode_sequence(const Eigen::MatrixXd& alpha, const TimeGrid& grid) {
    const auto cells = static_cast<Eigen::Index>(grid.cells());
    if (alpha.rows() != cells) throw ValidationError("alpha rows must equal grid cells");
    const Eigen::Index n_modes = alpha.cols();

    std::vector<int> mode(grid.cells());
    std::vector<detail::KahanSum> deficit(n_modes);  // integral of alpha_i minus assigned time
    for (Eigen::Index j = 0; j < cells; ++j) {
        const double dt = grid.dt(static_cast<std::size_t>(j));
        for (Eigen::Index i = 0; i < n_modes; ++i) deficit[i].add(alpha(j, i) * dt);

        Eigen::Index best = 0;
        for (Eigen::Index i = 1; i < n_modes; ++i)
            if (deficit[i].value() > deficit[best].value()) best = i;

        mode[static_cast<std::size_t>(j)] = static_cast<int>(best);
        deficit[best].add(-dt);
    }
    return mode;
}

BinaryControl sur_round(const RelaxedControl& rc_in) {
    RelaxedControl rc = rc_in;
    canonicalize_relaxed(rc);
    BinaryControl bc{rc.grid, static_cast<int>(rc.n_modes()), sur_mode_sequence(rc.alpha, rc.grid),
                     rc.omega};
    return bc;
}

DeviationReport accumulated_deviation(const RelaxedControl& rc, const BinaryControl& bc) {
    if (!(rc.grid == bc.grid)) throw ValidationError("deviation audit needs matching grids");
    if (rc.alpha.cols() != bc.n_modes) throw ValidationError("mode count mismatch");

    const Eigen::Index n_modes = rc.alpha.cols();
    DeviationReport rep;
    rep.per_mode_max = Eigen::VectorXd::Zero(n_modes);
    for (Eigen::Index i = 0; i < n_modes; ++i) {
        detail::KahanSum integral;
        double peak = 0.0;
        for (std::size_t j = 0; j < rc.grid.cells(); ++j) {
            integral.add((rc.alpha(static_cast<Eigen::Index>(j), i) - bc.beta(j, static_cast<int>(i))) *
                         rc.grid.dt(j));
            peak = std::max(peak, std::abs(integral.value()));
        }
        rep.per_mode_max(i) = peak;
    }
    rep.overall_max = rep.per_mode_max.size() ? rep.per_mode_max.maxCoeff() : 0.0;
    rep.bound = static_cast<double>(n_modes - 1) * rc.grid.dt_max();
    return rep;
}

}  // namespace miocp
