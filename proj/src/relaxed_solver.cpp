#include "miocp/relaxed_solver.hpp"

#include <algorithm>
#include <cmath>

#include "miocp/errors.hpp"

namespace miocp {

namespace {

Eigen::VectorXd threshold_at(const Eigen::VectorXd& v, double theta) {
    return (v.array() - theta).cwiseMax(0.0).matrix();
}

/* Largest k with sorted_v[k] - (prefix_sum[k] - target)/(k+1) > 0 gives the
 * water level; standard O(N log N) projection. */
double water_level(const Eigen::VectorXd& v, double target) {
    std::vector<double> s(v.data(), v.data() + v.size());
    std::sort(s.begin(), s.end(), std::greater<double>());
    double prefix = 0.0, theta = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        prefix += s[k];
        const double cand = (prefix - target) / static_cast<double>(k + 1);
        if (s[k] - cand > 0.0) theta = cand;
    }
    return theta;
}

}  // namespace

Eigen::VectorXd simplex_project(const Eigen::VectorXd& v) {
    if (v.size() == 0) throw ValidationError("cannot project an empty vector onto the simplex");
    return threshold_at(v, water_level(v, 1.0));
}

Eigen::VectorXd simplex_cap_project(const Eigen::VectorXd& v) {
    Eigen::VectorXd clamped = v.cwiseMax(0.0);
    if (clamped.sum() <= 1.0) return clamped;
    return threshold_at(v, water_level(v, 1.0));
}

RelaxedControl uniform_start(const SemilinearModel& model, const TimeGrid& grid) {
    const auto cells = static_cast<Eigen::Index>(grid.cells());
    RelaxedControl rc;
    rc.grid = grid;
    rc.omega = Eigen::MatrixXd::Zero(cells, model.n_controls);
    for (Eigen::Index c = 0; c < model.n_controls; ++c) {
        const double v = std::min(std::max(0.0, model.u_lower(c)), model.u_upper(c));
        rc.omega.col(c).setConstant(v);
    }
    rc.alpha = Eigen::MatrixXd::Constant(cells, model.n_modes, 1.0 / model.n_modes);
    return rc;
}

RelaxedControl inject_control(const RelaxedControl& rc, const TimeGrid& fine) {
    const auto& nodes = rc.grid.nodes();
    RelaxedControl out;
    out.grid = fine;
    out.omega.resize(static_cast<Eigen::Index>(fine.cells()), rc.omega.cols());
    out.alpha.resize(static_cast<Eigen::Index>(fine.cells()), rc.alpha.cols());
    for (std::size_t j = 0; j < fine.cells(); ++j) {
        const double mid = 0.5 * (fine.cell_start(j) + fine.cell_end(j));
        auto it = std::upper_bound(nodes.begin(), nodes.end(), mid);
        std::size_t coarse = it == nodes.begin() ? 0 : static_cast<std::size_t>(it - nodes.begin()) - 1;
        coarse = std::min(coarse, rc.grid.cells() - 1);
        out.omega.row(static_cast<Eigen::Index>(j)) = rc.omega.row(static_cast<Eigen::Index>(coarse));
        out.alpha.row(static_cast<Eigen::Index>(j)) = rc.alpha.row(static_cast<Eigen::Index>(coarse));
    }
    return out;
}

namespace {

struct Point {
    Eigen::MatrixXd omega;
    Eigen::MatrixXd alpha;  // full rows; feasible at all times
};

struct Gradient {
    Eigen::MatrixXd omega;
    Eigen::MatrixXd alpha;
};

class Feasibility {
public:
    Feasibility(const SemilinearModel& model, bool eliminate)
        : lower_(model.u_lower), upper_(model.u_upper), eliminate_(eliminate) {}

    Point project(const Point& x, const Gradient& g, double step) const {
        Point out;
        out.omega = x.omega - step * g.omega;
        for (Eigen::Index c = 0; c < out.omega.cols(); ++c)
            out.omega.col(c) = out.omega.col(c).cwiseMax(lower_(c)).cwiseMin(upper_(c));

        const Eigen::Index n_modes = x.alpha.cols();
        out.alpha.resizeLike(x.alpha);
        for (Eigen::Index j = 0; j < x.alpha.rows(); ++j) {
            if (!eliminate_ || n_modes == 1) {
                out.alpha.row(j) =
                    simplex_project(x.alpha.row(j).transpose() - step * g.alpha.row(j).transpose())
                        .transpose();
            } else {
                // reduced coordinates alpha_1..alpha_{N-1}; the last mode keeps
                // the simplex equality
                Eigen::VectorXd red = x.alpha.row(j).head(n_modes - 1).transpose();
                Eigen::VectorXd gred = g.alpha.row(j).head(n_modes - 1).transpose();
                gred.array() -= g.alpha(j, n_modes - 1);
                red = simplex_cap_project(red - step * gred);
                out.alpha.row(j).head(n_modes - 1) = red.transpose();
                out.alpha(j, n_modes - 1) = std::max(0.0, 1.0 - red.sum());
            }
        }
        return out;
    }

    /* <g, x - y> over the free coordinates of the active parameterization */
    double decrease(const Point& x, const Point& y, const Gradient& g) const {
        double s = (g.omega.array() * (x.omega - y.omega).array()).sum();
        const Eigen::Index n_modes = x.alpha.cols();
        if (!eliminate_ || n_modes == 1) {
            s += (g.alpha.array() * (x.alpha - y.alpha).array()).sum();
        } else {
            for (Eigen::Index j = 0; j < x.alpha.rows(); ++j)
                for (Eigen::Index i = 0; i < n_modes - 1; ++i)
                    s += (g.alpha(j, i) - g.alpha(j, n_modes - 1)) * (x.alpha(j, i) - y.alpha(j, i));
        }
        return s;
    }

    double kkt_residual(const Point& x, const Gradient& g) const {
        const Point p = project(x, g, 1.0);
        double r = 0.0;
        if (x.omega.size() > 0) r = (x.omega - p.omega).cwiseAbs().maxCoeff();
        if (x.alpha.size() > 0) r = std::max(r, (x.alpha - p.alpha).cwiseAbs().maxCoeff());
        return r;
    }

private:
    Eigen::VectorXd lower_, upper_;
    bool eliminate_;
};

}  // namespace

RelaxedSolveResult solve_relaxed(const SemilinearModel& model, const TimeGrid& grid,
                                 const RelaxedControl& start, const RelaxedSolveOptions& opts) {
    if (!(opts.kkt_tol > 0.0) || !(opts.integrate_tol > 0.0))
        throw ValidationError("solver tolerances must be positive");
    validate_model(model);

    RelaxedControl rc = start;
    canonicalize_relaxed(rc);
    if (rc.alpha.cols() != model.n_modes || rc.omega.cols() != model.n_controls)
        throw ValidationError("start control does not match the model's mode/control counts");

    // Freeze the substep layout at the start point; every line-search probe
    // then optimizes one fixed discrete objective.
    SubstepScheme scheme;
    integrate(model, grid, rc.omega, rc.alpha, opts.integrate_tol, opts.integrate, &scheme);
    SchemeIntegrator integrator(model, grid, scheme);

    const Feasibility feas(model, opts.eliminate_last_mode);
    Point x{rc.omega, rc.alpha};

    ControlGradient cg = integrator.gradient(x.omega, x.alpha);
    Gradient g{cg.d_omega, cg.d_alpha};
    double fx = cg.cost;

    RelaxedSolveResult res;
    res.objective_history.push_back(fx);

    double step = 1.0 / std::max(1.0, feas.kkt_residual(x, g));
    for (int it = 0; it < opts.max_iters; ++it) {
        res.kkt_residual = feas.kkt_residual(x, g);
        if (res.kkt_residual <= opts.kkt_tol) {
            res.converged = true;
            break;
        }

        bool accepted = false;
        double s = step;
        for (int ls = 0; ls < opts.max_line_search; ++ls) {
            Point trial = feas.project(x, g, s);
            const double pred = feas.decrease(x, trial, g);
            if (pred <= 0.0) break;  // stationary within rounding
            const Trajectory traj = integrator.forward(trial.omega, trial.alpha);
            const double ft = evaluate_cost(model, traj, grid, trial.omega);
            if (ft <= fx - opts.armijo_c * pred) {
                x = std::move(trial);
                fx = ft;
                accepted = true;
                step = s * 2.0;
                break;
            }
            s *= 0.5;
        }
        if (!accepted) {
            res.line_search_stalled = true;
            break;
        }

        cg = integrator.gradient(x.omega, x.alpha);
        g.omega = cg.d_omega;
        g.alpha = cg.d_alpha;
        fx = cg.cost;
        res.objective_history.push_back(fx);
        res.iterations = it + 1;
    }
    if (!res.converged) res.kkt_residual = feas.kkt_residual(x, g);

    res.control = RelaxedControl{grid, x.omega, x.alpha};
    canonicalize_relaxed(res.control);
    res.trajectory = integrate(model, grid, res.control.omega, res.control.alpha,
                               opts.integrate_tol, opts.integrate);
    res.trajectory_accuracy = res.trajectory.accuracy;
    res.objective = evaluate_cost(model, res.trajectory, grid, res.control.omega);
    return res;
}

}  // namespace miocp
