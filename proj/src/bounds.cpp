#include "miocp/bounds.hpp"

#include <cmath>

#include "miocp/errors.hpp"

namespace miocp {

namespace {

void validate_constants(const EstimateConstants& c) {
    if (c.eta < 0 || c.xi < 0 || c.lip_f < 0 || c.stability < 0 || c.semigroup < 0)
        throw ValidationError("estimate constants must be non-negative");
    if (!(c.t_final > 0)) throw ValidationError("estimate horizon must be positive");
    if ((c.mode_sup.size() && c.mode_sup.minCoeff() < 0) ||
        (c.mode_deriv.size() && c.mode_deriv.minCoeff() < 0))
        throw ValidationError("per-mode bounds must be non-negative");
}

/* Shared growth constants; the two theorems differ only in the term that
 * multiplies C2 and C4. */
ErrorBounds growth_constants(const EstimateConstants& c, double eps_k, double rounding) {
    ErrorBounds b;
    const double e = std::exp(c.t_final * c.semigroup * c.lip_f);
    b.c1 = c.stability * (c.M() + 1.0) * (1.0 + c.eta + c.xi) * e + 1.0;
    b.c2 = (c.M() + c.t_final * c.C()) * e;
    b.c3 = (c.eta + c.t_final * c.xi) * b.c1 + c.t_final * c.xi * c.stability;
    b.c4 = (c.eta + c.t_final * c.xi) * b.c2;
    b.state = b.c1 * eps_k + b.c2 * rounding;
    b.cost = b.c3 * eps_k + b.c4 * rounding;
    return b;
}

}  // namespace

ErrorBounds bound_theorem23(const EstimateConstants& c, double eps_k, double dt_max, int n_modes) {
    validate_constants(c);
    if (eps_k < 0 || dt_max < 0) throw ValidationError("eps and dt must be non-negative");
    if (n_modes < 1) throw ValidationError("need at least one mode");
    return growth_constants(c, eps_k, static_cast<double>(n_modes - 1) * dt_max);
}

ErrorBounds bound_theorem31(const EstimateConstants& c, double eps_k, double j_sub, double dt_max) {
    validate_constants(c);
    if (eps_k < 0 || j_sub < 0 || dt_max < 0)
        throw ValidationError("eps, j_sub and dt must be non-negative");
    return growth_constants(c, eps_k, j_sub + dt_max);
}

H2Report check_h2_linear(const SemilinearModel& model, const RelaxedControl& control,
                         double semigroup, int samples_per_cell) {
    if (!model.modes_state_independent)
        throw ValidationError(
            "check_h2_linear needs state-independent modes; this model's depend on the state");
    if (samples_per_cell < 2) throw ValidationError("need at least two samples per cell");
    validate_model(model);

    H2Report rep;
    rep.l_bar = Eigen::VectorXd::Zero(model.n_modes);
    rep.c_bar = Eigen::VectorXd::Zero(model.n_modes);

    const Eigen::VectorXd z_dummy = Eigen::VectorXd::Zero(model.dim);
    Eigen::VectorXd g(model.dim), g_prev(model.dim), ag(model.dim);

    for (int i = 0; i < model.n_modes; ++i) {
        for (std::size_t j = 0; j < control.grid.cells(); ++j) {
            const Eigen::VectorXd u = control.omega.row(static_cast<Eigen::Index>(j)).transpose();
            const double t0 = control.grid.cell_start(j);
            const double dt = control.grid.dt(j) / (samples_per_cell - 1);
            for (int s = 0; s < samples_per_cell; ++s) {
                model.mode_rhs(i, t0 + s * dt, z_dummy, u, g);
                if (model.has_linear()) {
                    model.linear(g, ag);
                    rep.l_bar(i) = std::max(rep.l_bar(i), model.weighted_norm(ag));
                }
                // one-sided difference quotient within the cell; exact 0 for
                // autonomous modes under piecewise-constant omega
                if (s > 0)
                    rep.c_bar(i) = std::max(rep.c_bar(i), model.weighted_norm((g - g_prev) / dt));
                g_prev = g;
            }
        }
    }
    rep.mode_deriv = semigroup * (rep.l_bar + rep.c_bar);
    rep.holds = true;
    return rep;
}

ConstraintReport check_state_constraint(const Trajectory& traj, const StateConstraint& constraint,
                                        const EstimateConstants& c, double eps_k, double dt_max,
                                        int n_modes) {
    ConstraintReport rep = check_state_constraint(traj, constraint);
    const ErrorBounds b = bound_theorem23(c, eps_k, dt_max, n_modes);
    double worst = 0.0;
    for (double t : traj.times) {
        const double zeta = constraint.zeta ? constraint.zeta(t) : 1.0;
        worst = std::max(worst, zeta * b.state);
    }
    rep.bound = worst;
    return rep;
}

}  // namespace miocp
