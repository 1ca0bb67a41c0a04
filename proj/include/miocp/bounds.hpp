#pragma once

#include <Eigen/Dense>

#include "miocp/integrator.hpp"
#include "miocp/model.hpp"
#include "miocp/rounding.hpp"

namespace miocp {

/* Ingredients of the a-priori relaxation estimates:
 *   eta, xi       Lipschitz constants of terminal and running cost in z
 *   lip_f         Lipschitz constant of the mode right-hand sides in z
 *   mode_sup      per-mode sup-norm bounds M_i along the reference solution
 *   mode_deriv    per-mode bounds C_i on d/ds [T(t-s) f_i(s)]
 *   stability     C_J, stability constant of the perturbed problems
 *   semigroup     M_bar, sup-norm bound of the solution operator
 *   t_final       horizon length */
struct EstimateConstants {
    double eta = 0.0;
    double xi = 0.0;
    double lip_f = 0.0;
    Eigen::VectorXd mode_sup;
    Eigen::VectorXd mode_deriv;
    double stability = 1.0;
    double semigroup = 1.0;
    double t_final = 1.0;

    double M() const { return mode_sup.size() ? mode_sup.sum() : 0.0; }
    double C() const { return mode_deriv.size() ? mode_deriv.sum() : 0.0; }
};

struct ErrorBounds {
    double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;
    double state = 0.0;  // bound on sup_t ||y*(t) - z(t)||
    double cost = 0.0;   // bound on |J* - J|
};

/* Growth constants of the relaxation estimates:
 *   C1 = C_J (M+1)(1 + eta + xi) e^{t_f M_bar L} + 1
 *   C2 = (M + t_f C) e^{t_f M_bar L}
 *   C3 = (eta + t_f xi) C1 + t_f xi C_J
 *   C4 = (eta + t_f xi) C2
 * state <= C1 eps + C2 (N-1) dt,  cost <= C3 eps + C4 (N-1) dt. */
ErrorBounds bound_theorem23(const EstimateConstants& c, double eps_k, double dt_max, int n_modes);

/* Budget-constrained variant: dt-terms replaced by the attained min-max
 * deviation plus the grid-coarseness slack (taken conservatively = dt_max):
 * state <= C1 eps + C2 (j_sub + dt_max), cost analogous. */
ErrorBounds bound_theorem31(const EstimateConstants& c, double eps_k, double j_sub, double dt_max);

/* For state-independent modes g_i(t) = f_i(t, omega(t)), H2 holds with
 *   C_i = M_bar * (C_bar_i + L_bar_i),
 * where L_bar_i bounds ||A g_i(t)|| and C_bar_i bounds ||d g_i / dt||, both
 * estimated by sampling each cell.  Refuses models whose modes depend on the
 * state. */
struct H2Report {
    Eigen::VectorXd l_bar;   // per-mode ess-sup ||A g_i||
    Eigen::VectorXd c_bar;   // per-mode ess-sup ||dg_i/dt|| within cells
    Eigen::VectorXd mode_deriv;  // resulting C_i
    bool holds = false;
};

H2Report check_h2_linear(const SemilinearModel& model, const RelaxedControl& control,
                         double semigroup = 1.0, int samples_per_cell = 9);

/* Constraint transfer: a relaxed trajectory with g(y*(t), t) >= 0 certifies
 * g(z(t), t) >= -bound with bound = max_t zeta(t) (C1 eps + C2 (N-1) dt). */
ConstraintReport check_state_constraint(const Trajectory& traj, const StateConstraint& constraint,
                                        const EstimateConstants& c, double eps_k, double dt_max,
                                        int n_modes);

}  // namespace miocp
