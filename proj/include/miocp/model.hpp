#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <memory>
#include <json.hpp>
#include <vector>

namespace miocp {

/* Semilinear evolution model
 *
 *   z'(t) = A z(t) + sum_i w_i(t) f_i(t, z(t), u(t)),   z(0) = z0,
 *
 * with cost  J = phi(z(T)) + integral of psi(z(t), u(t)).
 *
 * The linear part may be given as a sparse matrix (preferred for large
 * models), as a plain action, or omitted entirely (A = 0).  Mode right-hand
 * sides come with transposed-Jacobian actions so the discrete adjoint can be
 * formed without materializing Jacobians. */
struct SemilinearModel {
    Eigen::Index dim = 0;
    int n_modes = 1;
    int n_controls = 0;

    Eigen::VectorXd z0;
    Eigen::VectorXd mass_weights;  // strictly positive quadrature weights of the state norm
    Eigen::VectorXd u_lower, u_upper;  // +-inf entries mean unbounded

    std::shared_ptr<const Eigen::SparseMatrix<double>> linear_matrix;
    std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> apply_linear;
    bool linear_self_adjoint = true;

    // f_i and its transposed Jacobian actions: out = (df_i/dz)^T w, (df_i/du)^T w
    std::function<void(int, double, const Eigen::VectorXd&, const Eigen::VectorXd&,
                       Eigen::VectorXd&)>
        mode_rhs;
    std::function<void(int, double, const Eigen::VectorXd&, const Eigen::VectorXd&,
                       const Eigen::VectorXd&, Eigen::VectorXd&)>
        mode_state_vjp;
    std::function<void(int, double, const Eigen::VectorXd&, const Eigen::VectorXd&,
                       const Eigen::VectorXd&, Eigen::VectorXd&)>
        mode_control_vjp;
    bool modes_state_independent = false;

    std::function<double(const Eigen::VectorXd&)> terminal_cost;
    std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> terminal_cost_grad;
    std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)> running_cost;
    std::function<void(const Eigen::VectorXd&, const Eigen::VectorXd&, Eigen::VectorXd&,
                       Eigen::VectorXd&)>
        running_cost_grad;

    nlohmann::json metadata;

    bool has_linear() const { return linear_matrix != nullptr || static_cast<bool>(apply_linear); }
    void linear(const Eigen::VectorXd& z, Eigen::VectorXd& out) const;

    // sqrt(sum_k w_k v_k^2), the discrete state-space norm
    double weighted_norm(const Eigen::VectorXd& v) const;
};

/* Structural checks plus a numerical spot check that the linear part is
 * actually linear.  Throws ValidationError. */
void validate_model(const SemilinearModel& model);

/* Discrete trajectory on the integrator's substep nodes.  grid_node_index[j]
 * locates control-grid node j inside times; states[0] is z0. */
struct Trajectory {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states;
    std::vector<std::size_t> grid_node_index;
    double accuracy = 0.0;  // step-halving estimate in the weighted state norm

    const Eigen::VectorXd& final_state() const { return states.back(); }
};

/* Pointwise state constraint g(z(t), t) >= 0 with an optional scale profile
 * zeta(t) for transferring relaxed-solution certificates. */
struct StateConstraint {
    std::function<double(const Eigen::VectorXd&, double)> g;
    std::function<double(double)> zeta;  // defaults to 1 when absent
};

struct ConstraintReport {
    double min_value = 0.0;
    double min_time = 0.0;
    bool violated = false;
    double bound = 0.0;  // max_t zeta(t) * (C1 eps + C2 (N-1) dt); 0 unless constants given
};

}  // namespace miocp
