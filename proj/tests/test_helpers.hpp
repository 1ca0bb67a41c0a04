#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <memory>
#include <random>
#include <vector>

#include "miocp/model.hpp"
#include "miocp/rounding.hpp"
#include "miocp/time_grid.hpp"

/* Toy problems and random generators shared by the unit suites. */
namespace testutil {

inline miocp::TimeGrid random_grid(std::mt19937_64& rng, std::size_t cells, double t0 = 0.0) {
    std::uniform_real_distribution<double> step(0.05, 1.0);
    std::vector<double> nodes{t0};
    for (std::size_t j = 0; j < cells; ++j) nodes.push_back(nodes.back() + step(rng));
    return miocp::TimeGrid(std::move(nodes));
}

/* Rows drawn from a flat Dirichlet: exponential draws, normalized. */
inline Eigen::MatrixXd random_simplex_rows(std::mt19937_64& rng, Eigen::Index rows,
                                           Eigen::Index cols) {
    std::exponential_distribution<double> e(1.0);
    Eigen::MatrixXd a(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        double s = 0.0;
        for (Eigen::Index c = 0; c < cols; ++c) s += (a(r, c) = e(rng) + 1e-12);
        a.row(r) /= s;
    }
    return a;
}

inline miocp::RelaxedControl random_relaxed(std::mt19937_64& rng, const miocp::TimeGrid& grid,
                                            int n_modes, int n_controls = 0) {
    miocp::RelaxedControl rc;
    rc.grid = grid;
    rc.alpha = random_simplex_rows(rng, static_cast<Eigen::Index>(grid.cells()), n_modes);
    rc.omega.resize(static_cast<Eigen::Index>(grid.cells()), n_controls);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (Eigen::Index r = 0; r < rc.omega.rows(); ++r)
        for (Eigen::Index c = 0; c < rc.omega.cols(); ++c) rc.omega(r, c) = u(rng);
    return rc;
}

/* z' = -lambda z, no modes acting, no cost: the integrator order probe. */
inline miocp::SemilinearModel decay_model(double lambda) {
    miocp::SemilinearModel m;
    m.dim = 1;
    m.n_modes = 1;
    m.n_controls = 0;
    m.z0 = Eigen::VectorXd::Ones(1);
    m.mass_weights = Eigen::VectorXd::Ones(1);
    m.u_lower = Eigen::VectorXd(0);
    m.u_upper = Eigen::VectorXd(0);
    auto A = std::make_shared<Eigen::SparseMatrix<double>>(1, 1);
    A->insert(0, 0) = -lambda;
    A->makeCompressed();
    m.linear_matrix = A;
    m.linear_self_adjoint = true;
    m.mode_rhs = [](int, double, const Eigen::VectorXd&, const Eigen::VectorXd&,
                    Eigen::VectorXd& out) { out.setZero(1); };
    m.mode_state_vjp = [](int, double, const Eigen::VectorXd&, const Eigen::VectorXd&,
                          const Eigen::VectorXd&, Eigen::VectorXd& out) { out.setZero(1); };
    m.mode_control_vjp = [](int, double, const Eigen::VectorXd&, const Eigen::VectorXd&,
                            const Eigen::VectorXd&, Eigen::VectorXd& out) { out.resize(0); };
    m.modes_state_independent = true;
    m.terminal_cost = [](const Eigen::VectorXd&) { return 0.0; };
    m.terminal_cost_grad = [](const Eigen::VectorXd&, Eigen::VectorXd& g) { g.setZero(1); };
    m.running_cost = [](const Eigen::VectorXd&, const Eigen::VectorXd&) { return 0.0; };
    m.running_cost_grad = [](const Eigen::VectorXd&, const Eigen::VectorXd&, Eigen::VectorXd& gz,
                             Eigen::VectorXd& gu) {
        gz.setZero(1);
        gu.resize(0);
    };
    return m;
}

/* z' = u with J = (z(T) - z_target)^2 + w int (u - u_target)^2.
 * For z_target = u_target * T the unique optimum is u == u_target, J = 0. */
inline miocp::SemilinearModel steer_model(double u_target, double z_target, double w = 1.0) {
    miocp::SemilinearModel m;
    m.dim = 1;
    m.n_modes = 1;
    m.n_controls = 1;
    m.z0 = Eigen::VectorXd::Zero(1);
    m.mass_weights = Eigen::VectorXd::Ones(1);
    m.u_lower = Eigen::VectorXd::Constant(1, -10.0);
    m.u_upper = Eigen::VectorXd::Constant(1, 10.0);
    m.mode_rhs = [](int, double, const Eigen::VectorXd&, const Eigen::VectorXd& u,
                    Eigen::VectorXd& out) { out = u; };
    m.mode_state_vjp = [](int, double, const Eigen::VectorXd&, const Eigen::VectorXd&,
                          const Eigen::VectorXd&, Eigen::VectorXd& out) { out.setZero(1); };
    m.mode_control_vjp = [](int, double, const Eigen::VectorXd&, const Eigen::VectorXd&,
                            const Eigen::VectorXd& mu, Eigen::VectorXd& out) { out = mu; };
    m.modes_state_independent = false;
    m.terminal_cost = [z_target](const Eigen::VectorXd& z) {
        const double d = z(0) - z_target;
        return d * d;
    };
    m.terminal_cost_grad = [z_target](const Eigen::VectorXd& z, Eigen::VectorXd& g) {
        g.resize(1);
        g(0) = 2.0 * (z(0) - z_target);
    };
    m.running_cost = [u_target, w](const Eigen::VectorXd&, const Eigen::VectorXd& u) {
        const double d = u(0) - u_target;
        return w * d * d;
    };
    m.running_cost_grad = [u_target, w](const Eigen::VectorXd&, const Eigen::VectorXd& u,
                                        Eigen::VectorXd& gz, Eigen::VectorXd& gu) {
        gz.setZero(1);
        gu.resize(1);
        gu(0) = 2.0 * w * (u(0) - u_target);
    };
    return m;
}

/* Two constant drift modes +1 / -1 with clock state z2' = 1:
 * z1' = alpha_1 - alpha_2, J = int (z1 - slope * z2)^2.
 * slope 1 makes the pure mode-0 control the unique optimum (bang-bang),
 * slope 0 makes alpha = (1/2, 1/2) optimal (never binary). */
inline miocp::SemilinearModel drift_model(double slope) {
    miocp::SemilinearModel m;
    m.dim = 2;
    m.n_modes = 2;
    m.n_controls = 0;
    m.z0 = Eigen::VectorXd::Zero(2);
    m.mass_weights = Eigen::VectorXd::Ones(2);
    m.u_lower = Eigen::VectorXd(0);
    m.u_upper = Eigen::VectorXd(0);
    m.mode_rhs = [](int i, double, const Eigen::VectorXd&, const Eigen::VectorXd&,
                    Eigen::VectorXd& out) {
        out.resize(2);
        out(0) = i == 0 ? 1.0 : -1.0;
        out(1) = 1.0;
    };
    m.mode_state_vjp = [](int, double, const Eigen::VectorXd&, const Eigen::VectorXd&,
                          const Eigen::VectorXd&, Eigen::VectorXd& out) { out.setZero(2); };
    m.mode_control_vjp = [](int, double, const Eigen::VectorXd&, const Eigen::VectorXd&,
                            const Eigen::VectorXd&, Eigen::VectorXd& out) { out.resize(0); };
    m.modes_state_independent = false;
    m.terminal_cost = [](const Eigen::VectorXd&) { return 0.0; };
    m.terminal_cost_grad = [](const Eigen::VectorXd&, Eigen::VectorXd& g) { g.setZero(2); };
    m.running_cost = [slope](const Eigen::VectorXd& z, const Eigen::VectorXd&) {
        const double d = z(0) - slope * z(1);
        return d * d;
    };
    m.running_cost_grad = [slope](const Eigen::VectorXd& z, const Eigen::VectorXd&,
                                  Eigen::VectorXd& gz, Eigen::VectorXd& gu) {
        const double d = z(0) - slope * z(1);
        gz.resize(2);
        gz(0) = 2.0 * d;
        gz(1) = -2.0 * slope * d;
        gu.resize(0);
    };
    return m;
}

}  // namespace testutil
