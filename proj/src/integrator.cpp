#include "miocp/integrator.hpp"

#include <Eigen/LU>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "miocp/detail/kahan.hpp"
#include "miocp/errors.hpp"
#include "miocp/rounding.hpp"

namespace miocp {

namespace {

constexpr double kTheta = 0.5;
constexpr Eigen::Index kDenseFallbackLimit = 1024;

/* Implicit-stage solver for one substep size: x = (I - h*theta*A)^{-1} b. */
class StepSolver {
public:
    virtual ~StepSolver() = default;
    virtual void solve(const Eigen::VectorXd& b, Eigen::VectorXd& x) const = 0;
    virtual void solve_transpose(const Eigen::VectorXd& b, Eigen::VectorXd& x) const = 0;
};

class IdentitySolver final : public StepSolver {
public:
    void solve(const Eigen::VectorXd& b, Eigen::VectorXd& x) const override { x = b; }
    void solve_transpose(const Eigen::VectorXd& b, Eigen::VectorXd& x) const override { x = b; }
};

class SparseCholSolver final : public StepSolver {
public:
    explicit SparseCholSolver(const Eigen::SparseMatrix<double>& m) {
        chol_.compute(m);
        if (chol_.info() != Eigen::Success)
            throw ComputationError("implicit-stage Cholesky factorization failed");
    }
    void solve(const Eigen::VectorXd& b, Eigen::VectorXd& x) const override { x = chol_.solve(b); }
    void solve_transpose(const Eigen::VectorXd& b, Eigen::VectorXd& x) const override {
        x = chol_.solve(b);  // matrix is symmetric
    }

private:
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol_;
};

class SparseLUSolver final : public StepSolver {
public:
    SparseLUSolver(const Eigen::SparseMatrix<double>& m, const Eigen::SparseMatrix<double>& mt) {
        lu_.compute(m);
        lut_.compute(mt);
        if (lu_.info() != Eigen::Success || lut_.info() != Eigen::Success)
            throw ComputationError("implicit-stage LU factorization failed");
    }
    void solve(const Eigen::VectorXd& b, Eigen::VectorXd& x) const override { x = lu_.solve(b); }
    void solve_transpose(const Eigen::VectorXd& b, Eigen::VectorXd& x) const override {
        x = lut_.solve(b);
    }

private:
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_, lut_;
};

class DenseLUSolver final : public StepSolver {
public:
    DenseLUSolver(const Eigen::MatrixXd& m, bool self_adjoint) : self_adjoint_(self_adjoint) {
        lu_.compute(m);
        if (!self_adjoint) lut_.compute(m.transpose().eval());
    }
    void solve(const Eigen::VectorXd& b, Eigen::VectorXd& x) const override { x = lu_.solve(b); }
    void solve_transpose(const Eigen::VectorXd& b, Eigen::VectorXd& x) const override {
        x = self_adjoint_ ? lu_.solve(b) : lut_.solve(b);
    }

private:
    bool self_adjoint_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_, lut_;
};

}  // namespace

SubstepScheme SubstepScheme::constant(std::size_t cells, int substeps) {
    if (substeps < 1) throw ValidationError("substep count must be positive");
    SubstepScheme s;
    s.per_cell.assign(cells, substeps);
    return s;
}

SubstepScheme SubstepScheme::doubled() const {
    SubstepScheme s = *this;
    for (int& k : s.per_cell) k *= 2;
    return s;
}

struct SchemeIntegrator::Impl {
    // one factorization per distinct substep size
    std::map<double, std::unique_ptr<StepSolver>> solvers;
    Eigen::SparseMatrix<double> identity;  // reused when assembling I - h*theta*A
    bool linear_zero = false;

    const StepSolver& solver_for(double h) const {
        auto it = solvers.find(h);
        if (it == solvers.end()) throw ComputationError("no factorization for substep size");
        return *it->second;
    }
};

SchemeIntegrator::SchemeIntegrator(const SemilinearModel& model, const TimeGrid& grid,
                                   SubstepScheme scheme)
    : model_(model), grid_(grid), scheme_(std::move(scheme)), impl_(std::make_unique<Impl>()) {
    if (scheme_.per_cell.size() != grid_.cells())
        throw ValidationError("substep scheme does not match grid cell count");
    for (int k : scheme_.per_cell)
        if (k < 1) throw ValidationError("substep counts must be positive");

    impl_->linear_zero = !model_.has_linear();
    if (impl_->linear_zero) return;

    Eigen::SparseMatrix<double> a_sparse;
    Eigen::MatrixXd a_dense;
    if (model_.linear_matrix) {
        a_sparse = *model_.linear_matrix;
    } else {
        if (model_.dim > kDenseFallbackLimit)
            throw ComputationError(
                "matrix-free linear operators above dim " + std::to_string(kDenseFallbackLimit) +
                " are not supported; provide linear_matrix");
        a_dense.resize(model_.dim, model_.dim);
        Eigen::VectorXd e = Eigen::VectorXd::Zero(model_.dim), col(model_.dim);
        for (Eigen::Index k = 0; k < model_.dim; ++k) {
            e(k) = 1.0;
            model_.linear(e, col);
            a_dense.col(k) = col;
            e(k) = 0.0;
        }
    }

    Eigen::SparseMatrix<double> eye(model_.dim, model_.dim);
    eye.setIdentity();

    for (std::size_t j = 0; j < grid_.cells(); ++j) {
        const double h = grid_.dt(j) / scheme_.per_cell[j];
        if (impl_->solvers.count(h)) continue;
        if (model_.linear_matrix) {
            Eigen::SparseMatrix<double> m = eye - (h * kTheta) * a_sparse;
            if (model_.linear_self_adjoint) {
                impl_->solvers.emplace(h, std::make_unique<SparseCholSolver>(m));
            } else {
                Eigen::SparseMatrix<double> mt = m.transpose();
                impl_->solvers.emplace(h, std::make_unique<SparseLUSolver>(m, mt));
            }
        } else {
            Eigen::MatrixXd m =
                Eigen::MatrixXd::Identity(model_.dim, model_.dim) - (h * kTheta) * a_dense;
            impl_->solvers.emplace(h, std::make_unique<DenseLUSolver>(m, model_.linear_self_adjoint));
        }
    }
}

SchemeIntegrator::~SchemeIntegrator() = default;

Trajectory SchemeIntegrator::forward(const Eigen::MatrixXd& omega,
                                     const Eigen::MatrixXd& weights) const {
    const auto cells = static_cast<Eigen::Index>(grid_.cells());
    if (weights.rows() != cells || weights.cols() != model_.n_modes)
        throw ValidationError("mode weight matrix shape mismatch");
    if (omega.rows() != cells || omega.cols() != model_.n_controls)
        throw ValidationError("omega matrix shape mismatch");

    std::size_t total = 0;
    for (int k : scheme_.per_cell) total += static_cast<std::size_t>(k);

    Trajectory traj;
    traj.times.reserve(total + 1);
    traj.states.reserve(total + 1);
    traj.grid_node_index.reserve(grid_.cells() + 1);

    Eigen::VectorXd z = model_.z0;
    traj.times.push_back(grid_.node(0));
    traj.states.push_back(z);
    traj.grid_node_index.push_back(0);

    Eigen::VectorXd f(model_.dim), az(model_.dim), rhs(model_.dim), zhalf(model_.dim),
        znext(model_.dim);
    const bool has_a = !impl_->linear_zero;
    // State-dependent modes get a predictor half step so the explicit term is
    // evaluated at the substep midpoint; otherwise midpoint time alone keeps
    // the scheme second order.
    const bool two_stage = !model_.modes_state_independent;

    const auto add_modes = [&](Eigen::Index j, double t, const Eigen::VectorXd& zf,
                               const Eigen::VectorXd& u, double coeff, Eigen::VectorXd& acc) {
        for (int i = 0; i < model_.n_modes; ++i) {
            const double w = weights(j, i);
            if (w == 0.0) continue;
            model_.mode_rhs(i, t, zf, u, f);
            acc.noalias() += (coeff * w) * f;
        }
    };

    for (std::size_t j = 0; j < grid_.cells(); ++j) {
        const auto jc = static_cast<Eigen::Index>(j);
        const int k = scheme_.per_cell[j];
        const double h = grid_.dt(j) / k;
        const Eigen::VectorXd u = omega.row(jc).transpose();
        const StepSolver* solver = has_a ? &impl_->solver_for(h) : nullptr;

        for (int s = 0; s < k; ++s) {
            const double t = grid_.cell_start(j) + s * h;
            const double tm = t + 0.5 * h;

            const Eigen::VectorXd* zf = &z;
            if (two_stage) {  // implicit Euler half step: zhalf = S^{-1}(z + (h/2) F(t, z))
                rhs = z;
                add_modes(jc, t, z, u, 0.5 * h, rhs);
                if (has_a) {
                    solver->solve(rhs, zhalf);
                } else {
                    zhalf = rhs;
                }
                zf = &zhalf;
            }

            rhs = z;
            if (has_a) {
                model_.linear(z, az);
                rhs.noalias() += (h * (1.0 - kTheta)) * az;
            }
            add_modes(jc, tm, *zf, u, h, rhs);
            if (has_a) {
                solver->solve(rhs, znext);
            } else {
                znext = rhs;
            }
            z = znext;
            traj.times.push_back(s + 1 == k ? grid_.cell_end(j) : grid_.cell_start(j) + (s + 1) * h);
            traj.states.push_back(z);
        }
        traj.grid_node_index.push_back(traj.times.size() - 1);
    }
    return traj;
}

ControlGradient SchemeIntegrator::gradient(const Eigen::MatrixXd& omega,
                                           const Eigen::MatrixXd& weights) const {
    const Trajectory traj = forward(omega, weights);
    const auto cells = static_cast<Eigen::Index>(grid_.cells());

    ControlGradient g;
    g.cost = evaluate_cost(model_, traj, grid_, omega);
    g.d_omega = Eigen::MatrixXd::Zero(cells, model_.n_controls);
    g.d_alpha = Eigen::MatrixXd::Zero(cells, model_.n_modes);

    Eigen::VectorXd lam(model_.dim), mu(model_.dim), kap(model_.dim), nu(model_.dim);
    Eigen::VectorXd tmp(model_.dim), f(model_.dim), rhs(model_.dim), zhalf(model_.dim);
    Eigen::VectorXd gz(model_.dim), gu(model_.n_controls), gu2(model_.n_controls);
    model_.terminal_cost_grad(traj.states.back(), lam);

    const bool has_a = !impl_->linear_zero;
    const bool two_stage = !model_.modes_state_independent;
    // Predictor-stage mode values f_i(t_s, z_s); reused for the weight
    // derivatives once the predictor adjoint is known.
    Eigen::MatrixXd fleft(model_.dim, two_stage ? model_.n_modes : 0);

    const auto adjoint_linear = [&](const Eigen::VectorXd& v, Eigen::VectorXd& out) {
        if (model_.linear_self_adjoint) {
            model_.linear(v, out);
        } else if (model_.linear_matrix) {
            out.noalias() = model_.linear_matrix->transpose() * v;
        } else {
            throw ComputationError(
                "non-self-adjoint matrix-free operators need linear_matrix for the adjoint");
        }
    };

    for (std::size_t jp = grid_.cells(); jp-- > 0;) {
        const auto j = static_cast<Eigen::Index>(jp);
        const int k = scheme_.per_cell[jp];
        const double h = grid_.dt(jp) / k;
        const Eigen::VectorXd u = omega.row(j).transpose();
        const StepSolver* solver = has_a ? &impl_->solver_for(h) : nullptr;

        for (int s = k - 1; s >= 0; --s) {
            const std::size_t left = traj.grid_node_index[jp] + static_cast<std::size_t>(s);
            const Eigen::VectorXd& z_left = traj.states[left];
            const Eigen::VectorXd& z_right = traj.states[left + 1];
            const double t = grid_.cell_start(jp) + s * h;
            const double tm = t + 0.5 * h;

            model_.running_cost_grad(z_right, u, gz, gu);
            lam.noalias() += (0.5 * h) * gz;
            g.d_omega.row(j).noalias() += (0.5 * h) * gu.transpose();

            if (has_a) {
                solver->solve_transpose(lam, mu);
            } else {
                mu = lam;
            }

            if (two_stage) {
                // Rebuild the predictor state of the forward sweep.
                rhs = z_left;
                for (int i = 0; i < model_.n_modes; ++i) {
                    model_.mode_rhs(i, t, z_left, u, f);
                    fleft.col(i) = f;
                    const double w = weights(j, i);
                    if (w != 0.0) rhs.noalias() += (0.5 * h * w) * f;
                }
                if (has_a) {
                    solver->solve(rhs, zhalf);
                } else {
                    zhalf = rhs;
                }

                // Corrector stage: modes enter as h F(t_mid, zhalf).
                nu.setZero();
                for (int i = 0; i < model_.n_modes; ++i) {
                    model_.mode_rhs(i, tm, zhalf, u, f);
                    g.d_alpha(j, i) += h * mu.dot(f);
                    const double w = weights(j, i);
                    if (w == 0.0) continue;
                    model_.mode_state_vjp(i, tm, zhalf, u, mu, tmp);
                    nu.noalias() += (h * w) * tmp;
                    if (model_.n_controls > 0) {
                        model_.mode_control_vjp(i, tm, zhalf, u, mu, gu2);
                        g.d_omega.row(j).noalias() += (h * w) * gu2.transpose();
                    }
                }
                if (has_a) {
                    solver->solve_transpose(nu, kap);
                } else {
                    kap = nu;
                }

                // dJ/dz_s through the corrector (I + h(1-theta)A)^T mu, the
                // predictor identity, and the predictor modes (h/2) F(t_s, z_s).
                if (has_a) {
                    adjoint_linear(mu, tmp);
                    lam = mu + (h * (1.0 - kTheta)) * tmp;
                } else {
                    lam = mu;
                }
                lam += kap;
                for (int i = 0; i < model_.n_modes; ++i) {
                    g.d_alpha(j, i) += 0.5 * h * kap.dot(fleft.col(i));
                    const double w = weights(j, i);
                    if (w == 0.0) continue;
                    model_.mode_state_vjp(i, t, z_left, u, kap, tmp);
                    lam.noalias() += (0.5 * h * w) * tmp;
                    if (model_.n_controls > 0) {
                        model_.mode_control_vjp(i, t, z_left, u, kap, gu2);
                        g.d_omega.row(j).noalias() += (0.5 * h * w) * gu2.transpose();
                    }
                }
            } else {
                for (int i = 0; i < model_.n_modes; ++i) {
                    model_.mode_rhs(i, tm, z_left, u, f);
                    g.d_alpha(j, i) += h * mu.dot(f);
                    const double w = weights(j, i);
                    if (w != 0.0 && model_.n_controls > 0) {
                        model_.mode_control_vjp(i, tm, z_left, u, mu, gu2);
                        g.d_omega.row(j).noalias() += (h * w) * gu2.transpose();
                    }
                }
                if (has_a) {
                    adjoint_linear(mu, tmp);
                    lam = mu + (h * (1.0 - kTheta)) * tmp;
                } else {
                    lam = mu;
                }
            }

            model_.running_cost_grad(z_left, u, gz, gu);
            lam.noalias() += (0.5 * h) * gz;
            g.d_omega.row(j).noalias() += (0.5 * h) * gu.transpose();
        }
    }
    return g;
}

double evaluate_cost(const SemilinearModel& model, const Trajectory& traj, const TimeGrid& grid,
                     const Eigen::MatrixXd& omega) {
    if (traj.grid_node_index.size() != grid.cells() + 1)
        throw ValidationError("trajectory was not produced on this grid");
    for (std::size_t j = 0; j < traj.grid_node_index.size(); ++j) {
        const double t = traj.times[traj.grid_node_index[j]];
        if (std::abs(t - grid.node(j)) > 1e-9 * (1.0 + std::abs(t)))
            throw ValidationError("trajectory nodes do not match grid nodes");
    }
    if (omega.rows() != static_cast<Eigen::Index>(grid.cells()) || omega.cols() != model.n_controls)
        throw ValidationError("omega matrix shape mismatch");

    detail::KahanSum acc;
    for (std::size_t j = 0; j < grid.cells(); ++j) {
        const Eigen::VectorXd u = omega.row(static_cast<Eigen::Index>(j)).transpose();
        for (std::size_t s = traj.grid_node_index[j]; s < traj.grid_node_index[j + 1]; ++s) {
            const double h = traj.times[s + 1] - traj.times[s];
            acc.add(0.5 * h *
                    (model.running_cost(traj.states[s], u) + model.running_cost(traj.states[s + 1], u)));
        }
    }
    return model.terminal_cost(traj.states.back()) + acc.value();
}

ControlGradient adjoint_gradient(const SemilinearModel& model, const TimeGrid& grid,
                                 const SubstepScheme& scheme, const Eigen::MatrixXd& omega,
                                 const Eigen::MatrixXd& weights) {
    return SchemeIntegrator(model, grid, scheme).gradient(omega, weights);
}

Trajectory integrate(const SemilinearModel& model, const TimeGrid& grid,
                     const Eigen::MatrixXd& omega, const Eigen::MatrixXd& weights, double tol,
                     const IntegrateOptions& opts, SubstepScheme* used_scheme) {
    if (!(tol > 0.0)) throw ValidationError("integration tolerance must be positive");
    validate_model(model);

    // Mode weights entering here must be convex multipliers (or one-hot rows).
    RelaxedControl probe{grid, omega, weights};
    canonicalize_relaxed(probe);

    SubstepScheme scheme = SubstepScheme::constant(grid.cells(), opts.initial_substeps);
    Trajectory coarse = SchemeIntegrator(model, grid, scheme).forward(omega, probe.alpha);

    for (int d = 0; d < opts.max_doublings; ++d) {
        SubstepScheme fine_scheme = scheme.doubled();
        // Both histories live simultaneously below; refuse to double past the
        // storage budget instead of exhausting memory on a diverging estimate.
        std::size_t fine_states = 1;
        for (int k : fine_scheme.per_cell) fine_states += static_cast<std::size_t>(k);
        if (3 * fine_states * static_cast<std::size_t>(model.dim) * sizeof(double) >
            opts.max_state_bytes)
            throw ComputationError(
                "substep refinement exceeded the storage budget before reaching tolerance " +
                std::to_string(tol));
        Trajectory fine = SchemeIntegrator(model, grid, fine_scheme).forward(omega, probe.alpha);

        double err = 0.0;
        Eigen::VectorXd diff(model.dim);
        for (std::size_t j = 0; j < grid.cells(); ++j) {
            const int k = scheme.per_cell[j];
            for (int s = 0; s <= k; ++s) {
                const std::size_t ic = coarse.grid_node_index[j] + static_cast<std::size_t>(s);
                const std::size_t iff = fine.grid_node_index[j] + static_cast<std::size_t>(2 * s);
                diff = coarse.states[ic] - fine.states[iff];
                err = std::max(err, model.weighted_norm(diff));
            }
        }

        if (err <= tol) {
            fine.accuracy = err;
            if (used_scheme) *used_scheme = fine_scheme;
            return fine;
        }
        coarse = std::move(fine);
        scheme = std::move(fine_scheme);
    }
    throw ComputationError("substep refinement did not reach tolerance " + std::to_string(tol) +
                           " within " + std::to_string(opts.max_doublings) + " doublings");
}

ConstraintReport check_state_constraint(const Trajectory& traj, const StateConstraint& constraint) {
    if (!constraint.g) throw ValidationError("state constraint callback missing");
    ConstraintReport rep;
    rep.min_value = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < traj.times.size(); ++s) {
        const double v = constraint.g(traj.states[s], traj.times[s]);
        if (v < rep.min_value) {
            rep.min_value = v;
            rep.min_time = traj.times[s];
        }
    }
    rep.violated = rep.min_value < 0.0;
    return rep;
}

}  // namespace miocp
