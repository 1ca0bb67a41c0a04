#include "miocp/model.hpp"

#include <cmath>
#include <random>
#include <string>

#include "miocp/errors.hpp"

namespace miocp {

void SemilinearModel::linear(const Eigen::VectorXd& z, Eigen::VectorXd& out) const {
    if (apply_linear) {
        apply_linear(z, out);
    } else if (linear_matrix) {
        out.noalias() = (*linear_matrix) * z;
    } else {
        out.setZero(z.size());
    }
}

double SemilinearModel::weighted_norm(const Eigen::VectorXd& v) const {
    return std::sqrt(mass_weights.cwiseProduct(v).dot(v));
}

void validate_model(const SemilinearModel& model) {
    if (model.dim <= 0) throw ValidationError("model dimension must be positive");
    if (model.n_modes < 1) throw ValidationError("model needs at least one mode");
    if (model.n_controls < 0) throw ValidationError("negative control dimension");
    if (model.z0.size() != model.dim) throw ValidationError("z0 size does not match model dim");
    if (model.mass_weights.size() != model.dim)
        throw ValidationError("mass_weights size does not match model dim");
    if ((model.mass_weights.array() <= 0.0).any())
        throw ValidationError("mass_weights must be strictly positive");
    if (model.u_lower.size() != model.n_controls || model.u_upper.size() != model.n_controls)
        throw ValidationError("control bounds must have n_controls entries");
    for (int i = 0; i < model.n_controls; ++i)
        if (!(model.u_lower(i) <= model.u_upper(i)))
            throw ValidationError("control bounds inverted at component " + std::to_string(i));
    if (!model.mode_rhs) throw ValidationError("mode_rhs callback missing");
    if (!model.terminal_cost || !model.running_cost)
        throw ValidationError("cost callbacks missing");

    if (model.linear_matrix &&
        (model.linear_matrix->rows() != model.dim || model.linear_matrix->cols() != model.dim))
        throw ValidationError("linear_matrix shape does not match model dim");

    if (model.has_linear()) {
        // Spot check linearity of the advertised operator on random vectors.
        std::mt19937_64 rng(0x5eed);
        std::normal_distribution<double> dist;
        Eigen::VectorXd a(model.dim), b(model.dim);
        for (Eigen::Index k = 0; k < model.dim; ++k) {
            a(k) = dist(rng);
            b(k) = dist(rng);
        }
        Eigen::VectorXd Aa(model.dim), Ab(model.dim), Ac(model.dim);
        model.linear(a, Aa);
        model.linear(b, Ab);
        Eigen::VectorXd c = 0.37 * a - 1.25 * b;
        model.linear(c, Ac);
        const double scale = Aa.norm() + Ab.norm() + 1.0;
        if ((Ac - (0.37 * Aa - 1.25 * Ab)).norm() > 1e-10 * scale)
            throw ValidationError("linear operator failed the linearity spot check");
    }
}

}  // namespace miocp
