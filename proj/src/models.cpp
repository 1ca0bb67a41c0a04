#include "miocp/models.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <vector>

#include "miocp/errors.hpp"

namespace miocp {

namespace {
constexpr double kPi = std::numbers::pi;
}

SemilinearModel build_heat2d(const Heat2dParams& p) {
    // Actuator lattice spacing is 0.25 in both directions; require at least
    // two mesh cells between neighbouring actuators so they stay resolved.
    if (p.nx < 8 || p.ny < 16)
        throw ValidationError("heat2d mesh too coarse to separate the actuators (need nx >= 8, ny >= 16)");
    if (!(p.diffusivity > 0.0)) throw ValidationError("heat2d needs positive diffusivity");
    if (!(p.actuator_eps > 0.0)) throw ValidationError("heat2d needs positive actuator variance");

    const double len_x = 1.0, len_y = 2.0;
    const int mx = p.nx - 1, my = p.ny - 1;  // interior nodes per dimension
    const double hx = len_x / p.nx, hy = len_y / p.ny;
    const Eigen::Index dim = static_cast<Eigen::Index>(mx) * my;
    auto idx = [mx](int ix, int iy) { return static_cast<Eigen::Index>(iy) * mx + ix; };

    auto a = std::make_shared<Eigen::SparseMatrix<double>>(dim, dim);
    {
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(static_cast<std::size_t>(dim) * 5);
        const double cx = p.diffusivity / (hx * hx), cy = p.diffusivity / (hy * hy);
        for (int iy = 0; iy < my; ++iy) {
            for (int ix = 0; ix < mx; ++ix) {
                const Eigen::Index row = idx(ix, iy);
                trip.emplace_back(row, row, -2.0 * (cx + cy));
                if (ix > 0) trip.emplace_back(row, idx(ix - 1, iy), cx);
                if (ix < mx - 1) trip.emplace_back(row, idx(ix + 1, iy), cx);
                if (iy > 0) trip.emplace_back(row, idx(ix, iy - 1), cy);
                if (iy < my - 1) trip.emplace_back(row, idx(ix, iy + 1), cy);
            }
        }
        a->setFromTriplets(trip.begin(), trip.end());
    }

    SemilinearModel m;
    m.dim = dim;
    m.n_modes = 9;
    m.n_controls = 1;
    m.linear_matrix = a;
    m.linear_self_adjoint = true;
    m.modes_state_independent = true;
    m.mass_weights = Eigen::VectorXd::Constant(dim, hx * hy);

    m.z0.resize(dim);
    for (int iy = 0; iy < my; ++iy)
        for (int ix = 0; ix < mx; ++ix)
            m.z0(idx(ix, iy)) = p.initial_scale * 10.0 * std::sin(kPi * (ix + 1) * hx) * 10.0 *
                                std::sin(kPi * (iy + 1) * hy);

    // Actuator centers (xi_j, zeta_k) = ((j + 0.005*len_x)/4, (k + 0.005*len_y)/4),
    // j,k = 1..3; shapes are unit-integral product Gaussians.
    auto shapes = std::make_shared<std::vector<Eigen::VectorXd>>();
    const double norm = 1.0 / (2.0 * kPi * p.actuator_eps);
    for (int j = 1; j <= 3; ++j) {
        for (int k = 1; k <= 3; ++k) {
            const double cx0 = (j + 0.005 * len_x) / 4.0;
            const double cy0 = (k + 0.005 * len_y) / 4.0;
            Eigen::VectorXd b(dim);
            for (int iy = 0; iy < my; ++iy) {
                for (int ix = 0; ix < mx; ++ix) {
                    const double dx = (ix + 1) * hx - cx0, dy = (iy + 1) * hy - cy0;
                    b(idx(ix, iy)) = norm * std::exp(-(dx * dx + dy * dy) / (2.0 * p.actuator_eps));
                }
            }
            shapes->push_back(std::move(b));
        }
    }

    m.u_lower = Eigen::VectorXd::Constant(1, -std::numeric_limits<double>::infinity());
    m.u_upper = Eigen::VectorXd::Constant(1, std::numeric_limits<double>::infinity());

    m.mode_rhs = [shapes](int i, double, const Eigen::VectorXd&, const Eigen::VectorXd& u,
                          Eigen::VectorXd& out) { out = (*shapes)[i] * u(0); };
    m.mode_state_vjp = [dim](int, double, const Eigen::VectorXd&, const Eigen::VectorXd&,
                             const Eigen::VectorXd&, Eigen::VectorXd& out) { out.setZero(dim); };
    m.mode_control_vjp = [shapes](int i, double, const Eigen::VectorXd&, const Eigen::VectorXd&,
                                  const Eigen::VectorXd& w, Eigen::VectorXd& out) {
        out.resize(1);
        out(0) = (*shapes)[i].dot(w);
    };

    const Eigen::VectorXd wts = m.mass_weights;
    const double ls = p.lambda_state, lc = p.lambda_control;
    m.terminal_cost = [wts](const Eigen::VectorXd& z) { return wts.cwiseProduct(z).dot(z); };
    m.terminal_cost_grad = [wts](const Eigen::VectorXd& z, Eigen::VectorXd& g) {
        g = 2.0 * wts.cwiseProduct(z);
    };
    m.running_cost = [wts, ls, lc](const Eigen::VectorXd& z, const Eigen::VectorXd& u) {
        return ls * wts.cwiseProduct(z).dot(z) + lc * u(0) * u(0);
    };
    m.running_cost_grad = [wts, ls, lc](const Eigen::VectorXd& z, const Eigen::VectorXd& u,
                                        Eigen::VectorXd& gz, Eigen::VectorXd& gu) {
        gz = (2.0 * ls) * wts.cwiseProduct(z);
        gu.resize(1);
        gu(0) = 2.0 * lc * u(0);
    };

    m.metadata = {{"family", "heat2d"},
                  {"nx", p.nx},
                  {"ny", p.ny},
                  {"diffusivity", p.diffusivity},
                  {"actuator_eps", p.actuator_eps},
                  {"lambda_state", p.lambda_state},
                  {"lambda_control", p.lambda_control},
                  {"initial_scale", p.initial_scale},
                  {"modes", "actuator (j,k) lattice, mode index = 3*(j-1)+(k-1)"}};
    return m;
}

SemilinearModel build_lotka_volterra(const LotkaVolterraParams& p) {
    if (p.n < 4) throw ValidationError("lotka_volterra mesh needs n >= 4");
    if (p.d1 < 0.0 || p.d2 < 0.0) throw ValidationError("negative diffusion");
    if (!(p.c1 > 0.0) || !(p.c2 > 0.0))
        throw ValidationError("lotka_volterra needs positive interaction constants c1, c2");
    if (!(p.init_eps > 0.0)) throw ValidationError("initial bump variance must be positive");

    const double h = 2.0 / p.n;
    std::vector<int> cell_of(static_cast<std::size_t>(p.n) * p.n, -1);
    std::vector<std::pair<int, int>> cells;
    for (int iy = 0; iy < p.n; ++iy) {
        for (int ix = 0; ix < p.n; ++ix) {
            const double x = (ix + 0.5) * h - 1.0, y = (iy + 0.5) * h - 1.0;
            if (x * x + y * y <= 1.0) {
                cell_of[static_cast<std::size_t>(iy) * p.n + ix] = static_cast<int>(cells.size());
                cells.emplace_back(ix, iy);
            }
        }
    }
    const auto n_cells = static_cast<Eigen::Index>(cells.size());
    if (n_cells == 0) throw ValidationError("disc mask is empty at this resolution");
    const Eigen::Index dim = 2 * n_cells;

    // Zero-flux Laplacian on the masked cells: reflection makes boundary edges
    // drop out, leaving the (negated, scaled) graph Laplacian of the mask.
    auto a = std::make_shared<Eigen::SparseMatrix<double>>(dim, dim);
    {
        std::vector<Eigen::Triplet<double>> trip;
        const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
        for (Eigen::Index c = 0; c < n_cells; ++c) {
            const auto [ix, iy] = cells[static_cast<std::size_t>(c)];
            int degree = 0;
            for (int d = 0; d < 4; ++d) {
                const int jx = ix + dx[d], jy = iy + dy[d];
                if (jx < 0 || jy < 0 || jx >= p.n || jy >= p.n) continue;
                const int nb = cell_of[static_cast<std::size_t>(jy) * p.n + jx];
                if (nb < 0) continue;
                ++degree;
                trip.emplace_back(c, nb, p.d1 / (h * h));
                trip.emplace_back(n_cells + c, n_cells + nb, p.d2 / (h * h));
            }
            trip.emplace_back(c, c, -degree * p.d1 / (h * h));
            trip.emplace_back(n_cells + c, n_cells + c, -degree * p.d2 / (h * h));
        }
        a->setFromTriplets(trip.begin(), trip.end());
    }

    SemilinearModel m;
    m.dim = dim;
    m.n_modes = 2;
    m.n_controls = 0;
    m.linear_matrix = a;
    m.linear_self_adjoint = true;
    m.modes_state_independent = false;
    m.mass_weights = Eigen::VectorXd::Constant(dim, h * h);
    m.u_lower.resize(0);
    m.u_upper.resize(0);

    m.z0.resize(dim);
    for (Eigen::Index c = 0; c < n_cells; ++c) {
        const auto [ix, iy] = cells[static_cast<std::size_t>(c)];
        if (p.uniform_initial) {
            m.z0(c) = (*p.uniform_initial)[0];
            m.z0(n_cells + c) = (*p.uniform_initial)[1];
        } else {
            const double x = (ix + 0.5) * h - 1.0, y = (iy + 0.5) * h - 1.0;
            const double bump =
                std::exp(-(x * x + y * y) / (2.0 * p.init_eps)) / std::sqrt(2.0 * kPi * p.init_eps);
            m.z0(c) = 0.5 * bump;
            m.z0(n_cells + c) = 0.7 * bump;
        }
    }

    const double a1 = p.a1, a2 = p.a2, b1 = p.b1, b2 = p.b2, c1 = p.c1, c2 = p.c2;
    const Eigen::Index k = n_cells;

    // mode i carries fishing intensity v = i (0 or 1)
    m.mode_rhs = [=](int i, double, const Eigen::VectorXd& z, const Eigen::VectorXd&,
                     Eigen::VectorXd& out) {
        const double v = static_cast<double>(i);
        out.resize(2 * k);
        for (Eigen::Index c = 0; c < k; ++c) {
            const double z1 = z(c), z2 = z(k + c);
            out(c) = z1 * (a1 - b1 * v - c1 * z2);
            out(k + c) = z2 * (-a2 - b2 * v + c2 * z1);
        }
    };
    m.mode_state_vjp = [=](int i, double, const Eigen::VectorXd& z, const Eigen::VectorXd&,
                           const Eigen::VectorXd& w, Eigen::VectorXd& out) {
        const double v = static_cast<double>(i);
        out.resize(2 * k);
        for (Eigen::Index c = 0; c < k; ++c) {
            const double z1 = z(c), z2 = z(k + c);
            out(c) = w(c) * (a1 - b1 * v - c1 * z2) + w(k + c) * (c2 * z2);
            out(k + c) = w(c) * (-c1 * z1) + w(k + c) * (-a2 - b2 * v + c2 * z1);
        }
    };
    m.mode_control_vjp = [](int, double, const Eigen::VectorXd&, const Eigen::VectorXd&,
                            const Eigen::VectorXd&, Eigen::VectorXd& out) { out.resize(0); };

    const double zbar1 = p.a2 / p.c2, zbar2 = p.a1 / p.c1;
    const double w2 = h * h;
    m.terminal_cost = [](const Eigen::VectorXd&) { return 0.0; };
    m.terminal_cost_grad = [dim](const Eigen::VectorXd&, Eigen::VectorXd& g) { g.setZero(dim); };
    m.running_cost = [=](const Eigen::VectorXd& z, const Eigen::VectorXd&) {
        double s = 0.0;
        for (Eigen::Index c = 0; c < k; ++c) {
            const double e1 = z(c) - zbar1, e2 = z(k + c) - zbar2;
            s += w2 * (e1 * e1 + e2 * e2);
        }
        return s;
    };
    m.running_cost_grad = [=](const Eigen::VectorXd& z, const Eigen::VectorXd&, Eigen::VectorXd& gz,
                              Eigen::VectorXd& gu) {
        gz.resize(2 * k);
        for (Eigen::Index c = 0; c < k; ++c) {
            gz(c) = 2.0 * w2 * (z(c) - zbar1);
            gz(k + c) = 2.0 * w2 * (z(k + c) - zbar2);
        }
        gu.resize(0);
    };

    m.metadata = {{"family", "lotka_volterra"},
                  {"n", p.n},
                  {"active_cells", static_cast<int>(n_cells)},
                  {"d1", p.d1},
                  {"d2", p.d2},
                  {"a1", p.a1},
                  {"a2", p.a2},
                  {"b1", p.b1},
                  {"b2", p.b2},
                  {"c1", p.c1},
                  {"c2", p.c2},
                  {"init_eps", p.init_eps},
                  {"steady_state", {zbar1, zbar2}},
                  {"modes", "fishing intensity v = mode index (0 or 1)"}};
    return m;
}

}  // namespace miocp
