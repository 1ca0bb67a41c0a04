#pragma once

#include <array>
#include <optional>

#include "miocp/model.hpp"

namespace miocp {

/* 2-D heat equation on [0,1] x [0,2], homogeneous Dirichlet boundary:
 *
 *   dz/dt = rho * laplace(z) + B_i(x) * u(t),
 *
 * nine Gaussian actuator shapes B_i centered on a 3x3 interior lattice
 * (one mode per actuator), unit spatial integral each.  Second-order finite
 * differences on an (nx x ny)-cell mesh; the state holds the interior nodes.
 * Cost: |z(T)|^2 + lambda_state * int |z|^2 + lambda_control * int u^2. */
struct Heat2dParams {
    int nx = 20;  // cells along xi in [0,1]
    int ny = 40;  // cells along zeta in [0,2]
    double diffusivity = 0.01;
    double actuator_eps = 1e-3;   // Gaussian variance of the actuator shapes
    double lambda_state = 2.0;
    double lambda_control = 1.0 / 500.0;
    double initial_scale = 1.0;   // scales the product-sine initial data
};

SemilinearModel build_heat2d(const Heat2dParams& params = {});

/* Diffusive predator(z2)-prey(z1) system on the unit disc centered at (1,1),
 * homogeneous Neumann boundary:
 *
 *   dz1/dt = d1 * laplace(z1) + z1 * ( a1 - b1 * v - c1 * z2)
 *   dz2/dt = d2 * laplace(z2) + z2 * (-a2 - b2 * v + c2 * z1)
 *
 * with the fishing intensity v in {0, 1} as the two modes.  Without fishing
 * the kinetics cycle around the coexistence state (a2/c2, a1/c1); fishing
 * harvests both species.  Cell-centered finite volumes on the cells of a
 * n x n mesh of [0,2]^2 whose centers lie in the disc; reflection
 * (zero-flux) at masked edges.  Cost integrates the squared distance to the
 * coexistence state. */
struct LotkaVolterraParams {
    int n = 24;  // cells per dimension of the bounding box
    double d1 = 0.05, d2 = 0.01;
    double a1 = 1.0, a2 = 1.0;
    double b1 = 0.7, b2 = 0.5;
    double c1 = 1.0, c2 = 1.0;
    double init_eps = 0.5;  // variance of the radial initial bump
    std::optional<std::array<double, 2>> uniform_initial;  // overrides the bump
};

SemilinearModel build_lotka_volterra(const LotkaVolterraParams& params = {});

}  // namespace miocp
