#include <doctest.h>

#include "miocp/bounds.hpp"
#include "miocp/errors.hpp"
#include "miocp/models.hpp"
#include "miocp/relaxed_solver.hpp"
#include "test_helpers.hpp"

using namespace miocp;

namespace {

EstimateConstants set_a() {
    EstimateConstants c;
    c.eta = 1.0;
    c.xi = 2.0;
    c.lip_f = 0.5;
    c.mode_sup = Eigen::Vector2d(1.0, 2.0);
    c.mode_deriv = Eigen::VectorXd::Constant(1, 4.0);
    c.stability = 2.0;
    c.semigroup = 1.0;
    c.t_final = 2.0;
    return c;
}

}  // namespace

TEST_CASE("growth constants against hand-computed values") {
    const ErrorBounds a = bound_theorem23(set_a(), 0.1, 0.05, 3);
    CHECK(a.c1 == doctest::Approx(87.98501851068944).epsilon(1e-13));
    CHECK(a.c2 == doctest::Approx(29.901100113049495).epsilon(1e-13));
    CHECK(a.c3 == doctest::Approx(447.9250925534472).epsilon(1e-13));
    CHECK(a.c4 == doctest::Approx(149.50550056524747).epsilon(1e-13));
    CHECK(a.state == doctest::Approx(11.788611862373894).epsilon(1e-13));
    CHECK(a.cost == doctest::Approx(59.74305931186947).epsilon(1e-13));

    EstimateConstants cb;
    cb.eta = 0.5;
    cb.xi = 0.0;
    cb.lip_f = 1.0;
    cb.mode_sup = Eigen::Vector3d(0.3, 0.7, 1.0);
    cb.mode_deriv = Eigen::Vector2d(1.0, 1.0);
    cb.stability = 1.5;
    cb.semigroup = 2.0;
    cb.t_final = 0.5;
    const ErrorBounds b = bound_theorem23(cb, 0.01, 0.1, 4);
    CHECK(b.c1 == doctest::Approx(19.348402342098556).epsilon(1e-13));
    CHECK(b.c2 == doctest::Approx(8.154845485377136).epsilon(1e-13));
    CHECK(b.c3 == doctest::Approx(9.674201171049278).epsilon(1e-13));
    CHECK(b.c4 == doctest::Approx(4.077422742688568).epsilon(1e-13));
    CHECK(b.state == doctest::Approx(2.639937669034126).epsilon(1e-13));
    CHECK(b.cost == doctest::Approx(1.319968834517063).epsilon(1e-13));
}

TEST_CASE("budgeted variant replaces the grid term by the attained deviation") {
    const ErrorBounds c = bound_theorem31(set_a(), 0.05, 0.2, 0.05);
    CHECK(c.state == doctest::Approx(11.874525953796846).epsilon(1e-13));
    CHECK(c.cost == doctest::Approx(59.77262976898423).epsilon(1e-13));
}

TEST_CASE("degenerate bounds collapse to single terms") {
    const ErrorBounds z1 = bound_theorem23(set_a(), 0.0, 0.05, 3);
    CHECK(z1.state == doctest::Approx(2.9901100113049495).epsilon(1e-13));
    const ErrorBounds z2 = bound_theorem23(set_a(), 0.1, 0.05, 1);  // one mode: no gap term
    CHECK(z2.state == doctest::Approx(8.798501851068945).epsilon(1e-13));
    const ErrorBounds z3 = bound_theorem23(set_a(), 0.1, 0.0, 3);
    CHECK(z3.state == doctest::Approx(8.798501851068945).epsilon(1e-13));
}

TEST_CASE("bounds grow with both accuracy knobs") {
    const EstimateConstants c = set_a();
    const ErrorBounds base = bound_theorem23(c, 0.1, 0.05, 3);
    CHECK(bound_theorem23(c, 0.2, 0.05, 3).state > base.state);
    CHECK(bound_theorem23(c, 0.1, 0.10, 3).state > base.state);
    CHECK(bound_theorem23(c, 0.1, 0.05, 4).cost > base.cost);
}

TEST_CASE("mode-regularity estimate for the linear heat actuators") {
    Heat2dParams hp;
    hp.nx = 8;
    hp.ny = 16;
    const SemilinearModel m = build_heat2d(hp);
    const TimeGrid g = TimeGrid::uniform(0.0, 1.0, 3);
    RelaxedControl rc = uniform_start(m, g);
    rc.omega.setConstant(0.5);
    const H2Report rep = check_h2_linear(m, rc, 1.0, 5);
    CHECK(rep.holds);
    REQUIRE(rep.mode_deriv.size() == 9);
    CHECK(rep.l_bar.minCoeff() > 0.0);      // diffusion acts on every actuator shape
    CHECK(rep.c_bar.maxCoeff() < 1e-9);     // shapes are constant within cells
    for (int i = 0; i < 9; ++i)
        CHECK(rep.mode_deriv(i) == doctest::Approx(rep.l_bar(i) + rep.c_bar(i)));

    // state-dependent modes are refused
    const SemilinearModel lv = build_lotka_volterra({.n = 6});
    RelaxedControl rc2 = uniform_start(lv, g);
    CHECK_THROWS_AS(check_h2_linear(lv, rc2, 1.0, 3), ValidationError);
}

TEST_CASE("constraint transfer inherits the state bound") {
    const SemilinearModel m = testutil::decay_model(1.0);
    const TimeGrid g = TimeGrid::uniform(0.0, 1.0, 2);
    const Eigen::MatrixXd omega(2, 0);
    const Eigen::MatrixXd w = Eigen::MatrixXd::Ones(2, 1);
    const Trajectory traj = integrate(m, g, omega, w, 1e-10);

    StateConstraint pos;
    pos.g = [](const Eigen::VectorXd& z, double) { return z(0); };
    const ConstraintReport plain = check_state_constraint(traj, pos);
    CHECK(!plain.violated);
    CHECK(plain.min_value == doctest::Approx(std::exp(-1.0)).epsilon(1e-6));
    CHECK(plain.min_time == doctest::Approx(1.0));
    CHECK(plain.bound == 0.0);

    const ConstraintReport rep =
        check_state_constraint(traj, pos, set_a(), 0.1, 0.05, 3);
    CHECK(rep.bound == doctest::Approx(11.788611862373894).epsilon(1e-12));

    StateConstraint scaled = pos;
    scaled.zeta = [](double t) { return t; };  // profile peaks at the endpoint
    const ConstraintReport rep2 =
        check_state_constraint(traj, scaled, set_a(), 0.1, 0.05, 3);
    CHECK(rep2.bound == doctest::Approx(1.0 * 11.788611862373894).epsilon(1e-12));
}
