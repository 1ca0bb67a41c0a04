#include <doctest.h>

#include <random>

#include "miocp/errors.hpp"
#include "miocp/relaxed_solver.hpp"
#include "test_helpers.hpp"

using namespace miocp;

TEST_CASE("simplex projection") {
    Eigen::VectorXd v(2);
    v << 0.6, 0.6;
    Eigen::VectorXd p = simplex_project(v);
    CHECK(p(0) == doctest::Approx(0.5));
    CHECK(p(1) == doctest::Approx(0.5));

    v << 2.0, 0.0;
    p = simplex_project(v);
    CHECK(p(0) == 1.0);
    CHECK(p(1) == 0.0);

    v << -1.0, -2.0;
    p = simplex_project(v);
    CHECK(p(0) == 1.0);
    CHECK(p(1) == 0.0);

    // already feasible points are fixed points
    v << 0.25, 0.75;
    p = simplex_project(v);
    CHECK(p(0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(p(1) == doctest::Approx(0.75).epsilon(1e-15));

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        Eigen::VectorXd x(3 + static_cast<Eigen::Index>(rng() % 4));
        for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = unif(rng);
        const Eigen::VectorXd q = simplex_project(x);
        CHECK(q.minCoeff() >= 0.0);
        CHECK(q.sum() == doctest::Approx(1.0).epsilon(1e-12));
        // projection property: no strictly closer simplex point among samples
        const Eigen::VectorXd r = simplex_project(x + Eigen::VectorXd::Random(x.size()) * 0.1);
        CHECK((x - q).squaredNorm() <= (x - r).squaredNorm() + 1e-12);
    }
}

TEST_CASE("capped simplex projection") {
    Eigen::VectorXd v(2);
    v << 0.2, 0.3;  // interior of the cap: untouched
    Eigen::VectorXd p = simplex_cap_project(v);
    CHECK(p(0) == 0.2);
    CHECK(p(1) == 0.3);

    v << 0.6, 0.6;
    p = simplex_cap_project(v);
    CHECK(p(0) == doctest::Approx(0.5));
    CHECK(p(1) == doctest::Approx(0.5));

    v << -0.5, 0.4;
    p = simplex_cap_project(v);
    CHECK(p(0) == 0.0);
    CHECK(p(1) == doctest::Approx(0.4));
}

TEST_CASE("control injection copies the covering coarse cell") {
    RelaxedControl rc;
    rc.grid = TimeGrid({0.0, 1.0, 3.0});
    rc.omega.resize(2, 1);
    rc.omega << 5.0, -7.0;
    rc.alpha.resize(2, 2);
    rc.alpha << 1.0, 0.0, 0.25, 0.75;

    const TimeGrid fine = refine_bisect(rc.grid);
    const RelaxedControl fi = inject_control(rc, fine);
    REQUIRE(fi.alpha.rows() == 4);
    CHECK(fi.omega(0, 0) == 5.0);
    CHECK(fi.omega(1, 0) == 5.0);
    CHECK(fi.omega(2, 0) == -7.0);
    CHECK(fi.omega(3, 0) == -7.0);
    CHECK(fi.alpha(3, 1) == 0.75);
}

TEST_CASE("uniform start respects the control box") {
    SemilinearModel m = testutil::steer_model(1.0, 1.0);
    m.u_lower(0) = 0.5;
    const TimeGrid g = TimeGrid::uniform(0.0, 1.0, 3);
    const RelaxedControl s = uniform_start(m, g);
    CHECK(s.omega(0, 0) == 0.5);
    CHECK(s.alpha(2, 0) == 1.0);
}

TEST_CASE("projected gradient solves the steering problem") {
    // unique optimum u == 1 with objective 0
    const SemilinearModel m = testutil::steer_model(1.0, 2.0, 1.0);
    const TimeGrid g = TimeGrid::uniform(0.0, 2.0, 8);
    RelaxedSolveOptions opts;
    opts.kkt_tol = 1e-8;
    opts.integrate_tol = 1e-9;
    const RelaxedSolveResult res = solve_relaxed(m, g, uniform_start(m, g), opts);
    CHECK(res.converged);
    CHECK(res.kkt_residual <= 1e-8);
    CHECK(res.objective == doctest::Approx(0.0).epsilon(1e-10));
    for (Eigen::Index j = 0; j < res.control.omega.rows(); ++j)
        CHECK(res.control.omega(j, 0) == doctest::Approx(1.0).epsilon(1e-4));
    // accepted objectives never increase
    for (std::size_t i = 1; i < res.objective_history.size(); ++i)
        CHECK(res.objective_history[i] <= res.objective_history[i - 1] + 1e-15);
}

TEST_CASE("projected gradient finds the bang-bang vertex") {
    const SemilinearModel m = testutil::drift_model(1.0);
    const TimeGrid g = TimeGrid::uniform(0.0, 1.0, 6);
    RelaxedSolveOptions opts;
    opts.kkt_tol = 1e-9;
    const RelaxedSolveResult res = solve_relaxed(m, g, uniform_start(m, g), opts);
    CHECK(res.converged);
    for (Eigen::Index j = 0; j < res.control.alpha.rows(); ++j) {
        CHECK(res.control.alpha(j, 0) == 1.0);
        CHECK(res.control.alpha(j, 1) == 0.0);
    }
    CHECK(res.objective == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("interior simplex optimum is reachable") {
    // slope 0: alpha = (1/2, 1/2) keeps z at 0, the unique pointwise optimum
    const SemilinearModel m = testutil::drift_model(0.0);
    const TimeGrid g = TimeGrid::uniform(0.0, 1.0, 4);
    RelaxedControl start = uniform_start(m, g);
    start.alpha.col(0).setConstant(0.9);
    start.alpha.col(1).setConstant(0.1);
    RelaxedSolveOptions opts;
    opts.kkt_tol = 1e-7;
    const RelaxedSolveResult res = solve_relaxed(m, g, start, opts);
    CHECK(res.objective <= 1e-8);
    for (Eigen::Index j = 0; j < res.control.alpha.rows(); ++j)
        CHECK(res.control.alpha(j, 0) == doctest::Approx(0.5).epsilon(1e-2));
}

TEST_CASE("eliminated-mode parameterization agrees with row projection") {
    const SemilinearModel m = testutil::drift_model(1.0);
    const TimeGrid g = TimeGrid::uniform(0.0, 1.0, 5);
    RelaxedSolveOptions opts;
    opts.kkt_tol = 1e-9;
    RelaxedSolveOptions opts2 = opts;
    opts2.eliminate_last_mode = true;
    const RelaxedSolveResult a = solve_relaxed(m, g, uniform_start(m, g), opts);
    const RelaxedSolveResult b = solve_relaxed(m, g, uniform_start(m, g), opts2);
    CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-7));
    CHECK((a.control.alpha - b.control.alpha).lpNorm<Eigen::Infinity>() < 1e-5);
}
