#include <doctest.h>

#include <random>

#include "miocp/errors.hpp"
#include "miocp/rounding.hpp"
#include "test_helpers.hpp"

using namespace miocp;

TEST_CASE("uniform grid basics") {
    const TimeGrid g = TimeGrid::uniform(0.0, 2.0, 4);
    CHECK(g.cells() == 4);
    CHECK(g.t_start() == 0.0);
    CHECK(g.t_final() == 2.0);
    CHECK(g.dt(0) == doctest::Approx(0.5));
    CHECK(g.dt_max() == doctest::Approx(0.5));
    CHECK(g.horizon() == doctest::Approx(2.0));
}

TEST_CASE("grid rejects non-increasing nodes") {
    CHECK_THROWS_AS(TimeGrid({0.0, 0.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(TimeGrid({0.0, 1.0, 0.5}), ValidationError);
    CHECK_THROWS_AS(TimeGrid({1.0}), ValidationError);
    CHECK_THROWS_AS(TimeGrid::uniform(0.0, 1.0, 0), ValidationError);
    CHECK_THROWS_AS(TimeGrid::uniform(1.0, 1.0, 3), ValidationError);
}

TEST_CASE("bisection inserts midpoints and keeps originals bit-identical") {
    const TimeGrid g({0.0, 1.0, 3.0});
    const TimeGrid f = refine_bisect(g);
    const std::vector<double> expect{0.0, 0.5, 1.0, 2.0, 3.0};
    REQUIRE(f.nodes().size() == expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i) CHECK(f.node(i) == expect[i]);
    CHECK(f.node(0) == g.node(0));
    CHECK(f.node(2) == g.node(1));
    CHECK(f.node(4) == g.node(2));
}

TEST_CASE("canonicalize accepts roundoff jitter and rejects junk") {
    RelaxedControl rc;
    rc.grid = TimeGrid::uniform(0.0, 1.0, 2);
    rc.omega.resize(2, 0);

    rc.alpha.resize(2, 2);
    rc.alpha << 0.3 + 2e-10, 0.7, -5e-10, 1.0 + 4e-10;
    canonicalize_relaxed(rc);
    for (int j = 0; j < 2; ++j) {
        CHECK(rc.alpha.row(j).sum() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(rc.alpha.row(j).minCoeff() >= 0.0);
        CHECK(rc.alpha.row(j).maxCoeff() <= 1.0);
    }

    RelaxedControl bad = rc;
    bad.alpha(0, 0) = 0.4;  // row sum 0.4 + 0.7, far off the simplex
    CHECK_THROWS_AS(canonicalize_relaxed(bad), ValidationError);

    RelaxedControl neg = rc;
    neg.alpha(0, 0) = -1e-6;
    CHECK_THROWS_AS(canonicalize_relaxed(neg), ValidationError);

    RelaxedControl shape = rc;
    shape.alpha.conservativeResize(1, 2);  // row count disagrees with the grid
    CHECK_THROWS_AS(canonicalize_relaxed(shape), ValidationError);
}

TEST_CASE("sum-up rounding hand trace with a tie") {
    RelaxedControl rc;
    rc.grid = TimeGrid({0.0, 1.0, 2.0});
    rc.omega.resize(2, 0);
    rc.alpha.resize(2, 2);
    rc.alpha << 0.5, 0.5, 0.5, 0.5;

    const BinaryControl bc = sur_round(rc);
    REQUIRE(bc.mode.size() == 2);
    // cell 0 ties 0.5 vs 0.5 and goes to mode 0; the deficit then forces mode 1
    CHECK(bc.mode[0] == 0);
    CHECK(bc.mode[1] == 1);
    CHECK(bc.n_modes == 2);
    CHECK(bc.beta(0, 0) == 1.0);
    CHECK(bc.beta(0, 1) == 0.0);

    const DeviationReport dev = accumulated_deviation(rc, bc);
    CHECK(dev.per_mode_max(0) == doctest::Approx(0.5));
    CHECK(dev.per_mode_max(1) == doctest::Approx(0.5));
    CHECK(dev.overall_max == doctest::Approx(0.5));
    CHECK(dev.bound == doctest::Approx(1.0));  // (N-1) * dt_max
}

TEST_CASE("one-hot rows of the rounded control") {
    std::mt19937_64 rng(7);
    const TimeGrid g = testutil::random_grid(rng, 9);
    const RelaxedControl rc = testutil::random_relaxed(rng, g, 3);
    const BinaryControl bc = sur_round(rc);
    const Eigen::MatrixXd b = bc.beta_matrix();
    REQUIRE(b.rows() == 9);
    REQUIRE(b.cols() == 3);
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
        CHECK(b.row(j).sum() == 1.0);
        CHECK(b.row(j).maxCoeff() == 1.0);
        CHECK(b.row(j).minCoeff() == 0.0);
    }
}

TEST_CASE("sum-up rounding respects the integrality-gap bound") {
    std::mt19937_64 rng(20240817);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t cells = 1 + rng() % 40;
        const int n_modes = 2 + static_cast<int>(rng() % 3);
        const TimeGrid g = testutil::random_grid(rng, cells);
        const RelaxedControl rc = testutil::random_relaxed(rng, g, n_modes);
        const BinaryControl bc = sur_round(rc);

        REQUIRE(bc.mode.size() == cells);
        for (int mode : bc.mode) {
            CHECK(mode >= 0);
            CHECK(mode < n_modes);
        }
        const DeviationReport dev = accumulated_deviation(rc, bc);
        CHECK(dev.overall_max <= dev.bound + 1e-12);
        CHECK(dev.per_mode_max.maxCoeff() == dev.overall_max);
    }
}
