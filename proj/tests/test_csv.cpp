#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "miocp/csv_io.hpp"
#include "miocp/errors.hpp"
#include "miocp/experiment.hpp"
#include "test_helpers.hpp"

using namespace miocp;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("miocp_test_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("relaxed control survives a round trip bitwise") {
    std::mt19937_64 rng(31337);
    const TimeGrid g = testutil::random_grid(rng, 12);
    RelaxedControl rc = testutil::random_relaxed(rng, g, 3, 2);
    canonicalize_relaxed(rc);

    TempDir tmp;
    const auto file = tmp.path / "control.csv";
    write_control_csv(file, rc);
    const RelaxedControl back = read_control_csv(file);

    REQUIRE(back.grid.nodes().size() == g.nodes().size());
    for (std::size_t i = 0; i < g.nodes().size(); ++i) CHECK(back.grid.node(i) == g.node(i));
    REQUIRE(back.alpha.rows() == rc.alpha.rows());
    REQUIRE(back.alpha.cols() == rc.alpha.cols());
    CHECK((back.alpha - rc.alpha).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((back.omega - rc.omega).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("binary control reads back as one-hot rows") {
    BinaryControl bc;
    bc.grid = TimeGrid({0.0, 0.5, 2.0, 3.0});
    bc.n_modes = 3;
    bc.mode = {2, 0, 1};
    bc.omega.resize(3, 1);
    bc.omega << -1.0, 0.25, 9.5;

    TempDir tmp;
    const auto file = tmp.path / "binary.csv";
    write_control_csv(file, bc);
    const RelaxedControl back = read_control_csv(file);
    CHECK(back.alpha(0, 2) == 1.0);
    CHECK(back.alpha(1, 0) == 1.0);
    CHECK(back.alpha(2, 1) == 1.0);
    CHECK(back.alpha.sum() == 3.0);
    CHECK(back.omega(2, 0) == 9.5);
}

TEST_CASE("malformed control files name the offending line") {
    TempDir tmp;
    const auto file = tmp.path / "bad.csv";

    auto write_file = [&](const std::string& text) {
        std::ofstream os(file);
        os << text;
    };

    write_file("t_start,t_end,mode_1\n");  // no rows
    CHECK_THROWS_AS(read_control_csv(file), ValidationError);

    write_file("nonsense,mode_1,mode_2\n0,1,1,0\n");
    CHECK_THROWS_WITH_AS(read_control_csv(file), doctest::Contains("header"), ValidationError);

    write_file("t_start,t_end,mode_1,mode_2\n0,1,0.5,oops\n");
    CHECK_THROWS_WITH_AS(read_control_csv(file), doctest::Contains("line 2"), ValidationError);

    // a gap between consecutive cells
    write_file("t_start,t_end,mode_1,mode_2\n0,1,1,0\n1.5,2,0,1\n");
    CHECK_THROWS_WITH_AS(read_control_csv(file), doctest::Contains("line 3"), ValidationError);

    // off-simplex row
    write_file("t_start,t_end,mode_1,mode_2\n0,1,0.9,0.9\n");
    CHECK_THROWS_AS(read_control_csv(file), ValidationError);

    CHECK_THROWS_AS(read_control_csv(tmp.path / "absent.csv"), ValidationError);
}

TEST_CASE("history file carries the schedule and the stop label") {
    DriverResult res;
    res.budget_variant = false;
    res.reason = StopReason::cost_gap;
    for (int k = 0; k < 2; ++k) {
        RunRecord rec;
        rec.k = k;
        rec.dt_max = 0.5 / (k + 1);
        rec.eps_k = 1e-3 / (k + 1);
        rec.j_relaxed = 10.0 + k;
        rec.j_integer = 12.0 - k;
        rec.total_switches = 3 * k;
        if (k == 1) rec.reason = StopReason::cost_gap;
        res.history.push_back(rec);
    }

    TempDir tmp;
    const auto file = tmp.path / "history.csv";
    write_history_csv(file, res);

    std::ifstream is(file);
    std::string header, row0, row1;
    REQUIRE(std::getline(is, header));
    REQUIRE(std::getline(is, row0));
    REQUIRE(std::getline(is, row1));
    CHECK(header == "k,dt_max,eps_k,J_rel,J_int,rel_error,term_reason");
    CHECK(row0.rfind("0,", 0) == 0);
    CHECK(row0.back() == ',');  // no reason on intermediate rows
    CHECK(row1.find("step7") != std::string::npos);
    // rel_error of row k compares J_int^k to the final relaxed cost 11
    CHECK(row0.find(std::to_string(std::abs(11.0 - 12.0) / 11.0).substr(0, 8)) !=
          std::string::npos);
}

TEST_CASE("trajectory export with sidecar") {
    const SemilinearModel m = testutil::decay_model(1.0);
    const TimeGrid g = TimeGrid::uniform(0.0, 1.0, 2);
    const Eigen::MatrixXd omega(2, 0);
    const Eigen::MatrixXd w = Eigen::MatrixXd::Ones(2, 1);
    const Trajectory traj = integrate(m, g, omega, w, 1e-8);

    TempDir tmp;
    const auto file = tmp.path / "traj.csv";
    write_trajectory_csv(file, traj);
    write_trajectory_sidecar(file, m, traj);
    write_state_norm_csv(tmp.path / "norm.csv", m, traj);

    std::ifstream is(file);
    std::string header;
    REQUIRE(std::getline(is, header));
    CHECK(header == "t,z_1");

    std::ifstream sj(tmp.path / "traj.csv.json");
    REQUIRE(sj.good());
    const nlohmann::json meta = nlohmann::json::parse(sj);
    CHECK(meta["dim"] == 1);
    CHECK(meta["nodes"] == traj.times.size());

    std::ifstream ns(tmp.path / "norm.csv");
    REQUIRE(std::getline(ns, header));
    CHECK(header == "t,norm");
}

TEST_CASE("experiment config parsing") {
    std::istringstream is(
        "# comment\n"
        "model = lotka_volterra\n"
        "t_final = 12\n"
        "initial_cells = 4\n"
        "mode = minmax\n"
        "out = /tmp/somewhere\n"
        "\n"
        "[algorithm]\n"
        "epsilon = 1e-4\n"
        "refinements = 5\n"
        "budget = 0,1,3\n"
        "budget = 1,0,2\n"
        "\n"
        "[lotka_volterra]\n"
        "n = 16\n"
        "b1 = 0.65\n"
        "uniform_initial = 1.2, 0.8\n");
    const ExperimentConfig cfg = parse_experiment_config(is);
    CHECK(cfg.model == "lotka_volterra");
    CHECK(cfg.t_final == 12.0);
    CHECK(cfg.initial_cells == 4);
    CHECK(cfg.rounding == "minmax");
    CHECK(cfg.out_dir == "/tmp/somewhere");
    CHECK(cfg.algorithm.epsilon == 1e-4);
    CHECK(cfg.algorithm.refinements == 5);
    REQUIRE(cfg.budgets.size() == 2);
    CHECK(cfg.budgets[0] == std::array<long, 3>{0, 1, 3});
    CHECK(cfg.budgets[1] == std::array<long, 3>{1, 0, 2});
    CHECK(cfg.lotka.n == 16);
    CHECK(cfg.lotka.b1 == 0.65);
    REQUIRE(cfg.lotka.uniform_initial.has_value());
    CHECK((*cfg.lotka.uniform_initial)[0] == 1.2);

    const nlohmann::json j = config_to_json(cfg);
    CHECK(j["model"] == "lotka_volterra");
    CHECK(j["algorithm"]["budgets"].size() == 2);
}

TEST_CASE("experiment config rejections name the line") {
    auto reject = [](const std::string& text, const char* needle) {
        std::istringstream is(text);
        CHECK_THROWS_WITH_AS(parse_experiment_config(is), doctest::Contains(needle),
                             ValidationError);
    };
    reject("model = heat2d\nbogus_key = 1\n", "line 2");
    reject("t_final = -3\n", "positive");
    reject("[weird_section]\n", "unknown section");
    reject("model = pendulum\n", "model must be");
    reject("[algorithm]\nbudget = 1,2\n", "budget must be");
    reject("t_final\n", "expected key = value");
    reject("initial_cells = 2.5\n", "not an integer");
    reject("[heat2d]\nnx = ten\n", "line 2");
}

TEST_CASE("presets select the two study problems") {
    const ExperimentConfig heat = preset_config("heat");
    CHECK(heat.model == "heat2d");
    CHECK(heat.t_final == 15.0);
    CHECK(heat.initial_cells == 8);
    const ExperimentConfig lotka = preset_config("lotka");
    CHECK(lotka.model == "lotka_volterra");
    CHECK(lotka.t_final == 12.0);
    CHECK(lotka.initial_cells == 6);
    CHECK_THROWS_AS(preset_config("nope"), ValidationError);
}
