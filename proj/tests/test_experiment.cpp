#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>
#include <string>

#include "miocp/errors.hpp"
#include "miocp/experiment.hpp"

using namespace miocp;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        std::mt19937_64 rng(std::random_device{}());
        path = fs::temp_directory_path() / ("miocp_exp_" + std::to_string(rng()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

ExperimentConfig tiny_config(const fs::path& out) {
    ExperimentConfig cfg;
    cfg.model = "lotka_volterra";
    cfg.t_final = 1.0;
    cfg.initial_cells = 2;
    cfg.lotka.n = 6;
    cfg.algorithm.epsilon = 1e-9;  // out of reach, so the refinement cap decides
    cfg.algorithm.refinements = 2;
    cfg.algorithm.solver.max_iters = 40;
    cfg.out_dir = out.string();
    return cfg;
}

}  // namespace

TEST_CASE("experiment run writes the advertised artifact set") {
    TempDir tmp;
    const ExperimentOutput out = run_experiment(tiny_config(tmp.path / "run"));

    CHECK(out.result.history.size() == 2);
    for (const char* name :
         {"history.csv", "control_relaxed.csv", "control_integer.csv", "trajectory_relaxed.csv",
          "trajectory_integer.csv", "trajectory_relaxed.csv.json", "trajectory_integer.csv.json",
          "state_norm_relaxed.csv", "state_norm_integer.csv", "manifest.json"}) {
        CAPTURE(name);
        CHECK(fs::exists(out.out_dir / name));
    }

    const nlohmann::json manifest = nlohmann::json::parse(slurp(out.out_dir / "manifest.json"));
    CHECK(manifest["config"]["model"] == "lotka_volterra");
    CHECK(manifest["reason"] == "cap");
    CHECK(manifest["history"].size() == 2);
    CHECK(manifest["best_iteration"].get<std::size_t>() == out.result.best_index);
}

TEST_CASE("experiment outputs are deterministic byte for byte") {
    TempDir tmp;
    const ExperimentOutput a = run_experiment(tiny_config(tmp.path / "a"));
    const ExperimentOutput b = run_experiment(tiny_config(tmp.path / "b"));
    for (const char* name : {"history.csv", "control_relaxed.csv", "control_integer.csv",
                             "state_norm_integer.csv"}) {
        CAPTURE(name);
        CHECK(slurp(a.out_dir / name) == slurp(b.out_dir / name));
    }
}

TEST_CASE("experiment rejects an unknown model family") {
    TempDir tmp;
    ExperimentConfig cfg = tiny_config(tmp.path / "run");
    cfg.model = "wave9d";
    CHECK_THROWS_AS(run_experiment(cfg), ValidationError);
}
