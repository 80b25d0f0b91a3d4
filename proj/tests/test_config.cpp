#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "plr/config.hpp"
#include "plr/experiment.hpp"

using namespace plr;
using nlohmann::json;

namespace {

json minimal_config() {
    return json{
        {"world", {{"N", 50000}, {"M", 40}, {"C", 10}, {"d", 16}}},
        {"engine", {{"n", 250}, {"epochs", 3}}},
    };
}

}  // namespace

TEST_CASE("K derives from n as ceil(N/n)") {
    const RunConfig cfg = RunConfig::from_json(minimal_config());
    CHECK(cfg.derived_cluster_count() == 200);  // 50000 / 250

    json j = minimal_config();
    j["world"]["N"] = 50001;
    CHECK(RunConfig::from_json(j).derived_cluster_count() == 201);  // ceiling
}

TEST_CASE("gamma derives as gamma_frac * n") {
    const RunConfig cfg = RunConfig::from_json(minimal_config());
    CHECK(cfg.derived_gamma() == doctest::Approx(225.0));  // 0.9 * 250

    json j = minimal_config();
    j["engine"]["gamma_frac"] = 0.5;
    CHECK(RunConfig::from_json(j).derived_gamma() == doctest::Approx(125.0));
}

TEST_CASE("explicit K implies n = N/K for the gamma rule") {
    json j = minimal_config();
    j["engine"].erase("n");
    j["engine"]["K"] = 100;
    const RunConfig cfg = RunConfig::from_json(j);
    CHECK(cfg.derived_cluster_count() == 100);
    CHECK(cfg.derived_gamma() == doctest::Approx(0.9 * 500.0));
}

TEST_CASE("spec defaults are in place") {
    const RunConfig cfg = RunConfig::from_json(minimal_config());
    CHECK(cfg.gamma_frac == doctest::Approx(0.9));
    CHECK(cfg.lambda_dual == doctest::Approx(20.0));
    CHECK(cfg.alpha == doctest::Approx(0.8));
    CHECK(cfg.tau == doctest::Approx(0.95));
    CHECK(cfg.temperature == doctest::Approx(0.1));
    CHECK(cfg.target_temp_mult == doctest::Approx(5.0));
    CHECK(cfg.heads == 1);
    CHECK(cfg.warmup_epochs == 20);
    CHECK(cfg.da_momentum == doctest::Approx(0.99));
    CHECK(cfg.batch_labeled == 64);
    CHECK(cfg.mu == 7);
    CHECK(cfg.loss_weights.lambda_u == 1.0);
    CHECK(cfg.loss_weights.lambda_p == 1.0);
    CHECK(cfg.loss_weights.lambda_c == 1.0);
}

TEST_CASE("missing required fields name the field") {
    for (const char* missing : {"N", "M", "C", "d"}) {
        json j = minimal_config();
        j["world"].erase(missing);
        try {
            RunConfig::from_json(j);
            FAIL("expected InvalidConfigError for ", missing);
        } catch (const InvalidConfigError& e) {
            CHECK(std::string(e.what()).find(std::string("world.") + missing) !=
                  std::string::npos);
        }
    }

    json j = minimal_config();
    j["engine"].erase("epochs");
    try {
        RunConfig::from_json(j);
        FAIL("expected InvalidConfigError for epochs");
    } catch (const InvalidConfigError& e) {
        CHECK(std::string(e.what()).find("engine.epochs") != std::string::npos);
    }
}

TEST_CASE("K and n are mutually exclusive, one required") {
    json both = minimal_config();
    both["engine"]["K"] = 100;
    CHECK_THROWS_AS(RunConfig::from_json(both), InvalidConfigError);

    json neither = minimal_config();
    neither["engine"].erase("n");
    CHECK_THROWS_AS(RunConfig::from_json(neither), InvalidConfigError);
}

TEST_CASE("config round trip preserves effective parameters") {
    json j = minimal_config();
    j["engine"]["alpha"] = 0.6;
    j["engine"]["H"] = 2;
    j["world"]["classifier_bias"] = {2.0, 1, 1, 1, 1, 1, 1, 1, 1, 1};
    j["output_dir"] = "/tmp/somewhere";
    const RunConfig a = RunConfig::from_json(j);
    const RunConfig b = RunConfig::from_json(a.to_json());
    CHECK(a.to_json() == b.to_json());
    CHECK(b.alpha == doctest::Approx(0.6));
    CHECK(b.heads == 2);
    CHECK(b.output_dir == "/tmp/somewhere");
    CHECK(b.world.classifier_bias[0] == doctest::Approx(2.0));
}

TEST_CASE("sweep parameter application") {
    const RunConfig base = RunConfig::from_json(minimal_config());

    const RunConfig by_n = apply_sweep_param(base, "n", 25.0);
    CHECK(by_n.derived_cluster_count() == 2000);  // K recomputed per run

    const RunConfig by_alpha = apply_sweep_param(base, "alpha", 0.0);
    CHECK(by_alpha.alpha == 0.0);

    const RunConfig by_d = apply_sweep_param(base, "d", 64.0);
    CHECK(by_d.world.dim == 64);

    const RunConfig by_heads = apply_sweep_param(base, "H", 2.0);
    CHECK(by_heads.heads == 2);

    CHECK_THROWS_AS(apply_sweep_param(base, "nonsense", 1.0), InvalidConfigError);
}

TEST_CASE("load_file: parse failures and bad paths are config errors") {
    CHECK_THROWS_AS(RunConfig::load_file("/nonexistent/plrefine.json"),
                    InvalidConfigError);

    const auto path = std::filesystem::temp_directory_path() / "plrefine_bad.json";
    std::ofstream(path) << "{ not json";
    CHECK_THROWS_AS(RunConfig::load_file(path.string()), InvalidConfigError);
    std::filesystem::remove(path);
}

TEST_CASE("run_experiment writes the documented outputs") {
    RunConfig cfg = RunConfig::biased_preset();
    cfg.world.unlabeled_count = 400;
    cfg.world.labeled_count = 20;
    cfg.neighbourhood = 40.0;  // K = 10
    cfg.warmup_epochs = 2;
    cfg.epochs = 3;

    const auto dir = std::filesystem::temp_directory_path() / "plrefine_test_run";
    std::filesystem::remove_all(dir);
    const auto reports = run_experiment(cfg, dir);
    CHECK(reports.size() == 3);

    for (const char* name :
         {"run_config.json", "run_header.json", "report.jsonl", "summary.csv",
          "ground_truth.csv", "banks.csv", "prototypes.csv", "cluster_labels_h0.csv",
          "cluster_state_h0.json"})
        CHECK(std::filesystem::exists(dir / name));

    // Derived quantities are logged in the run header.
    std::ifstream hf(dir / "run_header.json");
    json header;
    hf >> header;
    CHECK(header.at("K").get<std::size_t>() == 10);
    CHECK(header.at("gamma").get<double>() == doctest::Approx(36.0));

    // The emitted config is round-trippable to the same effective parameters.
    std::ifstream cf(dir / "run_config.json");
    json saved;
    cf >> saved;
    const RunConfig back = RunConfig::from_json(saved);
    CHECK(back.to_json() == cfg.to_json());

    // report.jsonl has one parseable object per epoch.
    std::ifstream rf(dir / "report.jsonl");
    std::string line;
    int lines = 0;
    while (std::getline(rf, line)) {
        const json row = json::parse(line);
        CHECK(row.is_object());
        ++lines;
    }
    CHECK(lines == 3);

    std::filesystem::remove_all(dir);
}

TEST_CASE("run_sweep writes one directory per value plus a combined table") {
    RunConfig cfg = RunConfig::biased_preset();
    cfg.world.unlabeled_count = 300;
    cfg.world.labeled_count = 20;
    cfg.neighbourhood = 50.0;
    cfg.warmup_epochs = 1;
    cfg.epochs = 2;

    const auto dir = std::filesystem::temp_directory_path() / "plrefine_test_sweep";
    std::filesystem::remove_all(dir);
    run_sweep(cfg, "alpha", {0.0, 0.8, 1.0}, dir);

    CHECK(std::filesystem::exists(dir / "sweep_summary.csv"));
    CHECK(std::filesystem::exists(dir / "alpha_0" / "report.jsonl"));
    CHECK(std::filesystem::exists(dir / "alpha_0.8" / "report.jsonl"));
    CHECK(std::filesystem::exists(dir / "alpha_1" / "report.jsonl"));

    std::ifstream f(dir / "sweep_summary.csv");
    std::string line;
    int rows = 0;
    while (std::getline(f, line)) ++rows;
    CHECK(rows == 4);  // header + 3 runs

    std::filesystem::remove_all(dir);
    CHECK_THROWS_AS(run_sweep(cfg, "alpha", {}, dir), InvalidConfigError);
}
