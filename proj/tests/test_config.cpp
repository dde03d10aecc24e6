#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "sodacer/config.hpp"
#include "sodacer/errors.hpp"
#include "sodacer/io.hpp"

using namespace sodacer;

namespace {

struct TempFile {
    std::filesystem::path path;
    explicit TempFile(const std::string& content) {
        path = std::filesystem::temp_directory_path() /
               ("sodacer_cfg_" + std::to_string(std::rand()) + ".cfg");
        std::ofstream(path) << content;
    }
    ~TempFile() { std::filesystem::remove(path); }
};

}  // namespace

TEST_CASE("config parsing") {
    SUBCASE("sections, comments, whitespace") {
        const ConfigMap map = ConfigMap::parse_text(
            "# leading comment\n"
            "[trainer]\n"
            "  horizon = 5.0   # trailing comment\n"
            "\n"
            "[replay]\n"
            "beta=0.1\n");
        CHECK(map.get_double("trainer.horizon", 0.0) == 5.0);
        CHECK(map.get_double("replay.beta", 0.0) == 0.1);
        CHECK(map.get_double("replay.sigma0", 0.02) == 0.02);
    }
    SUBCASE("malformed lines raise") {
        CHECK_THROWS_AS(ConfigMap::parse_text("[trainer\n"), ConfigError);
        CHECK_THROWS_AS(ConfigMap::parse_text("[t]\nkey value\n"), ConfigError);
        CHECK_THROWS_AS(ConfigMap::parse_text("orphan = 1\n"), ConfigError);
    }
    SUBCASE("vector values") {
        const ConfigMap map = ConfigMap::parse_text("[cost]\nq_diag = 1, 0, 0, 1, 0\n");
        CHECK(map.get_vec5("cost.q_diag", Vec5{}) == Vec5{1, 0, 0, 1, 0});
        CHECK_THROWS_AS(ConfigMap::parse_text("[cost]\nq_diag = 1, 2\n")
                            .get_vec5("cost.q_diag", Vec5{}),
                        ConfigError);
    }
}

TEST_CASE("precedence: defaults < file < override") {
    const TempFile file(
        "[trainer]\n"
        "horizon = 7.5\n"
        "[optimizer]\n"
        "eta = 0.123\n");

    SUBCASE("built-in defaults") {
        const AppConfig cfg = load_app_config(std::nullopt, {});
        CHECK(cfg.settings.trainer.horizon == 20.0);
        CHECK(cfg.settings.optimizer.eta == 0.01);
        CHECK(cfg.settings.replay.sigma0 == 0.02);
        CHECK(cfg.settings.params.j_max == 200.0);
    }
    SUBCASE("file beats defaults") {
        const AppConfig cfg = load_app_config(file.path.string(), {});
        CHECK(cfg.settings.trainer.horizon == 7.5);
        CHECK(cfg.settings.optimizer.eta == 0.123);
        CHECK(cfg.settings.replay.sigma0 == 0.02);
    }
    SUBCASE("override beats file") {
        const AppConfig cfg =
            load_app_config(file.path.string(), {"trainer.horizon=3.25", "replay.beta=0.2"});
        CHECK(cfg.settings.trainer.horizon == 3.25);
        CHECK(cfg.settings.optimizer.eta == 0.123);
        CHECK(cfg.settings.replay.beta == 0.2);
    }
}

TEST_CASE("validation catches invariant violations") {
    CHECK_THROWS_AS(load_app_config(std::nullopt, {"replay.gamma_th=1.5"}), ConfigError);
    CHECK_THROWS_AS(load_app_config(std::nullopt, {"replay.sigma_th=0.1"}), ConfigError);
    CHECK_THROWS_AS(load_app_config(std::nullopt, {"dynamics.epsilon=0.5"}), ConfigError);
    CHECK_THROWS_AS(load_app_config(std::nullopt, {"optimizer.beta1=1.0"}), ConfigError);
    CHECK_THROWS_AS(load_app_config(std::nullopt, {"trainer.dt=0"}), ConfigError);
    CHECK_THROWS_AS(load_app_config(std::nullopt, {"cost.q_diag=0,0,0,0,0"}), ConfigError);
    CHECK_THROWS_AS(load_app_config(std::nullopt, {"trainer.replay_kind=per"}), ConfigError);
    CHECK_THROWS_AS(load_app_config(std::nullopt, {"simulate.controls=9,0,0,0,0"}), ConfigError);
}

TEST_CASE("unknown keys are rejected") {
    CHECK_THROWS_AS(load_app_config(std::nullopt, {"trainer.horizont=5"}), ConfigError);
    CHECK_THROWS_AS(load_app_config(std::nullopt, {"trianer.horizon=5"}), ConfigError);
}

TEST_CASE("missing config file raises ConfigError") {
    CHECK_THROWS_AS(load_app_config(std::string("/nonexistent/path.cfg"), {}), ConfigError);
}

TEST_CASE("float formatting round-trips doubles exactly") {
    for (double v : {0.1, 1.0 / 3.0, 3.141592653589793, 1e-300, 123456789.123456789}) {
        const std::string text = io::format_double(v);
        CHECK(std::stod(text) == v);
    }
}
