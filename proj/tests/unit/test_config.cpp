#include <cstdlib>

#include "doctest.h"
#include "ctrw/config.hpp"
#include "ctrw/errors.hpp"

using namespace ctrw;

TEST_CASE("sections and qualified keys") {
    const auto kv = parse_key_values(
        "# comment\n"
        "[experiment]\n"
        "theorem = T2   ; trailing comment\n"
        "t = 1e4\n"
        "jump.law = gaussian\n"
        "[wait]\n"
        "mean = 2\n");
    CHECK(kv.at("experiment.theorem") == "T2");
    CHECK(kv.at("experiment.t") == "1e4");
    CHECK(kv.at("jump.law") == "gaussian");
    CHECK(kv.at("wait.mean") == "2");
}

TEST_CASE("malformed input is rejected") {
    CHECK_THROWS_AS(parse_key_values("theorem = T2\n"), ConfigError);
    CHECK_THROWS_AS(parse_key_values("[experiment\n"), ConfigError);
    CHECK_THROWS_AS(parse_key_values("[experiment]\nno equals sign\n"), ConfigError);
    CHECK_THROWS_AS(parse_key_values("[experiment]\nt = 1\nt = 2\n"), ConfigError);
}

TEST_CASE("building an experiment") {
    unsetenv("CTRW_SEED");
    const auto cli = build_config(parse_key_values(
        "[experiment]\ntheorem = T2-lattice\nu_grid = 0.5, 1\nfdd_pair = 0.5,1\nmaster_seed = 7\n"
        "[jump]\nlaw = lattice\nweights = -1:1, 1:1\n"
        "[functional]\nf = point\n"
        "[output]\njson = out.json\n"));
    const auto& cfg = cli.experiment;
    CHECK(cfg.theorem == Theorem::t2_lattice);
    CHECK(cfg.u_grid == std::vector<double>{0.5, 1.0});
    CHECK(cfg.master_seed == 7);
    CHECK(cli.json_path == "out.json");
    CHECK(cfg.echo.count("output.json") == 0);
    CHECK(cfg.echo.at("jump.law") == "lattice");
}

TEST_CASE("unknown keys and bad ranges are rejected") {
    CHECK_THROWS_AS(build_config(parse_key_values("[experiment]\ntypo = 1\n")), ConfigError);
    CHECK_THROWS_AS(build_config(parse_key_values("[experiment]\nreplicates = 10\n")), ConfigError);
    CHECK_THROWS_AS(build_config(parse_key_values("[experiment]\nt = abc\n")), ConfigError);
    CHECK_THROWS_AS(build_config(parse_key_values("[jump]\nlaw = symmetric_pareto\nalpha = 2.5\n")), ConfigError);
    CHECK_THROWS_AS(build_config(parse_key_values("[experiment]\ntheorem = T3\n[jump]\nlaw = symmetric_pareto\n")),
                    ConfigError);
    CHECK_THROWS_AS(build_config(parse_key_values("[environment]\ntype = periodic\nmean = 1\namplitude = 2\n")),
                    ConfigError);
    CHECK_THROWS_AS(load_cli_config("/nonexistent/config.cfg"), ConfigError);
}

TEST_CASE("seed override from the environment") {
    setenv("CTRW_SEED", "424242", 1);
    const auto cli = build_config(parse_key_values("[experiment]\nmaster_seed = 1\n"));
    CHECK(cli.experiment.master_seed == 424242);
    CHECK(cli.experiment.echo.at("experiment.master_seed") == "424242");
    setenv("CTRW_SEED", "not-a-number", 1);
    CHECK_THROWS_AS(build_config(parse_key_values("")), ConfigError);
    unsetenv("CTRW_SEED");
}
