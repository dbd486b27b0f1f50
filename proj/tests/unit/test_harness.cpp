#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "ctrw/errors.hpp"
#include "ctrw/harness.hpp"
#include "ctrw/statistics.hpp"

using namespace ctrw;

namespace {

// Small, fast configuration for plumbing checks.
ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.theorem = Theorem::t2;
    cfg.jump = JumpLaw::gaussian(2.0);
    cfg.sigma = 1.0;
    cfg.t = 1e3;
    cfg.replicates = 200;
    cfg.limit_replicates = 200;
    cfg.local_time.grid_per_unit = 10000;
    cfg.master_seed = 17;
    return cfg;
}

std::string without_runtime(nlohmann::json j) {
    j.erase("runtime_seconds");
    return j.dump();
}

}  // namespace

TEST_CASE("validation names the violated assumption") {
    auto cfg = small_config();
    cfg.replicates = 50;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg = small_config();
    cfg.t = 100.0;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg.allow_short_horizon = true;
    CHECK_NOTHROW(validate(cfg));
    cfg = small_config();
    cfg.theorem = Theorem::t3;
    cfg.deterministic_env = DeterministicEnv::constant(1.0);
    try {
        validate(cfg);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("B1") != std::string::npos);
    }
    cfg = small_config();
    cfg.theorem = Theorem::t2_lattice;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg = small_config();
    cfg.u_grid = {0.5, 1.5};
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg = small_config();
    cfg.functional = FunctionalSpec::constant(1.0);
    CHECK_THROWS_AS(validate(cfg), ConfigError);
}

TEST_CASE("degenerate functional gives identical zero ensembles") {
    auto cfg = small_config();
    cfg.functional = FunctionalSpec::constant(0.0);
    const auto r = run_experiment(cfg);
    for (const auto& p : r.per_u) {
        CHECK(p.ks == 0.0);
        CHECK(p.w1 == 0.0);
    }
    CHECK(r.passed);
}

TEST_CASE("distances are in range and the report is reproducible") {
    const auto cfg = small_config();
    const auto a = run_experiment(cfg);
    const auto b = run_experiment(cfg);
    for (const auto& p : a.per_u) {
        CHECK(p.ks >= 0.0);
        CHECK(p.ks <= 1.0);
        CHECK(p.w1 >= 0.0);
    }
    CHECK(without_runtime(to_json(a)) == without_runtime(to_json(b)));
    auto c3 = cfg;
    c3.workers = 3;
    CHECK(without_runtime(to_json(run_experiment(c3))) == without_runtime(to_json(a)));
}

TEST_CASE("fdd fragment: limit ensemble against itself") {
    auto cfg = small_config();
    const auto r = run_experiment(cfg);
    const auto self = fdd_joint_check(r.limit_samples, r.limit_samples, cfg.u_grid, {0.5, 1.0}, 0.08);
    CHECK(self.passed);
    CHECK(self.ks_increment == 0.0);
    CHECK(self.increments_nonnegative);
    CHECK_THROWS(fdd_joint_check(r.limit_samples, r.limit_samples, cfg.u_grid, {1.0, 0.5}, 0.08));
    CHECK_THROWS(fdd_joint_check(r.limit_samples, r.limit_samples, cfg.u_grid, {0.3, 1.0}, 0.08));
}

TEST_CASE("split limit ensembles rarely exceed the 99% critical value") {
    auto cfg = small_config();
    cfg.limit_replicates = 400;
    int exceed = 0;
    const int runs = 20;
    for (int k = 0; k < runs; ++k) {
        cfg.master_seed = 1000 + static_cast<std::uint64_t>(k);
        const auto r = run_experiment(cfg);
        std::vector<double> a, b;
        for (std::size_t i = 0; i < r.limit_samples.size(); ++i)
            (i % 2 ? a : b).push_back(r.limit_samples[i].back());
        if (ks_two_sample(a, b) > ks_critical_value(a.size(), b.size(), 0.01)) ++exceed;
    }
    CHECK(exceed <= 1);
}

TEST_CASE("json round trip and csv shape") {
    const auto r = run_experiment(small_config());
    const auto back = report_from_json(nlohmann::json::parse(report_json_text(r)));
    CHECK(to_json(back) == to_json(r));
    const auto csv = report_csv_text(r);
    std::istringstream is(csv);
    std::string line;
    std::size_t rows = 0;
    std::getline(is, line);
    CHECK(line == "u,ks,w1,mean_func,mean_limit,q05_func,q50_func,q95_func,q05_limit,q50_limit,q95_limit");
    while (std::getline(is, line)) ++rows;
    CHECK(rows == r.per_u.size());
}

TEST_CASE("emit_report surfaces the destination on failure") {
    const auto r = run_experiment(small_config());
    try {
        emit_report(r, "/nonexistent-dir/report.json", ReportFormat::json);
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("/nonexistent-dir/report.json") != std::string::npos);
    }
    const auto path = std::filesystem::temp_directory_path() / "ctrw_report_test.csv";
    emit_report(r, path.string(), ReportFormat::csv);
    std::ifstream is(path);
    std::stringstream ss;
    ss << is.rdbuf();
    CHECK(ss.str() == report_csv_text(r));
    std::filesystem::remove(path);
}

TEST_CASE("quenched mode: same environment, different walks") {
    auto cfg = small_config();
    cfg.theorem = Theorem::t5;
    cfg.jump = JumpLaw::symmetric_pareto(1.5);
    cfg.sigma = analytic_sigma(cfg.jump);
    cfg.kernel = Kernel::compact_bump(1.0);
    cfg.environment_seed = 5;
    const auto a = run_experiment(cfg);
    cfg.master_seed = 99;
    const auto b = run_experiment(cfg);
    CHECK(a.limit.integral == b.limit.integral);
    CHECK(*a.theorem5_constant == doctest::Approx(theorem5_constant(*cfg.kernel, 1.5)).epsilon(1e-12));
    // Different environment, different quenched integral.
    cfg.environment_seed = 6;
    const auto c = run_experiment(cfg);
    CHECK(c.limit.integral != a.limit.integral);
}
