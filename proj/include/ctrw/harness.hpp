#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ctrw/environment.hpp"
#include "ctrw/levy_local.hpp"
#include "ctrw/stable.hpp"
#include "ctrw/walk.hpp"

namespace ctrw {

// Which limit statement an experiment checks:
//   t2          plain walk, limit mu^(1/alpha) int f * l_alpha
//   t2_lattice  lattice jumps, int f replaced by b sum_n f(a + b n)
//   t3          deterministic intensity Lambda, f = g / Lambda
//   t5          shot-noise environment, quenched over one sampled gamma
enum class Theorem { t2, t2_lattice, t3, t5 };

std::string to_string(Theorem theorem);
Theorem theorem_from_string(const std::string& name);

struct ExperimentConfig {
    Theorem theorem = Theorem::t2;
    JumpLaw jump = JumpLaw::gaussian(2.0);
    WaitLaw wait = WaitLaw::exponential_mean(1.0);
    FunctionalSpec functional = FunctionalSpec::gaussian_bump();
    std::optional<DeterministicEnv> deterministic_env;       // t3
    std::optional<Kernel> kernel;                             // t5
    std::shared_ptr<const PoissonConfig> preset_config;       // t5, optional
    double t = 1e4;
    std::vector<double> u_grid = kDefaultUGrid;
    std::int64_t replicates = 2000;
    std::int64_t limit_replicates = 2000;
    std::uint64_t master_seed = 1;
    std::optional<std::uint64_t> environment_seed;

    // Normalization: explicit sigma, else calibrate_sigma.
    std::optional<double> sigma;
    std::optional<double> limit_beta;
    std::int64_t calibration_replicates = 20000;
    std::optional<std::int64_t> calibration_n;

    LocalTimeSettings local_time;
    double ks_threshold = 0.08;
    std::optional<double> w1_threshold;
    std::optional<std::pair<double, double>> fdd_pair = std::make_pair(0.5, 1.0);
    std::int64_t jump_cap = 100'000'000;
    // Permits t < 10^3 for pre-asymptotic trend probes.
    bool allow_short_horizon = false;
    unsigned workers = 1;

    // Key/value echo of the originating config file; embedded in reports.
    std::map<std::string, std::string> echo;
};

// Throws ConfigError naming the violated assumption.
void validate(const ExperimentConfig& cfg);

// Summary statistics of one ensemble at one u.
struct EnsembleSummary {
    double mean = 0.0;
    double q05 = 0.0;
    double q50 = 0.0;
    double q95 = 0.0;
};

struct PerUResult {
    double u = 0.0;
    double ks = 0.0;
    double w1 = 0.0;
    EnsembleSummary functional;
    EnsembleSummary limit;
    bool passed = false;
};

struct FddFragment {
    double u1 = 0.0;
    double u2 = 0.0;
    double ks_u1 = 0.0;
    double ks_u2 = 0.0;
    double ks_increment = 0.0;
    bool increments_nonnegative = true;  // limit side, for a nonnegative constant
    bool passed = false;
};

// Samples indexed [replicate][u].
using SampleMatrix = std::vector<std::vector<double>>;

struct ComparisonReport {
    std::string theorem;
    std::map<std::string, std::string> config_echo;
    std::uint64_t master_seed = 0;
    std::optional<std::uint64_t> environment_seed;
    std::int64_t replicates = 0;
    std::int64_t limit_replicates = 0;

    double alpha = 2.0;
    double sigma = 1.0;
    double limit_beta = 0.0;
    std::optional<double> calibration_ks;
    double norm_constant = 0.0;  // c_t
    double mu = 1.0;

    LimitConstant limit;
    std::optional<double> lambda_bar_inv;
    std::optional<double> theorem5_constant;
    std::optional<std::size_t> environment_points;

    std::int64_t local_time_grid = 0;
    double local_time_eps = 0.0;
    double ks_threshold = 0.08;
    std::optional<double> w1_threshold;

    std::vector<PerUResult> per_u;
    std::optional<FddFragment> fdd;
    bool passed = false;
    double runtime_seconds = 0.0;

    // Raw ensembles; not serialized.
    SampleMatrix functional_samples;
    SampleMatrix limit_samples;
};

ComparisonReport run_experiment(const ExperimentConfig& cfg);

// Joint-law proxy: KS on the marginals at u1 and u2 and on the increment
// value(u2) - value(u1). u1, u2 must be on the grid, u1 < u2.
FddFragment fdd_joint_check(const SampleMatrix& functional, const SampleMatrix& limit,
                            const std::vector<double>& u_grid, std::pair<double, double> u_pair,
                            double ks_threshold);

inline constexpr int kReportSchemaVersion = 1;

nlohmann::json to_json(const ComparisonReport& report);
ComparisonReport report_from_json(const nlohmann::json& j);

enum class ReportFormat { json, csv };

// Writes the report; throws IoError naming the destination on failure.
void emit_report(const ComparisonReport& report, const std::string& path, ReportFormat format);
std::string report_json_text(const ComparisonReport& report);
std::string report_csv_text(const ComparisonReport& report);

}  // namespace ctrw
