#include "ctrw/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "ctrw/errors.hpp"
#include "ctrw/parallel.hpp"
#include "ctrw/statistics.hpp"

namespace ctrw {

std::string to_string(Theorem theorem) {
    switch (theorem) {
        case Theorem::t2: return "T2";
        case Theorem::t2_lattice: return "T2-lattice";
        case Theorem::t3: return "T3";
        case Theorem::t5: return "T5";
    }
    return "T2";
}

Theorem theorem_from_string(const std::string& name) {
    if (name == "T2") return Theorem::t2;
    if (name == "T2-lattice") return Theorem::t2_lattice;
    if (name == "T3") return Theorem::t3;
    if (name == "T5") return Theorem::t5;
    throw ConfigError("unknown theorem '" + name + "' (expected T2, T2-lattice, T3 or T5)");
}

void validate(const ExperimentConfig& cfg) {
    auto fail = [](const std::string& what) { throw ConfigError(what); };
    if (cfg.replicates < 100 || cfg.limit_replicates < 100)
        fail("replicates and limit_replicates must be at least 100");
    if (!(cfg.t >= 1e3) && !cfg.allow_short_horizon) fail("t must be at least 1000");
    if (!(cfg.t > 0.0)) fail("t must be positive");
    if (cfg.u_grid.empty()) fail("u_grid is empty");
    for (double u : cfg.u_grid)
        if (!(u > 0.0 && u <= 1.0)) fail("u_grid values must lie in (0, 1]");
    if (!(cfg.ks_threshold > 0.0 && cfg.ks_threshold <= 1.0)) fail("ks_threshold must lie in (0, 1]");
    if (cfg.sigma && !(*cfg.sigma > 0.0)) fail("sigma must be positive");
    if (cfg.limit_beta && !(*cfg.limit_beta >= -1.0 && *cfg.limit_beta <= 1.0))
        fail("limit_beta must lie in [-1, 1]");
    if (cfg.calibration_replicates < 100) fail("calibration_replicates must be at least 100");
    if (cfg.local_time.grid_per_unit < kMinLevyGrid) fail("local-time grid must be at least 1000 per unit");
    if (cfg.local_time.eps && !(*cfg.local_time.eps > 0.0)) fail("local-time eps must be positive");
    const double alpha = cfg.jump.alpha_attr;
    if (!(alpha > 1.0 && alpha <= 2.0)) fail("A1: jump law must be attracted to alpha in (1,2]");
    if (cfg.fdd_pair) {
        const auto [u1, u2] = *cfg.fdd_pair;
        auto on_grid = [&](double u) {
            return std::find(cfg.u_grid.begin(), cfg.u_grid.end(), u) != cfg.u_grid.end();
        };
        if (!(u1 < u2) || !on_grid(u1) || !on_grid(u2))
            fail("fdd_pair must be two increasing values from u_grid");
    }
    switch (cfg.theorem) {
        case Theorem::t2:
            if (!std::isfinite(cfg.functional.integral))
                fail("A2: f must be integrable (finite integral)");
            break;
        case Theorem::t2_lattice:
            if (!std::holds_alternative<LatticeJumps>(cfg.jump.shape))
                fail("T2-lattice needs a lattice jump law");
            break;
        case Theorem::t3:
            if (!(alpha < 2.0)) fail("B1: T3 needs alpha in (1,2)");
            if (!cfg.deterministic_env) fail("T3 needs a deterministic environment");
            break;
        case Theorem::t5:
            if (!(alpha < 2.0)) fail("B1: T5 needs alpha in (1,2)");
            if (!cfg.kernel) fail("T5 needs a shot-noise kernel");
            if (std::isinf(cfg.functional.support_radius))
                fail("C2: g must be integrable");
            // C2 second branch needs e^(2 phi) - 1 integrable.
            if (!std::isfinite(exponent_integral(*cfg.kernel, 2.0).value))
                fail("C2: e^(2 phi) - 1 must be integrable");
            break;
    }
}

namespace {

EnsembleSummary summarize(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    return {mean(values), quantile_sorted(values, 0.05), quantile_sorted(values, 0.5),
            quantile_sorted(values, 0.95)};
}

std::vector<double> column(const SampleMatrix& m, std::size_t j) {
    std::vector<double> out(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) out[i] = m[i][j];
    return out;
}

std::size_t grid_index(const std::vector<double>& grid, double u) {
    const auto it = std::find(grid.begin(), grid.end(), u);
    if (it == grid.end()) throw ConfigError("u value not on the grid");
    return static_cast<std::size_t>(it - grid.begin());
}

std::map<std::string, std::string> describe(const ExperimentConfig& cfg) {
    std::map<std::string, std::string> echo;
    auto num = [](double v) {
        std::ostringstream os;
        os << std::setprecision(17) << v;
        return os.str();
    };
    echo["experiment.theorem"] = to_string(cfg.theorem);
    echo["experiment.t"] = num(cfg.t);
    std::string grid;
    for (double u : cfg.u_grid) grid += (grid.empty() ? "" : ",") + num(u);
    echo["experiment.u_grid"] = grid;
    echo["experiment.replicates"] = std::to_string(cfg.replicates);
    echo["experiment.limit_replicates"] = std::to_string(cfg.limit_replicates);
    echo["experiment.master_seed"] = std::to_string(cfg.master_seed);
    echo["jump.law"] = cfg.jump.name();
    echo["wait.law"] = cfg.wait.name();
    echo["functional.f"] = cfg.functional.name;
    if (cfg.deterministic_env) echo["environment.type"] = cfg.deterministic_env->name;
    if (cfg.kernel) echo["environment.kernel"] = cfg.kernel->name;
    return echo;
}

}  // namespace

FddFragment fdd_joint_check(const SampleMatrix& functional, const SampleMatrix& limit,
                            const std::vector<double>& u_grid, std::pair<double, double> u_pair,
                            double ks_threshold) {
    const auto [u1, u2] = u_pair;
    if (!(u1 < u2)) throw DomainError("fdd_joint_check: need u1 < u2");
    const auto i1 = grid_index(u_grid, u1), i2 = grid_index(u_grid, u2);
    FddFragment out;
    out.u1 = u1;
    out.u2 = u2;
    out.ks_u1 = ks_two_sample(column(functional, i1), column(limit, i1));
    out.ks_u2 = ks_two_sample(column(functional, i2), column(limit, i2));
    auto increments = [&](const SampleMatrix& m) {
        std::vector<double> d(m.size());
        for (std::size_t i = 0; i < m.size(); ++i) d[i] = m[i][i2] - m[i][i1];
        return d;
    };
    const auto inc_f = increments(functional);
    const auto inc_l = increments(limit);
    out.ks_increment = ks_two_sample(inc_f, inc_l);
    out.increments_nonnegative = std::all_of(inc_l.begin(), inc_l.end(), [](double v) { return v >= 0.0; });
    out.passed = out.ks_u1 <= ks_threshold && out.ks_u2 <= ks_threshold &&
                 out.ks_increment <= ks_threshold;
    return out;
}

ComparisonReport run_experiment(const ExperimentConfig& cfg) {
    validate(cfg);
    const auto start = std::chrono::steady_clock::now();

    ComparisonReport report;
    report.theorem = to_string(cfg.theorem);
    report.config_echo = cfg.echo.empty() ? describe(cfg) : cfg.echo;
    report.master_seed = cfg.master_seed;
    report.replicates = cfg.replicates;
    report.limit_replicates = cfg.limit_replicates;
    report.ks_threshold = cfg.ks_threshold;
    report.w1_threshold = cfg.w1_threshold;
    report.mu = cfg.wait.mean();

    JumpLaw law = cfg.jump;
    const double alpha = law.alpha_attr;
    report.alpha = alpha;

    // Environment.
    std::optional<EnvSpec> env;
    if (cfg.theorem == Theorem::t3) {
        env = *cfg.deterministic_env;
        report.lambda_bar_inv = cfg.deterministic_env->lambda_bar_inv;
    } else if (cfg.theorem == Theorem::t5) {
        std::shared_ptr<const PoissonConfig> gamma = cfg.preset_config;
        if (!gamma) {
            const std::uint64_t seed =
                cfg.environment_seed.value_or(derive_seed(cfg.master_seed, streams::environment, 0));
            report.environment_seed = seed;
            const double half = std::max(walk_window_half_width(cfg.t, alpha, *cfg.kernel),
                                         cfg.functional.support_radius + cfg.kernel->cutoff_r + 1.0);
            RandomSource rng(seed);
            gamma = std::make_shared<const PoissonConfig>(sample_config(-half, half, rng));
        }
        report.environment_points = gamma->points.size();
        env = ShotNoiseEnv{*cfg.kernel, gamma};
        report.lambda_bar_inv = lambda_bar_inv(*env);
    }
    const double slowdown = report.lambda_bar_inv.value_or(1.0);

    // Normalization.
    if (cfg.sigma) {
        law.sigma_attr = *cfg.sigma;
        report.limit_beta = cfg.limit_beta.value_or(law.beta_attr);
    } else if (alpha == 2.0) {
        // Finite variance: sigma = sqrt(var / 2) is exact, no fit needed.
        report.limit_beta = 0.0;
    } else {
        const auto n = cfg.calibration_n.value_or(
            std::max<std::int64_t>(1, std::llround(cfg.t / (report.mu * slowdown))));
        const auto fit = calibrate_sigma(
            law, n, cfg.calibration_replicates,
            {derive_seed(cfg.master_seed, streams::calibration, 0), cfg.workers, 0.05});
        law.sigma_attr = fit.sigma;
        report.calibration_ks = fit.ks_distance;
        report.limit_beta = cfg.limit_beta.value_or(fit.beta);
    }
    report.sigma = law.sigma_attr;
    report.norm_constant = norm_constant(law, cfg.t);

    // Limit constant.
    FunctionalSpec functional = cfg.functional;
    switch (cfg.theorem) {
        case Theorem::t2:
            report.limit = plain_limit_constant(alpha, report.mu, functional.integral);
            break;
        case Theorem::t2_lattice:
            report.limit =
                plain_limit_constant(alpha, report.mu, lattice_limit_constant(law, functional.f));
            break;
        case Theorem::t3: {
            functional = functional.divided_by_environment();
            const auto integral = weighted_integral(functional.f, *env, functional.support_radius);
            report.limit = delayed_limit_constant(alpha, report.mu, slowdown, integral.value);
            break;
        }
        case Theorem::t5: {
            functional = functional.divided_by_environment();
            const auto integral = weighted_integral(functional.f, *env, functional.support_radius);
            report.theorem5_constant = theorem5_constant(*cfg.kernel, alpha);
            report.limit = quenched_limit_constant(alpha, report.mu, *report.theorem5_constant,
                                                   integral.value);
            break;
        }
    }

    // Functional ensemble.
    const auto m = static_cast<std::size_t>(cfg.replicates);
    const auto m_limit = static_cast<std::size_t>(cfg.limit_replicates);
    const EnvSpec* env_ptr = env ? &*env : nullptr;
    const SimulationOptions sim{cfg.jump_cap};
    report.functional_samples.assign(m, {});
    parallel_for(m, cfg.workers, [&](std::size_t k) {
        RandomSource rng(derive_seed(cfg.master_seed, streams::functional, k));
        const auto path = simulate_skeleton(law, cfg.wait, env_ptr, cfg.t, rng, sim);
        report.functional_samples[k] = normalized_functional(path, functional, law, cfg.t, cfg.u_grid);
    });

    // Limit ensemble; independent of the environment draw.
    const double horizon = *std::max_element(cfg.u_grid.begin(), cfg.u_grid.end());
    report.local_time_grid = std::max<std::int64_t>(
        kMinLevyGrid, std::llround(static_cast<double>(cfg.local_time.grid_per_unit) * horizon));
    report.local_time_eps = cfg.local_time.eps.value_or(
        default_eps(alpha, horizon / static_cast<double>(report.local_time_grid)));
    LocalTimeSettings lt = cfg.local_time;
    lt.eps = report.local_time_eps;
    report.limit_samples.assign(m_limit, {});
    parallel_for(m_limit, cfg.workers, [&](std::size_t k) {
        RandomSource rng(derive_seed(cfg.master_seed, streams::limit, k));
        report.limit_samples[k] =
            sample_limit_rv(alpha, report.limit_beta, report.limit, cfg.u_grid, lt, rng);
    });

    // Distances.
    report.passed = true;
    for (std::size_t j = 0; j < cfg.u_grid.size(); ++j) {
        const auto a = column(report.functional_samples, j);
        const auto b = column(report.limit_samples, j);
        PerUResult r;
        r.u = cfg.u_grid[j];
        r.ks = ks_two_sample(a, b);
        r.w1 = wasserstein1(a, b);
        r.functional = summarize(a);
        r.limit = summarize(b);
        r.passed = r.ks <= cfg.ks_threshold && (!cfg.w1_threshold || r.w1 <= *cfg.w1_threshold);
        report.passed = report.passed && r.passed;
        report.per_u.push_back(r);
    }
    if (cfg.fdd_pair) {
        report.fdd = fdd_joint_check(report.functional_samples, report.limit_samples, cfg.u_grid,
                                     *cfg.fdd_pair, cfg.ks_threshold);
        report.passed = report.passed && report.fdd->passed;
    }
    report.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

namespace {

nlohmann::json summary_json(const EnsembleSummary& s) {
    return {{"mean", s.mean}, {"q05", s.q05}, {"q50", s.q50}, {"q95", s.q95}};
}

EnsembleSummary summary_from_json(const nlohmann::json& j) {
    return {j.at("mean").get<double>(), j.at("q05").get<double>(), j.at("q50").get<double>(),
            j.at("q95").get<double>()};
}

template <class T>
nlohmann::json optional_json(const std::optional<T>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

template <class T>
std::optional<T> optional_from(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<T>();
}

}  // namespace

nlohmann::json to_json(const ComparisonReport& r) {
    nlohmann::json per_u = nlohmann::json::array();
    for (const auto& p : r.per_u)
        per_u.push_back({{"u", p.u},
                         {"ks", p.ks},
                         {"w1", p.w1},
                         {"functional", summary_json(p.functional)},
                         {"limit", summary_json(p.limit)},
                         {"passed", p.passed}});
    nlohmann::json fdd = nullptr;
    if (r.fdd)
        fdd = {{"u1", r.fdd->u1},
               {"u2", r.fdd->u2},
               {"ks_u1", r.fdd->ks_u1},
               {"ks_u2", r.fdd->ks_u2},
               {"ks_increment", r.fdd->ks_increment},
               {"increments_nonnegative", r.fdd->increments_nonnegative},
               {"passed", r.fdd->passed}};
    return {
        {"schema", "ctrw-comparison-report"},
        {"schema_version", kReportSchemaVersion},
        {"theorem", r.theorem},
        {"config", r.config_echo},
        {"seeds", {{"master", r.master_seed}, {"environment", optional_json(r.environment_seed)}}},
        {"replicates", r.replicates},
        {"limit_replicates", r.limit_replicates},
        {"normalization",
         {{"alpha", r.alpha},
          {"sigma", r.sigma},
          {"limit_beta", r.limit_beta},
          {"calibration_ks", optional_json(r.calibration_ks)},
          {"c_t", r.norm_constant},
          {"mu", r.mu}}},
        {"limit",
         {{"constant", r.limit.value},
          {"mu_factor", r.limit.mu_factor},
          {"environment_factor", r.limit.environment_factor},
          {"integral", r.limit.integral},
          {"lambda_bar_inv", optional_json(r.lambda_bar_inv)},
          {"theorem5_constant", optional_json(r.theorem5_constant)},
          {"environment_points", optional_json(r.environment_points)}}},
        {"local_time", {{"grid", r.local_time_grid}, {"eps", r.local_time_eps}}},
        {"thresholds", {{"ks", r.ks_threshold}, {"w1", optional_json(r.w1_threshold)}}},
        {"per_u", per_u},
        {"fdd", fdd},
        {"passed", r.passed},
        {"runtime_seconds", r.runtime_seconds},
    };
}

ComparisonReport report_from_json(const nlohmann::json& j) {
    if (j.at("schema_version").get<int>() != kReportSchemaVersion)
        throw IoError("unsupported report schema version");
    ComparisonReport r;
    r.theorem = j.at("theorem").get<std::string>();
    r.config_echo = j.at("config").get<std::map<std::string, std::string>>();
    r.master_seed = j.at("seeds").at("master").get<std::uint64_t>();
    r.environment_seed = optional_from<std::uint64_t>(j.at("seeds"), "environment");
    r.replicates = j.at("replicates").get<std::int64_t>();
    r.limit_replicates = j.at("limit_replicates").get<std::int64_t>();
    const auto& n = j.at("normalization");
    r.alpha = n.at("alpha").get<double>();
    r.sigma = n.at("sigma").get<double>();
    r.limit_beta = n.at("limit_beta").get<double>();
    r.calibration_ks = optional_from<double>(n, "calibration_ks");
    r.norm_constant = n.at("c_t").get<double>();
    r.mu = n.at("mu").get<double>();
    const auto& l = j.at("limit");
    r.limit.value = l.at("constant").get<double>();
    r.limit.mu_factor = l.at("mu_factor").get<double>();
    r.limit.environment_factor = l.at("environment_factor").get<double>();
    r.limit.integral = l.at("integral").get<double>();
    r.lambda_bar_inv = optional_from<double>(l, "lambda_bar_inv");
    r.theorem5_constant = optional_from<double>(l, "theorem5_constant");
    r.environment_points = optional_from<std::size_t>(l, "environment_points");
    r.local_time_grid = j.at("local_time").at("grid").get<std::int64_t>();
    r.local_time_eps = j.at("local_time").at("eps").get<double>();
    r.ks_threshold = j.at("thresholds").at("ks").get<double>();
    r.w1_threshold = optional_from<double>(j.at("thresholds"), "w1");
    for (const auto& p : j.at("per_u"))
        r.per_u.push_back({p.at("u").get<double>(), p.at("ks").get<double>(),
                           p.at("w1").get<double>(), summary_from_json(p.at("functional")),
                           summary_from_json(p.at("limit")), p.at("passed").get<bool>()});
    if (!j.at("fdd").is_null()) {
        const auto& f = j.at("fdd");
        r.fdd = FddFragment{f.at("u1").get<double>(),          f.at("u2").get<double>(),
                            f.at("ks_u1").get<double>(),       f.at("ks_u2").get<double>(),
                            f.at("ks_increment").get<double>(), f.at("increments_nonnegative").get<bool>(),
                            f.at("passed").get<bool>()};
    }
    r.passed = j.at("passed").get<bool>();
    r.runtime_seconds = j.at("runtime_seconds").get<double>();
    return r;
}

std::string report_json_text(const ComparisonReport& report) {
    return to_json(report).dump(2) + "\n";
}

std::string report_csv_text(const ComparisonReport& report) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "u,ks,w1,mean_func,mean_limit,q05_func,q50_func,q95_func,q05_limit,q50_limit,q95_limit\n";
    for (const auto& p : report.per_u)
        os << p.u << ',' << p.ks << ',' << p.w1 << ',' << p.functional.mean << ',' << p.limit.mean
           << ',' << p.functional.q05 << ',' << p.functional.q50 << ',' << p.functional.q95 << ','
           << p.limit.q05 << ',' << p.limit.q50 << ',' << p.limit.q95 << '\n';
    return os.str();
}

void emit_report(const ComparisonReport& report, const std::string& path, ReportFormat format) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open report destination " + path);
    os << (format == ReportFormat::json ? report_json_text(report) : report_csv_text(report));
    os.flush();
    if (!os) throw IoError("failed writing report to " + path);
}

}  // namespace ctrw
