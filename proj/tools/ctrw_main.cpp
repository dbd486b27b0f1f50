// ctrw: command-line front end.
//
// Exit codes: 0 success, 1 runtime failure, 2 invalid input, 3 a declared
// comparison threshold failed.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ctrw/config.hpp"
#include "ctrw/environment.hpp"
#include "ctrw/errors.hpp"
#include "ctrw/harness.hpp"
#include "ctrw/levy_local.hpp"
#include "ctrw/random.hpp"
#include "ctrw/stable.hpp"
#include "ctrw/statistics.hpp"
#include "ctrw/walk.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitThreshold = 3;

// Output sink: a file when a path is given, stdout otherwise.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw ctrw::IoError("cannot open output " + path);
        }
        stream() << std::setprecision(17);
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw ctrw::ConfigError("cannot parse list entry '" + item + "'");
        }
        if (used != item.size()) throw ctrw::ConfigError("cannot parse list entry '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw ctrw::ConfigError("empty list");
    return out;
}

// --- sample-stable ---------------------------------------------------------

struct SampleStableArgs {
    double alpha = 2.0;
    double beta = 0.0;
    double scale = 1.0;
    double location = 0.0;
    std::int64_t n = 1;
    std::uint64_t seed = 1;
    std::string out;
};

int cmd_sample_stable(const SampleStableArgs& a) {
    const ctrw::StableParams p{a.alpha, a.beta, a.scale, a.location};
    ctrw::validate(p);
    if (a.n < 0) throw ctrw::ConfigError("--n must be nonnegative");
    const ctrw::StableSampler sampler(p);
    ctrw::RandomSource rng(a.seed);
    Output out(a.out);
    for (std::int64_t i = 0; i < a.n; ++i) out.stream() << sampler(rng) << '\n';
    return kExitOk;
}

// --- simulate --------------------------------------------------------------

struct SimulateArgs {
    std::string law = "gaussian";
    double variance = 2.0;
    double alpha = 1.5;
    double wait_mean = 1.0;
    double t = 1e3;
    std::string u_grid = "0.25,0.5,0.75,1";
    std::int64_t paths = 1;
    std::uint64_t seed = 1;
    std::string out;
    std::string skeleton;
};

ctrw::JumpLaw jump_from_flags(const std::string& law, double variance, double alpha) {
    if (law == "gaussian") return ctrw::JumpLaw::gaussian(variance);
    if (law == "symmetric_pareto") return ctrw::JumpLaw::symmetric_pareto(alpha);
    if (law == "lattice") return ctrw::JumpLaw::lattice(0.0, 1.0, {{-1, 0.5}, {1, 0.5}});
    throw ctrw::ConfigError("unknown jump law '" + law + "'");
}

int cmd_simulate(const SimulateArgs& a) {
    const auto law = jump_from_flags(a.law, a.variance, a.alpha);
    const auto wait = ctrw::WaitLaw::exponential_mean(a.wait_mean);
    const auto u_grid = parse_list(a.u_grid);
    if (!(a.t > 0.0)) throw ctrw::ConfigError("--t must be positive");
    const auto f = ctrw::FunctionalSpec::gaussian_bump();
    Output out(a.out);
    out.stream() << "path,u,n_jumps,functional,normalized\n";
    for (std::int64_t k = 0; k < a.paths; ++k) {
        ctrw::RandomSource rng(ctrw::derive_seed(a.seed, ctrw::streams::functional, k));
        const auto path = ctrw::simulate_skeleton(law, wait, nullptr, a.t, rng);
        if (k == 0 && !a.skeleton.empty()) {
            std::ofstream os(a.skeleton);
            if (!os) throw ctrw::IoError("cannot open skeleton output " + a.skeleton);
            ctrw::write_skeleton(os, path);
        }
        const auto raw = ctrw::additive_functional(path, f, a.t, u_grid);
        const double c = ctrw::norm_constant(law, a.t);
        for (std::size_t j = 0; j < u_grid.size(); ++j)
            out.stream() << k << ',' << u_grid[j] << ',' << path.n_jumps << ',' << raw[j] << ','
                         << c * raw[j] << '\n';
    }
    return kExitOk;
}

// --- local-time ------------------------------------------------------------

struct LocalTimeArgs {
    double alpha = 2.0;
    double beta = 0.0;
    std::int64_t grid = 100'000;
    double horizon = 1.0;
    std::optional<double> eps;
    std::int64_t paths = 1;
    std::string u_grid = "1";
    std::uint64_t seed = 1;
    std::string out;
};

int cmd_local_time(const LocalTimeArgs& a) {
    ctrw::validate(ctrw::StableParams{a.alpha, a.beta, 1.0, 0.0});
    const auto u_grid = parse_list(a.u_grid);
    Output out(a.out);
    out.stream() << "path,u,eps,local_time,precision_warning\n";
    ctrw::LevyPath path;
    for (std::int64_t k = 0; k < a.paths; ++k) {
        ctrw::RandomSource rng(ctrw::derive_seed(a.seed, ctrw::streams::limit, k));
        ctrw::simulate_levy(a.alpha, a.beta, a.grid, a.horizon, rng, path);
        const double eps = a.eps.value_or(ctrw::default_eps(a.alpha, path.step()));
        for (const auto& e : ctrw::local_time_zero(path, eps, u_grid))
            out.stream() << k << ',' << e.u << ',' << e.eps << ',' << e.value << ','
                         << (e.precision_warning ? 1 : 0) << '\n';
    }
    return kExitOk;
}

// --- env -------------------------------------------------------------------

struct EnvArgs {
    std::string kernel = "bump";
    double amplitude = 1.0;
    double decay = 3.0;
    std::string window;
    std::uint64_t seed = 1;
    std::string save_config;
    std::string load_config;
    bool check_b3 = false;
    std::string n_list = "100,1000,10000";
    bool cesaro = false;
    std::string t_list = "100,200,400";
    double r = 2.0;
    double grid_step = 0.01;
    bool moment = false;
    double moment_a = 1.0;
    std::int64_t configs = 10'000;
    std::string out;
};

ctrw::Kernel kernel_from_flags(const std::string& name, double amplitude, double decay) {
    if (!(amplitude > 0.0)) throw ctrw::ConfigError("--amplitude must be positive");
    if (name == "bump") return ctrw::Kernel::compact_bump(amplitude);
    if (name == "power") return ctrw::Kernel::power_law(amplitude, decay);
    throw ctrw::ConfigError("unknown kernel '" + name + "'");
}

int cmd_env(const EnvArgs& a) {
    const auto kernel = kernel_from_flags(a.kernel, a.amplitude, a.decay);
    Output out(a.out);

    if (a.moment) {
        // Fresh configuration per draw, evaluated at the origin.
        const auto analytic = ctrw::mean_lambda_inv_analytic(kernel, a.moment_a);
        const double half = kernel.cutoff_r + 1.0;
        std::vector<double> draws(static_cast<std::size_t>(a.configs));
        for (std::int64_t k = 0; k < a.configs; ++k) {
            ctrw::RandomSource rng(ctrw::derive_seed(a.seed, ctrw::streams::environment, k));
            auto config = std::make_shared<const ctrw::PoissonConfig>(ctrw::sample_config(-half, half, rng));
            const ctrw::ShotNoiseEnv env{kernel, config};
            draws[static_cast<std::size_t>(k)] = std::exp(a.moment_a * ctrw::potential(env, 0.0));
        }
        const double se = std::sqrt(ctrw::variance(draws) / static_cast<double>(draws.size()));
        out.stream() << "a,analytic,analytic_error,monte_carlo,standard_error\n";
        out.stream() << a.moment_a << ',' << analytic.value << ',' << analytic.error << ','
                     << ctrw::mean(draws) << ',' << se << '\n';
        return kExitOk;
    }

    // Window large enough for whichever diagnostic is requested.
    double half = 100.0;
    const auto n_list = parse_list(a.n_list);
    const auto t_list = parse_list(a.t_list);
    if (a.check_b3)
        for (double n : n_list) half = std::max(half, n);
    if (a.cesaro)
        for (double t : t_list) half = std::max(half, std::pow(t, a.r) + t);
    half += kernel.cutoff_r + 1.0;

    std::shared_ptr<const ctrw::PoissonConfig> config;
    if (!a.load_config.empty()) {
        config = std::make_shared<const ctrw::PoissonConfig>(ctrw::load_config(a.load_config));
    } else {
        double lo = -half, hi = half;
        if (!a.window.empty()) {
            const auto w = parse_list(a.window);
            if (w.size() != 2 || !(w[0] <= w[1])) throw ctrw::ConfigError("--window needs lo,hi");
            lo = w[0];
            hi = w[1];
        }
        ctrw::RandomSource rng(ctrw::derive_seed(a.seed, ctrw::streams::environment, 0));
        config = std::make_shared<const ctrw::PoissonConfig>(ctrw::sample_config(lo, hi, rng));
    }
    if (!a.save_config.empty()) ctrw::save_config(a.save_config, *config);
    const ctrw::EnvSpec env = ctrw::ShotNoiseEnv{kernel, config};

    if (a.check_b3) {
        out.stream() << "n,sup\n";
        for (const auto& [n, sup] : ctrw::sup_growth_check(env, n_list, a.grid_step))
            out.stream() << n << ',' << sup << '\n';
    } else if (a.cesaro) {
        const auto errors = ctrw::cesaro_errors(env, t_list, a.r, a.grid_step);
        out.stream() << "t,error\n";
        for (std::size_t i = 0; i < t_list.size(); ++i)
            out.stream() << t_list[i] << ',' << errors[i] << '\n';
    } else {
        out.stream() << "lo,hi,points,lambda_bar_inv\n";
        out.stream() << config->lo << ',' << config->hi << ',' << config->points.size() << ','
                     << ctrw::lambda_bar_inv(env) << '\n';
    }
    return kExitOk;
}

// --- compare ---------------------------------------------------------------

struct CompareArgs {
    std::string config;
    unsigned workers = 1;
    std::string json;
    std::string csv;
    std::optional<std::uint64_t> seed;
    int verbosity = 0;
};

int cmd_compare(const CompareArgs& a) {
    auto cli = ctrw::load_cli_config(a.config);
    auto& cfg = cli.experiment;
    if (a.seed) {
        cfg.master_seed = *a.seed;
        cfg.echo["experiment.master_seed"] = std::to_string(*a.seed);
    }
    if (a.workers < 1) throw ctrw::ConfigError("--workers must be at least 1");
    cfg.workers = a.workers;
    const std::string json = a.json.empty() ? cli.json_path.value_or("") : a.json;
    const std::string csv = a.csv.empty() ? cli.csv_path.value_or("") : a.csv;
    const int verbosity = std::max(a.verbosity, cli.verbosity);

    const auto report = ctrw::run_experiment(cfg);
    if (!json.empty()) ctrw::emit_report(report, json, ctrw::ReportFormat::json);
    if (!csv.empty()) ctrw::emit_report(report, csv, ctrw::ReportFormat::csv);
    if (json.empty() && csv.empty()) std::cout << ctrw::report_csv_text(report);
    if (verbosity > 0) {
        std::cerr << report.theorem << ": sigma=" << report.sigma << " limit=" << report.limit.value
                  << " runtime=" << report.runtime_seconds << "s\n";
        for (const auto& p : report.per_u)
            std::cerr << "  u=" << p.u << " ks=" << p.ks << " w1=" << p.w1
                      << (p.passed ? " pass" : " FAIL") << '\n';
        if (report.fdd)
            std::cerr << "  fdd ks_increment=" << report.fdd->ks_increment
                      << (report.fdd->passed ? " pass" : " FAIL") << '\n';
    }
    return report.passed ? kExitOk : kExitThreshold;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Continuous-time random walk simulator and limit-law checker"};
    app.require_subcommand(1);

    SampleStableArgs ss;
    auto* sample = app.add_subcommand("sample-stable", "Draw stable variates, one per line");
    sample->add_option("--alpha", ss.alpha, "Stability index in (0, 2]")->required();
    sample->add_option("--beta", ss.beta, "Skewness in [-1, 1]");
    sample->add_option("--scale", ss.scale, "Scale c > 0");
    sample->add_option("--location", ss.location, "Location a");
    sample->add_option("--n", ss.n, "Number of samples");
    sample->add_option("--seed", ss.seed, "RNG seed");
    sample->add_option("--out", ss.out, "Output file (default stdout)");

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Simulate walks and their additive functional");
    simulate->add_option("--law", sim.law, "gaussian | symmetric_pareto | lattice");
    simulate->add_option("--variance", sim.variance, "Gaussian jump variance");
    simulate->add_option("--alpha", sim.alpha, "Pareto tail index in (1, 2)");
    simulate->add_option("--wait-mean", sim.wait_mean, "Mean exponential waiting time");
    simulate->add_option("--t", sim.t, "Time horizon");
    simulate->add_option("--u", sim.u_grid, "Comma-separated u grid in (0, 1]");
    simulate->add_option("--paths", sim.paths, "Number of paths");
    simulate->add_option("--seed", sim.seed, "Master seed");
    simulate->add_option("--out", sim.out, "CSV output (default stdout)");
    simulate->add_option("--dump-skeleton", sim.skeleton, "Write the first path's skeleton here");

    LocalTimeArgs lt;
    auto* local = app.add_subcommand("local-time", "Estimate the local time at zero of a stable motion");
    local->add_option("--alpha", lt.alpha, "Stability index in (1, 2]");
    local->add_option("--beta", lt.beta, "Skewness");
    local->add_option("--grid", lt.grid, "Grid points over the horizon");
    local->add_option("--horizon", lt.horizon, "Path horizon");
    local->add_option("--eps", lt.eps, "Band half-width");
    local->add_option("--paths", lt.paths, "Number of paths");
    local->add_option("--u", lt.u_grid, "Comma-separated evaluation times");
    local->add_option("--seed", lt.seed, "Master seed");
    local->add_option("--out", lt.out, "CSV output (default stdout)");

    EnvArgs ev;
    auto* envcmd = app.add_subcommand("env", "Shot-noise environment diagnostics");
    envcmd->add_option("--kernel", ev.kernel, "bump | power");
    envcmd->add_option("--amplitude", ev.amplitude, "Kernel amplitude");
    envcmd->add_option("--decay", ev.decay, "Power kernel decay exponent");
    envcmd->add_option("--window", ev.window, "Sampling window lo,hi");
    envcmd->add_option("--seed", ev.seed, "Environment seed");
    envcmd->add_option("--save-config", ev.save_config, "Write the sampled configuration");
    envcmd->add_option("--load-config", ev.load_config, "Read a configuration instead of sampling");
    envcmd->add_flag("--check-b3", ev.check_b3, "Emit n,sup rows of sup over |x| <= n of 1/Lambda");
    envcmd->add_option("--n", ev.n_list, "Comma-separated n values for --check-b3");
    envcmd->add_flag("--cesaro", ev.cesaro, "Emit t,error rows of the Cesaro-average error");
    envcmd->add_option("--t", ev.t_list, "Comma-separated horizons for --cesaro");
    envcmd->add_option("--r", ev.r, "Window-location growth exponent for --cesaro");
    envcmd->add_option("--grid-step", ev.grid_step, "x-grid spacing");
    envcmd->add_flag("--moment", ev.moment, "Compare E[Lambda^-a] with Monte Carlo");
    envcmd->add_option("--a", ev.moment_a, "Moment order for --moment");
    envcmd->add_option("--configs", ev.configs, "Configurations for --moment");
    envcmd->add_option("--out", ev.out, "CSV output (default stdout)");

    CompareArgs cmp;
    auto* compare = app.add_subcommand("compare", "Compare a functional ensemble with its limit law");
    compare->add_option("--config", cmp.config, "Experiment config file")->required();
    compare->add_option("--workers", cmp.workers, "Worker threads");
    compare->add_option("--json", cmp.json, "JSON report path");
    compare->add_option("--csv", cmp.csv, "CSV report path");
    compare->add_option("--seed", cmp.seed, "Override the master seed");
    compare->add_flag("-v,--verbose", cmp.verbosity, "Print a summary to stderr");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    }

    try {
        if (*sample) return cmd_sample_stable(ss);
        if (*simulate) return cmd_simulate(sim);
        if (*local) return cmd_local_time(lt);
        if (*envcmd) return cmd_env(ev);
        if (*compare) return cmd_compare(cmp);
    } catch (const ctrw::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const ctrw::DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitInvalid;
}
