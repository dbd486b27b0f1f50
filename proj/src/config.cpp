#include "ctrw/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "ctrw/errors.hpp"

namespace ctrw {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, sep);) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    return out;
}

std::int64_t to_int(const std::string& key, const std::string& v) {
    std::int64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        // Allow integral values in scientific notation, e.g. 1e4.
        const double d = to_double(key, v);
        if (d != std::floor(d) || std::abs(d) > 9.0e18)
            throw ConfigError(key + ": expected an integer, got '" + v + "'");
        return static_cast<std::int64_t>(d);
    }
    return out;
}

std::uint64_t to_seed(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw ConfigError(key + ": expected an unsigned integer seed, got '" + v + "'");
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

// Tracks which keys were consumed so leftovers can be rejected.
class Reader {
public:
    explicit Reader(const std::map<std::string, std::string>& kv) : kv_(kv) {}

    std::optional<std::string> str(const std::string& key) {
        const auto it = kv_.find(key);
        if (it == kv_.end()) return std::nullopt;
        used_.insert(key);
        return it->second;
    }
    std::string str(const std::string& key, const std::string& fallback) {
        return str(key).value_or(fallback);
    }
    std::optional<double> num(const std::string& key) {
        const auto v = str(key);
        if (!v) return std::nullopt;
        return to_double(key, *v);
    }
    double num(const std::string& key, double fallback) { return num(key).value_or(fallback); }
    std::optional<std::int64_t> integer(const std::string& key) {
        const auto v = str(key);
        if (!v) return std::nullopt;
        return to_int(key, *v);
    }
    std::int64_t integer(const std::string& key, std::int64_t fallback) {
        return integer(key).value_or(fallback);
    }

    void reject_unused() const {
        for (const auto& [key, value] : kv_)
            if (!used_.count(key)) throw ConfigError("unknown config key '" + key + "'");
    }

private:
    const std::map<std::string, std::string>& kv_;
    std::set<std::string> used_;
};

JumpLaw build_jump(Reader& r) {
    const auto law = r.str("jump.law", "gaussian");
    if (law == "gaussian") {
        const double var = r.num("jump.variance", 2.0);
        if (!(var > 0.0)) throw ConfigError("jump.variance must be positive");
        return JumpLaw::gaussian(var);
    }
    if (law == "symmetric_pareto" || law == "skewed_pareto") {
        const double alpha = r.num("jump.alpha", 1.5);
        const double x_min = r.num("jump.x_min", 1.0);
        if (!(alpha > 1.0 && alpha < 2.0)) throw ConfigError("jump.alpha must lie in (1, 2)");
        if (!(x_min > 0.0)) throw ConfigError("jump.x_min must be positive");
        if (law == "symmetric_pareto") return JumpLaw::symmetric_pareto(alpha, x_min);
        const double p = r.num("jump.p_right", 0.5);
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("jump.p_right must lie in [0, 1]");
        return JumpLaw::skewed_pareto(alpha, x_min, p);
    }
    if (law == "lattice") {
        // weights = "-1:0.5,1:0.5" lists site:probability pairs on Z.
        const auto spec = r.str("jump.weights", "-1:0.5,1:0.5");
        std::vector<std::pair<long, double>> weights;
        for (const auto& item : split(spec, ',')) {
            const auto colon = item.find(':');
            if (colon == std::string::npos)
                throw ConfigError("jump.weights: expected site:weight, got '" + item + "'");
            const auto site = to_int("jump.weights", trim(item.substr(0, colon)));
            const double w = to_double("jump.weights", trim(item.substr(colon + 1)));
            if (!(w > 0.0)) throw ConfigError("jump.weights: weights must be positive");
            weights.emplace_back(static_cast<long>(site), w);
        }
        if (weights.size() < 2) throw ConfigError("jump.weights needs at least two sites");
        const double span = r.num("jump.span", 1.0);
        if (!(span > 0.0)) throw ConfigError("jump.span must be positive");
        return JumpLaw::lattice(r.num("jump.offset", 0.0), span, std::move(weights));
    }
    throw ConfigError("jump.law: unknown law '" + law + "'");
}

WaitLaw build_wait(Reader& r) {
    const auto law = r.str("wait.law", "exponential");
    try {
        if (law == "exponential") return WaitLaw::exponential_mean(r.num("wait.mean", 1.0));
        if (law == "pareto") return WaitLaw::pareto(r.num("wait.index", 2.5), r.num("wait.x_min", 1.0));
        if (law == "gamma") return WaitLaw::gamma(r.num("wait.shape", 1.0), r.num("wait.scale", 1.0));
        if (law == "deterministic") return WaitLaw::deterministic(r.num("wait.value", 1.0));
    } catch (const DomainError& e) {
        throw ConfigError(std::string("wait: ") + e.what());
    }
    throw ConfigError("wait.law: unknown law '" + law + "'");
}

FunctionalSpec build_functional(Reader& r) {
    const auto f = r.str("functional.f", "gauss");
    if (f == "gauss") return FunctionalSpec::gaussian_bump();
    if (f == "point") return FunctionalSpec::point_indicator(r.num("functional.point", 0.0));
    if (f == "interval") {
        const double a = r.num("functional.a", -0.5), b = r.num("functional.b", 0.5);
        if (!(a < b)) throw ConfigError("functional: need a < b");
        return FunctionalSpec::interval_indicator(a, b);
    }
    if (f == "zero") return FunctionalSpec::constant(0.0);
    throw ConfigError("functional.f: unknown functional '" + f + "'");
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::string section;
    std::istringstream is(text);
    int lineno = 0;
    for (std::string raw; std::getline(is, raw);) {
        ++lineno;
        const auto cut = raw.find_first_of("#;");
        const auto line = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (key.find('.') == std::string::npos) {
            if (section.empty())
                throw ConfigError("line " + std::to_string(lineno) + ": key '" + key +
                                  "' outside any section");
            key = section + "." + key;
        }
        if (!kv.emplace(key, value).second) throw ConfigError("duplicate config key '" + key + "'");
    }
    return kv;
}

CliConfig build_config(const std::map<std::string, std::string>& kv) {
    Reader r(kv);
    CliConfig out;
    ExperimentConfig& cfg = out.experiment;

    cfg.theorem = theorem_from_string(r.str("experiment.theorem", "T2"));
    cfg.t = r.num("experiment.t", cfg.t);
    if (const auto grid = r.str("experiment.u_grid")) {
        cfg.u_grid.clear();
        for (const auto& item : split(*grid, ',')) cfg.u_grid.push_back(to_double("experiment.u_grid", item));
    }
    cfg.replicates = r.integer("experiment.replicates", cfg.replicates);
    cfg.limit_replicates = r.integer("experiment.limit_replicates", cfg.limit_replicates);
    if (const auto s = r.str("experiment.master_seed")) cfg.master_seed = to_seed("experiment.master_seed", *s);
    if (const auto s = r.str("experiment.environment_seed"))
        cfg.environment_seed = to_seed("experiment.environment_seed", *s);
    cfg.ks_threshold = r.num("experiment.ks_threshold", cfg.ks_threshold);
    cfg.w1_threshold = r.num("experiment.w1_threshold");
    if (const auto pair = r.str("experiment.fdd_pair")) {
        if (*pair == "none") {
            cfg.fdd_pair.reset();
        } else {
            const auto parts = split(*pair, ',');
            if (parts.size() != 2) throw ConfigError("experiment.fdd_pair: expected u1,u2 or none");
            cfg.fdd_pair = std::make_pair(to_double("experiment.fdd_pair", parts[0]),
                                          to_double("experiment.fdd_pair", parts[1]));
        }
    }
    cfg.jump_cap = r.integer("experiment.jump_cap", cfg.jump_cap);
    if (cfg.jump_cap < 1) throw ConfigError("experiment.jump_cap must be positive");
    if (const auto s = r.str("experiment.allow_short_horizon"))
        cfg.allow_short_horizon = to_bool("experiment.allow_short_horizon", *s);
    const auto workers = r.integer("experiment.workers", 1);
    if (workers < 1 || workers > 1024) throw ConfigError("experiment.workers must lie in [1, 1024]");
    cfg.workers = static_cast<unsigned>(workers);
    cfg.calibration_replicates = r.integer("experiment.calibration_replicates", cfg.calibration_replicates);
    cfg.calibration_n = r.integer("experiment.calibration_n");
    if (cfg.calibration_n && *cfg.calibration_n < 1) throw ConfigError("experiment.calibration_n must be positive");

    cfg.jump = build_jump(r);
    cfg.sigma = r.num("jump.sigma");
    cfg.limit_beta = r.num("jump.limit_beta");
    cfg.wait = build_wait(r);
    cfg.functional = build_functional(r);

    const auto env_type = r.str("environment.type", "none");
    if (env_type == "constant") {
        const double v = r.num("environment.value", 1.0);
        if (!(v > 0.0)) throw ConfigError("environment.value must be positive");
        cfg.deterministic_env = DeterministicEnv::constant(v);
    } else if (env_type == "periodic") {
        const double m = r.num("environment.mean", 2.0), a = r.num("environment.amplitude", 1.0);
        if (!(m > std::abs(a))) throw ConfigError("environment: need mean > |amplitude| so Lambda > 0");
        cfg.deterministic_env = DeterministicEnv::periodic_inverse(m, a);
    } else if (env_type == "shot_noise") {
        const auto kernel = r.str("environment.kernel", "bump");
        const double amp = r.num("environment.kernel_amplitude", 1.0);
        if (!(amp > 0.0)) throw ConfigError("environment.kernel_amplitude must be positive");
        if (kernel == "bump") {
            cfg.kernel = Kernel::compact_bump(amp);
        } else if (kernel == "power") {
            const double decay = r.num("environment.kernel_decay", 3.0);
            const double tol = r.num("environment.tail_tol", 1e-6);
            if (!(decay > 0.0)) throw ConfigError("environment.kernel_decay must be positive");
            if (!(tol > 0.0)) throw ConfigError("environment.tail_tol must be positive");
            cfg.kernel = Kernel::power_law(amp, decay, tol);
        } else {
            throw ConfigError("environment.kernel: unknown kernel '" + kernel + "'");
        }
        if (const auto path = r.str("environment.config_file")) {
            try {
                cfg.preset_config = std::make_shared<const PoissonConfig>(load_config(*path));
            } catch (const IoError& e) {
                throw ConfigError(e.what());
            }
        }
    } else if (env_type != "none") {
        throw ConfigError("environment.type: unknown type '" + env_type + "'");
    }

    cfg.local_time.grid_per_unit = r.integer("limit.grid_per_unit", cfg.local_time.grid_per_unit);
    cfg.local_time.eps = r.num("limit.eps");

    out.json_path = r.str("output.json");
    out.csv_path = r.str("output.csv");
    out.verbosity = static_cast<int>(r.integer("output.verbosity", 0));

    r.reject_unused();

    if (const char* env_seed = std::getenv("CTRW_SEED"); env_seed && *env_seed)
        cfg.master_seed = to_seed("CTRW_SEED", env_seed);

    cfg.echo = kv;
    cfg.echo["experiment.master_seed"] = std::to_string(cfg.master_seed);
    // Worker count and output paths never affect results; keep them out of the echo.
    cfg.echo.erase("experiment.workers");
    for (auto it = cfg.echo.begin(); it != cfg.echo.end();)
        it = it->first.rfind("output.", 0) == 0 ? cfg.echo.erase(it) : std::next(it);

    validate(cfg);
    return out;
}

CliConfig load_cli_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return build_config(parse_key_values(ss.str()));
}

}  // namespace ctrw
