#include "ctrw/environment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "ctrw/errors.hpp"

namespace ctrw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Offsets (relative to a configuration point) where the truncated
// potential is not smooth.
std::vector<double> breakpoint_offsets(const Kernel& k) {
    std::vector<double> offsets = k.kinks;
    offsets.push_back(-k.cutoff_r);
    offsets.push_back(k.cutoff_r);
    std::sort(offsets.begin(), offsets.end());
    offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());
    return offsets;
}

void require_inside(const ShotNoiseEnv& env, double a, double b) {
    const auto& c = *env.config;
    const double r = env.kernel.cutoff_r;
    if (a - r < c.lo || b + r > c.hi) {
        std::ostringstream os;
        os << "query range [" << a << ", " << b << "] with cutoff " << r
           << " leaves the configuration window [" << c.lo << ", " << c.hi << "]";
        throw BoundaryError(os.str());
    }
}

// Integrals of weight(x) / Lambda(x) over consecutive cells
// [edges[j], edges[j+1]]. Each cell is split at the kinks of the potential
// and the contributing points are tracked with a sliding window.
template <class W>
std::vector<double> shot_noise_cells(const ShotNoiseEnv& env, const std::vector<double>& edges,
                                     W&& weight, double rel_tol, double* error_out) {
    std::vector<double> cells(edges.size() > 0 ? edges.size() - 1 : 0, 0.0);
    if (cells.empty()) return cells;
    require_inside(env, edges.front(), edges.back());
    const auto& pts = env.config->points;
    const auto& phi = env.kernel.phi;
    const double r = env.kernel.cutoff_r;
    const auto offsets = breakpoint_offsets(env.kernel);

    const auto first = static_cast<std::size_t>(
        std::lower_bound(pts.begin(), pts.end(), edges.front() - r) - pts.begin());
    const auto last = static_cast<std::size_t>(
        std::upper_bound(pts.begin(), pts.end(), edges.back() + r) - pts.begin());
    std::vector<double> kinks;
    kinks.reserve((last - first) * offsets.size());
    for (std::size_t i = first; i < last; ++i)
        for (double off : offsets) {
            const double v = pts[i] + off;
            if (v > edges.front() && v < edges.back()) kinks.push_back(v);
        }
    std::sort(kinks.begin(), kinks.end());

    std::size_t lo_ptr = first, hi_ptr = first, kink = 0;
    double total_error = 0.0;
    std::vector<double> panel;
    for (std::size_t j = 0; j + 1 < edges.size(); ++j) {
        const double c0 = edges[j], c1 = edges[j + 1];
        while (hi_ptr < last && pts[hi_ptr] <= c1 + r) ++hi_ptr;
        while (lo_ptr < hi_ptr && pts[lo_ptr] < c0 - r) ++lo_ptr;
        auto integrand = [&, lo = lo_ptr, hi = hi_ptr](double x) {
            double e = 0.0;
            for (std::size_t i = lo; i < hi; ++i) {
                const double d = x - pts[i];
                if (std::abs(d) <= r) e += phi(d);
            }
            return weight(x) * std::exp(e);
        };
        panel.clear();
        while (kink < kinks.size() && kinks[kink] <= c0) ++kink;
        for (std::size_t q = kink; q < kinks.size() && kinks[q] < c1; ++q) panel.push_back(kinks[q]);
        const auto piece = integrate_pieces(integrand, c0, c1, panel, rel_tol);
        cells[j] = piece.value;
        total_error += piece.error;
    }
    if (error_out) *error_out = total_error;
    return cells;
}

template <class W>
std::vector<double> deterministic_cells(const DeterministicEnv& env,
                                        const std::vector<double>& edges, W&& weight,
                                        double rel_tol, double* error_out) {
    std::vector<double> cells(edges.size() > 0 ? edges.size() - 1 : 0, 0.0);
    double total_error = 0.0;
    auto integrand = [&](double x) { return weight(x) / env.lambda(x); };
    std::vector<double> panel;
    for (std::size_t j = 0; j + 1 < edges.size(); ++j) {
        const double c0 = edges[j], c1 = edges[j + 1];
        panel.clear();
        if (env.period > 0.0) {
            const double first = std::ceil(c0 / env.period) * env.period;
            for (double x = first; x < c1; x += env.period)
                if (x > c0) panel.push_back(x);
            // Very long cells: cap the panel count, the integrand is smooth.
            if (panel.size() > 100000) panel.clear();
        }
        const auto piece = integrate_pieces(integrand, c0, c1, panel, rel_tol);
        cells[j] = piece.value;
        total_error += piece.error;
    }
    if (error_out) *error_out = total_error;
    return cells;
}

template <class W>
std::vector<double> env_cells(const EnvSpec& env, const std::vector<double>& edges, W&& weight,
                              double rel_tol, double* error_out) {
    return std::visit(overloaded{
                          [&](const DeterministicEnv& d) {
                              return deterministic_cells(d, edges, weight, rel_tol, error_out);
                          },
                          [&](const ShotNoiseEnv& s) {
                              return shot_noise_cells(s, edges, weight, rel_tol, error_out);
                          },
                      },
                      env);
}

}  // namespace

Kernel Kernel::power_law(double amplitude, double decay_beta, double tail_tol) {
    if (!(amplitude >= 0.0)) throw DomainError("kernel amplitude must be nonnegative");
    if (!(decay_beta > 0.0)) throw DomainError("kernel decay exponent must be positive");
    if (!(tail_tol > 0.0)) throw DomainError("kernel tail tolerance must be positive");
    Kernel k;
    k.name = "power";
    k.amplitude = amplitude;
    k.bound_c = amplitude;
    k.decay_beta = decay_beta;
    const double power = 1.0 + decay_beta;
    k.phi = [amplitude, power](double x) { return amplitude / (1.0 + std::pow(std::abs(x), power)); };
    k.cutoff_r = amplitude > 0.0
                     ? std::pow(2.0 * amplitude / (decay_beta * tail_tol), 1.0 / decay_beta)
                     : 1.0;
    k.compact = false;
    k.kinks = {0.0};
    return k;
}

Kernel Kernel::compact_bump(double amplitude) {
    if (!(amplitude >= 0.0)) throw DomainError("kernel amplitude must be nonnegative");
    Kernel k;
    k.name = "bump";
    k.amplitude = amplitude;
    // (1 - |x|)^2 <= 2 / (1 + x^2) on [-1, 1].
    k.bound_c = 2.0 * amplitude;
    k.decay_beta = 1.0;
    k.phi = [amplitude](double x) {
        const double s = 1.0 - std::abs(x);
        return s > 0.0 ? amplitude * s * s : 0.0;
    };
    k.cutoff_r = 1.0;
    k.compact = true;
    k.kinks = {-1.0, 0.0, 1.0};
    return k;
}

double Kernel::tail_bound() const {
    if (compact) return 0.0;
    return 2.0 * bound_c * std::pow(cutoff_r, -decay_beta) / decay_beta;
}

void Kernel::check_decay_bound(double radius, int points) const {
    for (int i = 0; i < points; ++i) {
        const double x = -radius + 2.0 * radius * i / (points - 1);
        const double v = phi(x);
        const double bound = bound_c / (1.0 + std::pow(std::abs(x), 1.0 + decay_beta));
        if (!(v >= 0.0) || v > bound * (1.0 + 1e-12)) {
            std::ostringstream os;
            os << "kernel " << name << " violates 0 <= phi <= C/(1+|x|^(1+beta)) at x=" << x;
            throw DomainError(os.str());
        }
    }
}

std::size_t PoissonConfig::count_in(double a, double b) const {
    const auto i = std::lower_bound(points.begin(), points.end(), a);
    const auto j = std::lower_bound(points.begin(), points.end(), b);
    return static_cast<std::size_t>(j - i);
}

PoissonConfig sample_config(double lo, double hi, RandomSource& rng) {
    if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
        throw DomainError("sample_config: window must satisfy lo <= hi");
    PoissonConfig c;
    c.lo = lo;
    c.hi = hi;
    const auto n = rng.poisson(hi - lo);
    c.points.resize(n);
    for (auto& y : c.points) y = rng.uniform(lo, hi);
    std::sort(c.points.begin(), c.points.end());
    return c;
}

void write_config(std::ostream& os, const PoissonConfig& config) {
    os << std::setprecision(17);
    os << "# window " << config.lo << ' ' << config.hi << '\n';
    for (double y : config.points) os << y << '\n';
}

PoissonConfig read_config(std::istream& is) {
    PoissonConfig c;
    bool have_window = false;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream hs(line.substr(1));
            std::string tag;
            if (hs >> tag && tag == "window") {
                if (!(hs >> c.lo >> c.hi)) throw IoError("malformed window header in config");
                have_window = true;
            }
            continue;
        }
        std::istringstream ls(line);
        double y = 0.0;
        if (!(ls >> y)) throw IoError("malformed coordinate line in config: " + line);
        c.points.push_back(y);
    }
    std::sort(c.points.begin(), c.points.end());
    if (!have_window) {
        if (c.points.empty()) throw IoError("config without window header or points");
        c.lo = c.points.front();
        c.hi = c.points.back();
    }
    return c;
}

void save_config(const std::string& path, const PoissonConfig& config) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path + " for writing");
    write_config(os, config);
    if (!os) throw IoError("write failed: " + path);
}

PoissonConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path);
    return read_config(is);
}

DeterministicEnv DeterministicEnv::constant(double value) {
    if (!(value > 0.0)) throw DomainError("constant intensity must be positive");
    DeterministicEnv e;
    std::ostringstream os;
    os << "constant(" << value << ")";
    e.name = os.str();
    e.lambda = [value](double) { return value; };
    e.lambda_bar_inv = 1.0 / value;
    return e;
}

DeterministicEnv DeterministicEnv::periodic_inverse(double mean, double amplitude) {
    if (!(mean > std::abs(amplitude))) throw DomainError("periodic intensity needs mean > |amplitude|");
    DeterministicEnv e;
    std::ostringstream os;
    os << "periodic_inverse(mean=" << mean << ", amplitude=" << amplitude << ")";
    e.name = os.str();
    e.lambda = [mean, amplitude](double x) {
        return 1.0 / (mean + amplitude * std::sin(2.0 * std::numbers::pi * x));
    };
    e.lambda_bar_inv = mean;
    e.period = 1.0;
    return e;
}

double potential(const ShotNoiseEnv& env, double x) {
    require_inside(env, x, x);
    const auto& pts = env.config->points;
    const double r = env.kernel.cutoff_r;
    double e = 0.0;
    for (auto it = std::lower_bound(pts.begin(), pts.end(), x - r); it != pts.end() && *it <= x + r;
         ++it)
        e += env.kernel.phi(x - *it);
    return e;
}

double lambda_inv(const EnvSpec& env, double x) {
    return std::visit(overloaded{
                          [x](const DeterministicEnv& d) { return 1.0 / d.lambda(x); },
                          [x](const ShotNoiseEnv& s) { return std::exp(potential(s, x)); },
                      },
                      env);
}

double lambda(const EnvSpec& env, double x) {
    return std::visit(overloaded{
                          [x](const DeterministicEnv& d) { return d.lambda(x); },
                          [x](const ShotNoiseEnv& s) { return std::exp(-potential(s, x)); },
                      },
                      env);
}

Integral exponent_integral(const Kernel& kernel, double a) {
    if (a == 0.0 || kernel.amplitude == 0.0) return {};
    auto integrand = [&](double y) { return std::expm1(a * kernel.phi(y)); };
    if (kernel.compact)
        return integrate_pieces(integrand, -kernel.cutoff_r, kernel.cutoff_r, kernel.kinks);
    auto edges = kernel.kinks;
    std::sort(edges.begin(), edges.end());
    Integral total;
    double left = -kInf;
    for (double x : edges) {
        const auto p = integrate(integrand, left, x);
        total.value += p.value;
        total.error += p.error;
        left = x;
    }
    const auto p = integrate(integrand, left, kInf);
    total.value += p.value;
    total.error += p.error;
    return total;
}

Integral mean_lambda_inv_analytic(const Kernel& kernel, double a) {
    const auto i = exponent_integral(kernel, a);
    const double value = std::exp(i.value);
    return {value, value * i.error};
}

double theorem5_constant(const Kernel& kernel, double alpha) {
    if (!(alpha > 1.0 && alpha < 2.0)) throw DomainError("theorem5_constant: alpha must lie in (1,2)");
    return std::exp((1.0 / alpha - 1.0) * exponent_integral(kernel, 1.0).value);
}

double lambda_bar_inv(const EnvSpec& env) {
    return std::visit(overloaded{
                          [](const DeterministicEnv& d) { return d.lambda_bar_inv; },
                          [](const ShotNoiseEnv& s) {
                              return mean_lambda_inv_analytic(s.kernel, 1.0).value;
                          },
                      },
                      env);
}

Integral weighted_integral(const std::function<double(double)>& g, const EnvSpec& env,
                           double radius) {
    if (!(radius > 0.0)) throw DomainError("weighted_integral: radius must be positive");
    double error = 0.0;
    const auto cells = env_cells(env, {-radius, radius}, g, kDefaultRelTol, &error);
    return {cells.front(), error};
}

std::vector<double> cesaro_errors(const EnvSpec& env, const std::vector<double>& t_list, double r,
                                  double grid_step) {
    if (t_list.empty()) return {};
    if (!(grid_step > 0.0)) throw DomainError("cesaro_error: grid_step must be positive");
    if (!(r > 0.0)) throw DomainError("cesaro_error: r must be positive");
    std::vector<long long> steps;
    double t_max = 0.0, reach = 0.0;
    for (double t : t_list) {
        if (!(t > 0.0)) throw DomainError("cesaro_error: t must be positive");
        const double m = t / grid_step;
        if (std::abs(m - std::round(m)) > 1e-9 * std::max(1.0, m))
            throw DomainError("cesaro_error: t must be a multiple of grid_step");
        steps.push_back(std::llround(m));
        t_max = std::max(t_max, t);
        reach = std::max(reach, std::pow(t, r));
    }
    const long long half = static_cast<long long>(std::ceil(reach / grid_step - 1e-9));
    const long long max_steps = *std::max_element(steps.begin(), steps.end());
    const long long cells = 2 * half + max_steps;
    std::vector<double> edges(static_cast<std::size_t>(cells + 1));
    for (long long j = 0; j <= cells; ++j)
        edges[static_cast<std::size_t>(j)] = static_cast<double>(j - half) * grid_step;

    const auto cell = env_cells(env, edges, [](double) { return 1.0; }, kDefaultRelTol, nullptr);
    // Compensated running sum keeps long cumulative integrals accurate.
    std::vector<double> cumulative(edges.size(), 0.0);
    double sum = 0.0, carry = 0.0;
    for (std::size_t j = 0; j < cell.size(); ++j) {
        const double y = cell[j] - carry;
        const double next = sum + y;
        carry = (next - sum) - y;
        sum = next;
        cumulative[j + 1] = sum;
    }

    const double target = lambda_bar_inv(env);
    std::vector<double> out;
    for (std::size_t q = 0; q < t_list.size(); ++q) {
        const double t = t_list[q];
        const double bound = std::pow(t, r);
        const auto m = static_cast<std::size_t>(steps[q]);
        double worst = 0.0;
        for (long long j = 0; j <= 2 * half; ++j) {
            const auto ju = static_cast<std::size_t>(j);
            if (std::abs(edges[ju]) > bound * (1.0 + 1e-12)) continue;
            const double avg = (cumulative[ju + m] - cumulative[ju]) / t;
            worst = std::max(worst, std::abs(avg - target));
        }
        out.push_back(worst);
    }
    return out;
}

double cesaro_error(const EnvSpec& env, double t, double r, double grid_step) {
    return cesaro_errors(env, {t}, r, grid_step).front();
}

std::vector<std::pair<double, double>> sup_growth_check(const EnvSpec& env,
                                                        const std::vector<double>& n_list,
                                                        double grid_step) {
    if (!(grid_step > 0.0)) throw DomainError("sup_growth_check: grid_step must be positive");
    std::vector<std::pair<double, double>> out;
    for (double n : n_list) {
        if (!(n > 0.0)) throw DomainError("sup_growth_check: n must be positive");
        const auto steps = static_cast<long long>(std::floor(n / grid_step));
        double best = 0.0;
        for (long long j = -steps; j <= steps; ++j)
            best = std::max(best, lambda_inv(env, static_cast<double>(j) * grid_step));
        best = std::max(best, lambda_inv(env, n));
        best = std::max(best, lambda_inv(env, -n));
        if (const auto* s = std::get_if<ShotNoiseEnv>(&env)) {
            for (double y : s->config->points)
                if (std::abs(y) <= n) best = std::max(best, lambda_inv(env, y));
        }
        out.emplace_back(n, best);
    }
    return out;
}

double walk_window_half_width(double t, double alpha, const Kernel& kernel) {
    return 1e3 * std::pow(t, 1.0 / alpha) + kernel.cutoff_r;
}

}  // namespace ctrw
