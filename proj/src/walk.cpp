#include "ctrw/walk.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

#include "ctrw/errors.hpp"

namespace ctrw {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

WaitLaw WaitLaw::exponential_mean(double mean) {
    if (!(mean > 0.0)) throw DomainError("exponential wait needs a positive mean");
    return {ExponentialWait{1.0 / mean}};
}

WaitLaw WaitLaw::pareto(double index, double x_min) {
    if (!(index > 1.0)) throw DomainError("Pareto wait needs index > 1 for a finite mean");
    if (!(x_min > 0.0)) throw DomainError("Pareto wait needs x_min > 0");
    return {ParetoWait{index, x_min}};
}

WaitLaw WaitLaw::gamma(double shape, double scale) {
    if (!(shape > 0.0 && scale > 0.0)) throw DomainError("gamma wait needs positive shape and scale");
    return {GammaWait{shape, scale}};
}

WaitLaw WaitLaw::deterministic(double value) {
    if (!(value > 0.0)) throw DomainError("deterministic wait must be positive");
    return {DeterministicWait{value}};
}

double WaitLaw::mean() const {
    return std::visit(overloaded{
                          [](const ExponentialWait& w) { return 1.0 / w.rate; },
                          [](const ParetoWait& w) { return w.index * w.x_min / (w.index - 1.0); },
                          [](const GammaWait& w) { return w.shape * w.scale; },
                          [](const DeterministicWait& w) { return w.value; },
                      },
                      shape);
}

std::string WaitLaw::name() const {
    std::ostringstream os;
    os.precision(17);
    std::visit(overloaded{
                   [&](const ExponentialWait& w) { os << "exponential(mean=" << 1.0 / w.rate << ")"; },
                   [&](const ParetoWait& w) {
                       os << "pareto(index=" << w.index << ", x_min=" << w.x_min << ")";
                   },
                   [&](const GammaWait& w) {
                       os << "gamma(shape=" << w.shape << ", scale=" << w.scale << ")";
                   },
                   [&](const DeterministicWait& w) { os << "deterministic(" << w.value << ")"; },
               },
               shape);
    return os.str();
}

double sample_wait(const WaitLaw& law, RandomSource& rng) {
    return std::visit(overloaded{
                          [&](const ExponentialWait& w) { return rng.exponential() / w.rate; },
                          [&](const ParetoWait& w) {
                              return w.x_min * std::pow(rng.uniform(), -1.0 / w.index);
                          },
                          [&](const GammaWait& w) { return rng.gamma(w.shape, w.scale); },
                          [&](const DeterministicWait& w) { return w.value; },
                      },
                      law.shape);
}

void PathSkeleton::clear() {
    positions.clear();
    holds.clear();
    times.clear();
    horizon = 0.0;
    n_jumps = 0;
}

bool check_bracketing(const PathSkeleton& path) {
    const auto n = static_cast<std::size_t>(path.n_jumps);
    if (path.positions.size() != n + 1 || path.holds.size() != n + 1 || path.times.size() != n + 2)
        return false;
    if (path.positions.front() != 0.0 || path.times.front() != 0.0) return false;
    for (double h : path.holds)
        if (!(h > 0.0)) return false;
    return path.times[n] <= path.horizon && path.horizon < path.times[n + 1];
}

void simulate_skeleton(const JumpLaw& jump, const WaitLaw& wait, const EnvSpec* env,
                       double horizon, RandomSource& rng, PathSkeleton& out,
                       const SimulationOptions& options) {
    if (!(horizon > 0.0)) throw DomainError("simulate_skeleton: horizon must be positive");
    out.clear();
    out.horizon = horizon;
    const JumpSampler jumps(jump);
    double position = 0.0, elapsed = 0.0;
    out.positions.push_back(0.0);
    out.times.push_back(0.0);
    for (;;) {
        double hold = sample_wait(wait, rng);
        if (env) {
            const double slowdown = lambda_inv(*env, position);
            if (!(slowdown > 0.0) || !std::isfinite(slowdown)) {
                std::ostringstream os;
                os << "environment intensity is not positive and finite at x=" << position;
                throw SimulationError(os.str());
            }
            hold *= slowdown;
        }
        out.holds.push_back(hold);
        out.times.push_back(elapsed + hold);
        if (elapsed + hold > horizon) break;
        elapsed += hold;
        if (out.n_jumps >= options.jump_cap)
            throw ResourceError("simulate_skeleton: jump count exceeded", options.jump_cap);
        position += jumps(rng);
        out.positions.push_back(position);
        ++out.n_jumps;
    }
    assert(check_bracketing(out));
}

PathSkeleton simulate_skeleton(const JumpLaw& jump, const WaitLaw& wait, const EnvSpec* env,
                               double horizon, RandomSource& rng, const SimulationOptions& options) {
    PathSkeleton path;
    simulate_skeleton(jump, wait, env, horizon, rng, path, options);
    return path;
}

double position_at(const PathSkeleton& path, double s) {
    if (!(s >= 0.0 && s <= path.horizon))
        throw DomainError("position_at: time outside [0, horizon]");
    const auto n = static_cast<std::ptrdiff_t>(path.n_jumps);
    const auto first = path.times.begin() + 1;
    const auto k = std::upper_bound(first, first + n, s) - first;
    return path.positions[static_cast<std::size_t>(k)];
}

FunctionalSpec FunctionalSpec::gaussian_bump() {
    return {"gauss", [](double x) { return std::exp(-x * x); }, std::sqrt(std::numbers::pi), 10.0,
            FunctionalVariant::plain};
}

FunctionalSpec FunctionalSpec::point_indicator(double point) {
    std::ostringstream os;
    os << "indicator_point(" << point << ")";
    return {os.str(), [point](double x) { return x == point ? 1.0 : 0.0; }, 0.0, 0.0,
            FunctionalVariant::plain};
}

FunctionalSpec FunctionalSpec::interval_indicator(double a, double b) {
    if (!(a < b)) throw DomainError("interval indicator needs a < b");
    std::ostringstream os;
    os << "indicator_interval(" << a << ", " << b << ")";
    return {os.str(), [a, b](double x) { return (x >= a && x < b) ? 1.0 : 0.0; }, b - a,
            std::max(std::abs(a), std::abs(b)), FunctionalVariant::plain};
}

FunctionalSpec FunctionalSpec::constant(double value) {
    std::ostringstream os;
    os << "constant(" << value << ")";
    return {os.str(), [value](double) { return value; },
            value == 0.0 ? 0.0 : std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity(), FunctionalVariant::plain};
}

FunctionalSpec FunctionalSpec::divided_by_environment() const {
    FunctionalSpec out = *this;
    out.variant = FunctionalVariant::env_divided;
    return out;
}

std::vector<double> additive_functional(const PathSkeleton& path, const FunctionalSpec& spec,
                                        double t, std::span<const double> u_grid) {
    if (!(t > 0.0)) throw DomainError("additive_functional: t must be positive");
    std::vector<std::size_t> order(u_grid.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return u_grid[a] < u_grid[b]; });
    for (double u : u_grid)
        if (!(u >= 0.0) || t * u > path.horizon)
            throw DomainError("additive_functional: u must satisfy 0 <= t u <= horizon");

    std::vector<double> out(u_grid.size(), 0.0);
    const auto n = static_cast<std::size_t>(path.n_jumps);
    std::size_t k = 0;  // holds[0..k) are complete
    double acc = 0.0;
    for (auto idx : order) {
        const double until = t * u_grid[idx];
        while (k <= n && path.times[k + 1] <= until) {
            acc += path.holds[k] * spec.f(path.positions[k]);
            ++k;
        }
        const double partial = until - path.times[k];
        out[idx] = partial > 0.0 ? acc + partial * spec.f(path.positions[k]) : acc;
    }
    return out;
}

std::vector<double> normalized_functional(const PathSkeleton& path, const FunctionalSpec& spec,
                                          const JumpLaw& law, double t,
                                          std::span<const double> u_grid) {
    auto values = additive_functional(path, spec, t, u_grid);
    const double c = norm_constant(law, t);
    for (double& v : values) v *= c;
    return values;
}

double lattice_limit_constant(const JumpLaw& law, const std::function<double(double)>& f,
                              const LatticeSumOptions& options) {
    const auto* lattice = std::get_if<LatticeJumps>(&law.shape);
    if (!lattice) throw DomainError("lattice_limit_constant: jump law is not a lattice law");
    const double a = lattice->offset_a, b = lattice->span_b;
    auto term = [&](std::int64_t n) { return f(a + b * static_cast<double>(n)); };

    double sum = term(0), abs_sum = std::abs(sum);
    std::int64_t reached = 0;
    for (std::int64_t next = 16;; next *= 2) {
        if (next > options.max_terms) {
            std::ostringstream os;
            os << "lattice sum not Cauchy after " << options.max_terms << " terms per side";
            throw DivergentSumError(os.str());
        }
        double ring = 0.0, ring_abs = 0.0;
        for (std::int64_t m = reached + 1; m <= next; ++m) {
            const double v = term(m) + term(-m);
            ring += v;
            ring_abs += std::abs(term(m)) + std::abs(term(-m));
        }
        sum += ring;
        abs_sum += ring_abs;
        reached = next;
        if (ring_abs <= options.rel_tol * std::max(1.0, abs_sum)) break;
    }
    return b * sum;
}

void write_skeleton(std::ostream& os, const PathSkeleton& path) {
    os << std::setprecision(17);
    os << "# k position hold\n";
    for (std::size_t k = 0; k < path.positions.size(); ++k)
        os << k << ' ' << path.positions[k] << ' ' << path.holds[k] << '\n';
}

}  // namespace ctrw
