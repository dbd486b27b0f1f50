#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ctrw/quadrature.hpp"
#include "ctrw/random.hpp"

namespace ctrw {

// Nonnegative shot-noise kernel phi with 0 <= phi(x) <= C / (1 + |x|^(1+beta)).
struct Kernel {
    std::string name;
    std::function<double(double)> phi;
    double amplitude = 1.0;
    double bound_c = 1.0;
    double decay_beta = 1.0;
    double cutoff_r = 1.0;
    bool compact = false;             // phi vanishes outside [-cutoff_r, cutoff_r]
    std::vector<double> kinks;        // offsets where phi is not smooth

    // A / (1 + |x|^(1+beta)); cutoff chosen so the tail bound is below tail_tol.
    static Kernel power_law(double amplitude, double decay_beta, double tail_tol = 1e-6);
    // A * max(0, 1 - |x|)^2.
    static Kernel compact_bump(double amplitude);

    // Bound on the expected truncated mass 2 C R^-beta / beta per unit
    // intensity; zero for compact kernels.
    double tail_bound() const;

    // Checks 0 <= phi <= C / (1 + |x|^(1+beta)) on a grid; throws DomainError.
    void check_decay_bound(double radius = 100.0, int points = 20001) const;
};

// Homogeneous unit-intensity Poisson points restricted to [lo, hi].
struct PoissonConfig {
    std::vector<double> points;  // sorted
    double lo = 0.0;
    double hi = 0.0;

    std::size_t count_in(double a, double b) const;
};

PoissonConfig sample_config(double lo, double hi, RandomSource& rng);

// Text format: "# window <lo> <hi>" header, then one coordinate per line
// with 17 significant digits.
void write_config(std::ostream& os, const PoissonConfig& config);
PoissonConfig read_config(std::istream& is);
void save_config(const std::string& path, const PoissonConfig& config);
PoissonConfig load_config(const std::string& path);

// Deterministic jump intensity Lambda(x) with known Cesaro mean of 1/Lambda.
struct DeterministicEnv {
    std::string name;
    std::function<double(double)> lambda;
    double lambda_bar_inv = 1.0;
    double period = 0.0;  // > 0 places quadrature panel edges on whole periods

    static DeterministicEnv constant(double value);
    // 1 / Lambda(x) = mean + amplitude * sin(2 pi x); requires mean > |amplitude|.
    static DeterministicEnv periodic_inverse(double mean, double amplitude);
};

// Lambda(x) = exp(-sum_y phi(x - y)) over a fixed configuration.
struct ShotNoiseEnv {
    Kernel kernel;
    std::shared_ptr<const PoissonConfig> config;
};

using EnvSpec = std::variant<DeterministicEnv, ShotNoiseEnv>;

// Sum of phi(x - y) over points with |x - y| <= cutoff_r. Throws
// BoundaryError when [x - R, x + R] leaves the sampled window.
double potential(const ShotNoiseEnv& env, double x);

// 1 / Lambda(x).
double lambda_inv(const EnvSpec& env, double x);
double lambda(const EnvSpec& env, double x);

// Cesaro mean of 1 / Lambda: analytic for deterministic environments,
// exp{ int (e^phi - 1) } for shot noise.
double lambda_bar_inv(const EnvSpec& env);

// int (e^(a phi(y)) - 1) dy.
Integral exponent_integral(const Kernel& kernel, double a);

// E[Lambda(x)^-a] = exp{ int (e^(a phi) - 1) dy }; error is absolute.
Integral mean_lambda_inv_analytic(const Kernel& kernel, double a);

// exp{ (1/alpha - 1) int (e^phi - 1) dy }, alpha in (1,2).
double theorem5_constant(const Kernel& kernel, double alpha);

// int_{-radius}^{radius} g(x) / Lambda(x) dx with panel edges on the kinks of
// the environment.
Integral weighted_integral(const std::function<double(double)>& g, const EnvSpec& env,
                           double radius);

// sup_{|x| <= t^r} | (1/t) int_x^{x+t} Lambda^-1 - lambda_bar_inv | on the
// x-grid of spacing grid_step, for every t in t_list (each t must be a
// multiple of grid_step). One cumulative integral serves all horizons.
std::vector<double> cesaro_errors(const EnvSpec& env, const std::vector<double>& t_list,
                                  double r, double grid_step);
double cesaro_error(const EnvSpec& env, double t, double r, double grid_step);

// (n, sup_{|x| <= n} Lambda^-1) on a grid of spacing grid_step, plus the
// configuration points themselves for shot noise.
std::vector<std::pair<double, double>> sup_growth_check(const EnvSpec& env,
                                                        const std::vector<double>& n_list,
                                                        double grid_step = 0.01);

// Half-width of the window a walk over horizon t is expected to stay inside:
// t^(1/alpha) times a 10^3 safety factor, plus the kernel cutoff.
double walk_window_half_width(double t, double alpha, const Kernel& kernel);

}  // namespace ctrw
