#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ctrw/random.hpp"

namespace ctrw {

// Stable Levy motion sampled at k * dt, k = 0..grid_n, dt = horizon / grid_n,
// with increments distributed as the stable law (alpha, beta, c = dt, a = 0).
struct LevyPath {
    std::int64_t grid_n = 0;
    double horizon = 0.0;
    double alpha = 2.0;
    double beta = 0.0;
    std::vector<double> values;

    double step() const { return horizon / static_cast<double>(grid_n); }
};

inline constexpr std::int64_t kMinLevyGrid = 1000;

LevyPath simulate_levy(double alpha, double beta, std::int64_t grid_n, double horizon,
                       RandomSource& rng);
// Reuses the value buffer of `out`.
void simulate_levy(double alpha, double beta, std::int64_t grid_n, double horizon,
                   RandomSource& rng, LevyPath& out);

struct LocalTimeEstimate {
    double u = 0.0;
    double eps = 0.0;
    double value = 0.0;
    bool precision_warning = false;
};

// Smallest band half-width the grid resolves: the typical displacement
// dt^(1/alpha) of one grid step.
double resolvable_eps(double alpha, double dt);

// Default band: 10 * resolvable_eps.
double default_eps(double alpha, double dt);

// (2 eps)^-1 * dt * #{k : k dt < u, |Z(k dt)| <= eps} for each u.
// Throws DomainError if eps < resolvable_eps; flags a warning below
// 10 * resolvable_eps.
std::vector<LocalTimeEstimate> local_time_zero(const LevyPath& path, double eps,
                                               std::span<const double> u_grid);

// Scalar constant multiplying the local time in each limit theorem.
struct LimitConstant {
    double value = 0.0;
    double mu_factor = 1.0;           // mu^(1/alpha)
    double environment_factor = 1.0;  // (lambda_bar_inv)^(1/alpha-1) or the shot-noise constant
    double integral = 0.0;            // int f, lattice sum, or quenched int g / Lambda
};

// mu^(1/alpha) * int f.
LimitConstant plain_limit_constant(double alpha, double mu, double f_integral);
// mu^(1/alpha) * lambda_bar_inv^(1/alpha - 1) * int g / Lambda.
LimitConstant delayed_limit_constant(double alpha, double mu, double lambda_bar_inv,
                                     double g_over_lambda_integral);
// mu^(1/alpha) * shot_noise_constant * int g / Lambda(., gamma).
LimitConstant quenched_limit_constant(double alpha, double mu, double shot_noise_constant,
                                      double quenched_integral);

struct LocalTimeSettings {
    std::int64_t grid_per_unit = 100'000;
    std::optional<double> eps;  // default_eps when empty
};

// One draw of (constant * l_alpha(u, 0))_u from a fresh Levy path; the
// path covers [0, max u]. Scratch is reused between calls.
std::vector<double> sample_limit_rv(double alpha, double beta, const LimitConstant& constant,
                                    std::span<const double> u_grid,
                                    const LocalTimeSettings& settings, RandomSource& rng,
                                    LevyPath* scratch = nullptr);

}  // namespace ctrw
