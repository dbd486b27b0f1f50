#include "ctrw/levy_local.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ctrw/errors.hpp"
#include "ctrw/stable.hpp"

namespace ctrw {

void simulate_levy(double alpha, double beta, std::int64_t grid_n, double horizon,
                   RandomSource& rng, LevyPath& out) {
    if (grid_n < kMinLevyGrid) throw DomainError("simulate_levy: grid_n must be at least 1000");
    if (!(horizon > 0.0)) throw DomainError("simulate_levy: horizon must be positive");
    out.grid_n = grid_n;
    out.horizon = horizon;
    out.alpha = alpha;
    out.beta = beta;
    const double dt = out.step();
    // Increments with scale c = dt are dt^(1/alpha) times unit-scale draws.
    const StableSampler unit(StableParams{alpha, beta, 1.0, 0.0});
    const double factor = std::pow(dt, 1.0 / alpha);
    out.values.resize(static_cast<std::size_t>(grid_n) + 1);
    out.values[0] = 0.0;
    double z = 0.0;
    if (alpha == 2.0) {
        // Gaussian case: chf exp(-dt x^2) is N(0, 2 dt).
        const double sd = std::sqrt(2.0 * dt);
        for (std::int64_t k = 1; k <= grid_n; ++k) {
            z += sd * rng.normal();
            out.values[static_cast<std::size_t>(k)] = z;
        }
        return;
    }
    for (std::int64_t k = 1; k <= grid_n; ++k) {
        z += factor * unit(rng);
        out.values[static_cast<std::size_t>(k)] = z;
    }
}

LevyPath simulate_levy(double alpha, double beta, std::int64_t grid_n, double horizon,
                       RandomSource& rng) {
    LevyPath path;
    simulate_levy(alpha, beta, grid_n, horizon, rng, path);
    return path;
}

double resolvable_eps(double alpha, double dt) { return std::pow(dt, 1.0 / alpha); }

double default_eps(double alpha, double dt) { return 10.0 * resolvable_eps(alpha, dt); }

std::vector<LocalTimeEstimate> local_time_zero(const LevyPath& path, double eps,
                                               std::span<const double> u_grid) {
    if (!(eps > 0.0)) throw DomainError("local_time_zero: eps must be positive");
    const double dt = path.step();
    const double floor_eps = resolvable_eps(path.alpha, dt);
    if (eps < floor_eps) {
        std::ostringstream os;
        os << "local_time_zero: eps=" << eps << " is below the grid resolution " << floor_eps;
        throw DomainError(os.str());
    }
    const bool warn = eps < 10.0 * floor_eps;

    std::vector<std::size_t> order(u_grid.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return u_grid[a] < u_grid[b]; });

    std::vector<LocalTimeEstimate> out(u_grid.size());
    std::size_t k = 0;
    std::int64_t hits = 0;
    const double weight = dt / (2.0 * eps);
    for (auto idx : order) {
        const double u = u_grid[idx];
        if (!(u >= 0.0) || u > path.horizon * (1.0 + 1e-12))
            throw DomainError("local_time_zero: u outside [0, horizon]");
        // Grid points k dt < u; rounding guards u that sit on the grid.
        const auto end = std::min<std::size_t>(
            static_cast<std::size_t>(std::ceil(u / dt - 1e-9)), path.values.size());
        for (; k < end; ++k)
            if (std::abs(path.values[k]) <= eps) ++hits;
        out[idx] = {u, eps, weight * static_cast<double>(hits), warn};
    }
    return out;
}

LimitConstant plain_limit_constant(double alpha, double mu, double f_integral) {
    LimitConstant c;
    c.mu_factor = std::pow(mu, 1.0 / alpha);
    c.integral = f_integral;
    c.value = c.mu_factor * f_integral;
    return c;
}

LimitConstant delayed_limit_constant(double alpha, double mu, double lambda_bar_inv,
                                     double g_over_lambda_integral) {
    LimitConstant c;
    c.mu_factor = std::pow(mu, 1.0 / alpha);
    c.environment_factor = std::pow(lambda_bar_inv, 1.0 / alpha - 1.0);
    c.integral = g_over_lambda_integral;
    c.value = c.mu_factor * c.environment_factor * c.integral;
    return c;
}

LimitConstant quenched_limit_constant(double alpha, double mu, double shot_noise_constant,
                                      double quenched_integral) {
    LimitConstant c;
    c.mu_factor = std::pow(mu, 1.0 / alpha);
    c.environment_factor = shot_noise_constant;
    c.integral = quenched_integral;
    c.value = c.mu_factor * c.environment_factor * c.integral;
    return c;
}

std::vector<double> sample_limit_rv(double alpha, double beta, const LimitConstant& constant,
                                    std::span<const double> u_grid,
                                    const LocalTimeSettings& settings, RandomSource& rng,
                                    LevyPath* scratch) {
    if (u_grid.empty()) return {};
    if (constant.value == 0.0) return std::vector<double>(u_grid.size(), 0.0);
    const double horizon = *std::max_element(u_grid.begin(), u_grid.end());
    if (!(horizon > 0.0)) return std::vector<double>(u_grid.size(), 0.0);
    const auto grid_n = std::max<std::int64_t>(
        kMinLevyGrid, std::llround(static_cast<double>(settings.grid_per_unit) * horizon));
    LevyPath local;
    LevyPath& path = scratch ? *scratch : local;
    simulate_levy(alpha, beta, grid_n, horizon, rng, path);
    const double eps = settings.eps.value_or(default_eps(alpha, path.step()));
    const auto estimates = local_time_zero(path, eps, u_grid);
    std::vector<double> out(u_grid.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = constant.value * estimates[i].value;
    return out;
}

}  // namespace ctrw
