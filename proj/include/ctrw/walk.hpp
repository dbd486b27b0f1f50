#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ctrw/environment.hpp"
#include "ctrw/random.hpp"
#include "ctrw/stable.hpp"

namespace ctrw {

struct ExponentialWait {
    double rate;
};
struct ParetoWait {
    double index;  // > 1
    double x_min;
};
struct GammaWait {
    double shape;
    double scale;
};
struct DeterministicWait {
    double value;
};

// Law of the i.i.d. waiting times theta_k; positive with finite mean.
struct WaitLaw {
    std::variant<ExponentialWait, ParetoWait, GammaWait, DeterministicWait> shape;

    static WaitLaw exponential_mean(double mean);
    static WaitLaw pareto(double index, double x_min);
    static WaitLaw gamma(double shape, double scale);
    static WaitLaw deterministic(double value);

    double mean() const;
    std::string name() const;
};

double sample_wait(const WaitLaw& law, RandomSource& rng);

// Embedded walk S_0 = 0, S_1, ..., S_N with holding times. holds[k] is the
// sojourn at positions[k]; the last hold is the one that straddles the
// horizon, so times[N] <= horizon < times[N + 1].
struct PathSkeleton {
    std::vector<double> positions;  // S_0..S_N
    std::vector<double> holds;      // N + 1 entries
    std::vector<double> times;      // tau_0 = 0 .. tau_{N+1}
    double horizon = 0.0;
    std::int64_t n_jumps = 0;

    void clear();
};

bool check_bracketing(const PathSkeleton& path);

struct SimulationOptions {
    std::int64_t jump_cap = 100'000'000;
};

// The sojourn at S_{k-1} is theta_k / Lambda(S_{k-1}); without an
// environment it is theta_k. Reuses the buffers of `out`.
void simulate_skeleton(const JumpLaw& jump, const WaitLaw& wait, const EnvSpec* env,
                       double horizon, RandomSource& rng, PathSkeleton& out,
                       const SimulationOptions& options = {});

PathSkeleton simulate_skeleton(const JumpLaw& jump, const WaitLaw& wait, const EnvSpec* env,
                               double horizon, RandomSource& rng,
                               const SimulationOptions& options = {});

// X_s: position after the holds completed by time s (right-continuous).
double position_at(const PathSkeleton& path, double s);

enum class FunctionalVariant { plain, env_divided };

// Integrand of the additive functional. For env_divided the time integrand
// is g and the limit involves g / Lambda; `integral` is the Lebesgue
// integral of the integrand itself.
struct FunctionalSpec {
    std::string name;
    std::function<double(double)> f;
    double integral = 0.0;
    double support_radius = 0.0;  // |f| negligible beyond this
    FunctionalVariant variant = FunctionalVariant::plain;

    static FunctionalSpec gaussian_bump();
    static FunctionalSpec point_indicator(double point = 0.0);
    static FunctionalSpec interval_indicator(double a, double b);
    static FunctionalSpec constant(double value);

    FunctionalSpec divided_by_environment() const;
};

// Exact int_0^{t u} f(X_s) ds for each u, from the holding-time
// decomposition. Requires 0 <= u and t * max(u) <= path.horizon.
std::vector<double> additive_functional(const PathSkeleton& path, const FunctionalSpec& spec,
                                        double t, std::span<const double> u_grid);

// c_t times the additive functional, c_t = sigma t^(1/alpha - 1).
std::vector<double> normalized_functional(const PathSkeleton& path, const FunctionalSpec& spec,
                                          const JumpLaw& law, double t,
                                          std::span<const double> u_grid);

struct LatticeSumOptions {
    double rel_tol = 1e-12;
    std::int64_t max_terms = 10'000'000;
};

// span_b * sum_n f(offset_a + span_b n) for a lattice jump law. Throws
// DivergentSumError when the partial sums do not settle.
double lattice_limit_constant(const JumpLaw& law, const std::function<double(double)>& f,
                              const LatticeSumOptions& options = {});

// One line per visited location: k, S_k, sojourn at S_k.
void write_skeleton(std::ostream& os, const PathSkeleton& path);

inline const std::vector<double> kDefaultUGrid{0.25, 0.5, 0.75, 1.0};

}  // namespace ctrw
