#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ctrw/random.hpp"

namespace ctrw {

// Stable law with characteristic function
//   exp{ i a x - c |x|^alpha (1 + i beta sign(x) tan(pi alpha / 2)) }.
// Note the "+ i beta" sign: beta = -1 is the totally right-skewed law.
struct StableParams {
    double alpha = 2.0;
    double beta = 0.0;
    double scale_c = 1.0;
    double location_a = 0.0;
};

// Throws DomainError unless alpha in (1,2], beta in [-1,1], scale_c > 0.
void validate(const StableParams& p);

// tan(pi alpha / 2), exactly zero at alpha = 2.
double stable_tan(double alpha);

std::complex<double> stable_chf(const StableParams& p, double x);

// Chambers-Mallows-Stuck transformation of a uniform angle and a unit
// exponential. Constants are precomputed once per parameter set.
class StableSampler {
public:
    explicit StableSampler(const StableParams& p);

    double operator()(RandomSource& rng) const;

    // Deterministic transform of (angle in (-pi/2, pi/2), exponential > 0).
    double transform(double angle, double expo) const;

    const StableParams& params() const noexcept { return params_; }

private:
    StableParams params_;
    double skew_shift_;   // B = atan(beta_st tan(pi a / 2)) / a
    double skew_scale_;   // (1 + beta_st^2 tan^2)^(1 / (2a))
    double inv_alpha_;
    double tail_power_;   // (1 - a) / a
    double scale_;        // c^(1/a)
};

double sample_stable(const StableParams& p, RandomSource& rng);

// Jump-size laws. All are centered by construction.
struct SymmetricPareto {
    double alpha;
    double x_min = 1.0;
};

// Right tail carries mass p_right; shifted by its mean to be centered.
struct SkewedPareto {
    double alpha;
    double x_min = 1.0;
    double p_right = 0.5;
};

struct GaussianJumps {
    double variance;
};

// Values offset_a + span_b * n with probability weights[n]; offset_a already
// includes the centering shift.
struct LatticeJumps {
    double offset_a = 0.0;
    double span_b = 1.0;
    std::vector<std::pair<long, double>> weights;
};

// Uniform draw from a centered table.
struct EmpiricalJumps {
    std::vector<double> values;
};

using JumpShape =
    std::variant<SymmetricPareto, SkewedPareto, GaussianJumps, LatticeJumps, EmpiricalJumps>;

// A jump law with its domain-of-attraction metadata: partial sums
// S_n / (sigma_attr n^(1/alpha_attr)) approach the stable law with
// scale_c = 1 and skewness beta_attr.
struct JumpLaw {
    JumpShape shape;
    double alpha_attr = 2.0;
    double sigma_attr = 1.0;
    double beta_attr = 0.0;
    // Optional slowly varying normalizer L(t); sigma_attr is used when empty.
    std::function<double(double)> slowly_varying;

    static JumpLaw symmetric_pareto(double alpha, double x_min = 1.0);
    static JumpLaw skewed_pareto(double alpha, double x_min, double p_right);
    static JumpLaw gaussian(double variance);
    // Weights need not be centered; the offset is shifted to zero mean.
    static JumpLaw lattice(double offset_a, double span_b,
                           std::vector<std::pair<long, double>> weights);
    static JumpLaw empirical(std::vector<double> values);

    std::string name() const;
    bool is_symmetric() const;
};

double sample_jump(const JumpLaw& law, RandomSource& rng);

// Batch sampler that caches per-law constants.
class JumpSampler {
public:
    explicit JumpSampler(const JumpLaw& law);
    double operator()(RandomSource& rng) const;

private:
    const JumpLaw* law_;
    double inv_alpha_ = 0.0;
    double shift_ = 0.0;
    double p_right_ = 0.5;
    double std_dev_ = 0.0;
    std::vector<double> cumulative_;
    std::vector<double> lattice_values_;
};

// c_t = L(t) t^(1/alpha - 1).
double norm_constant(const JumpLaw& law, double t);

// Attraction scale implied by the tails of the law (closed form where one
// exists). Used as a cross-check on calibrate_sigma.
double analytic_sigma(const JumpLaw& law);

struct Calibration {
    double sigma = 0.0;
    double beta = 0.0;
    double ks_distance = 1.0;
};

struct CalibrationOptions {
    std::uint64_t seed = 1;
    unsigned workers = 1;
    double max_ks = 0.05;
};

// Fits sigma (and beta, for asymmetric laws) so that S_n / (sigma n^(1/alpha))
// matches the unit stable law in Kolmogorov-Smirnov distance. Throws
// CalibrationError if the best distance exceeds options.max_ks.
Calibration calibrate_sigma(const JumpLaw& law, std::int64_t n, std::int64_t replicates,
                            const CalibrationOptions& options);

}  // namespace ctrw
