#include "ctrw/stable.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "ctrw/errors.hpp"
#include "ctrw/parallel.hpp"
#include "ctrw/statistics.hpp"

namespace ctrw {

namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_pareto_alpha(double alpha) {
    if (!(alpha > 1.0 && alpha < 2.0))
        throw DomainError("Pareto jump law needs tail index in (1,2)");
}

// sigma^alpha = (C+ + C-) Gamma(1 - alpha) cos(pi alpha / 2) for tails
// P(|xi| > x) ~ (C+ + C-) x^-alpha.
double pareto_sigma(double alpha, double x_min) {
    const double tail_mass = std::pow(x_min, alpha);
    const double c = tail_mass * std::tgamma(1.0 - alpha) * std::cos(kPi * alpha / 2.0);
    return std::pow(c, 1.0 / alpha);
}

double lattice_mean(double a, double b, const std::vector<std::pair<long, double>>& w) {
    double m = 0.0;
    for (const auto& [n, p] : w) m += p * (a + b * static_cast<double>(n));
    return m;
}

double lattice_variance(const LatticeJumps& l) {
    double v = 0.0;
    for (const auto& [n, p] : l.weights) {
        const double x = l.offset_a + l.span_b * static_cast<double>(n);
        v += p * x * x;
    }
    return v;
}

}  // namespace

void validate(const StableParams& p) {
    if (!(p.alpha > 1.0 && p.alpha <= 2.0)) throw DomainError("stable: alpha must lie in (1,2]");
    if (!(p.beta >= -1.0 && p.beta <= 1.0)) throw DomainError("stable: beta must lie in [-1,1]");
    if (!(p.scale_c > 0.0)) throw DomainError("stable: scale_c must be positive");
    if (!std::isfinite(p.location_a)) throw DomainError("stable: location must be finite");
}

double stable_tan(double alpha) {
    if (alpha == 2.0) return 0.0;
    return std::tan(kPi * alpha / 2.0);
}

std::complex<double> stable_chf(const StableParams& p, double x) {
    validate(p);
    if (x == 0.0) return {1.0, 0.0};
    const double sign = x > 0.0 ? 1.0 : -1.0;
    const double mag = p.scale_c * std::pow(std::abs(x), p.alpha);
    const std::complex<double> omega(1.0, p.beta * sign * stable_tan(p.alpha));
    return std::exp(std::complex<double>(0.0, p.location_a * x) - mag * omega);
}

StableSampler::StableSampler(const StableParams& p) : params_(p) {
    validate(p);
    // The textbook CMS formula targets exp{-|x|^a (1 - i b sign x tan)}, so
    // the skewness enters with the opposite sign.
    const double beta_st = -p.beta;
    const double tan_term = stable_tan(p.alpha);
    skew_shift_ = std::atan(beta_st * tan_term) / p.alpha;
    skew_scale_ = std::pow(1.0 + beta_st * beta_st * tan_term * tan_term, 1.0 / (2.0 * p.alpha));
    inv_alpha_ = 1.0 / p.alpha;
    tail_power_ = (1.0 - p.alpha) / p.alpha;
    scale_ = std::pow(p.scale_c, inv_alpha_);
}

double StableSampler::transform(double angle, double expo) const {
    const double a = params_.alpha;
    const double shifted = a * (angle + skew_shift_);
    const double x = skew_scale_ * std::sin(shifted) / std::pow(std::cos(angle), inv_alpha_) *
                     std::pow(std::cos(angle - shifted) / expo, tail_power_);
    return scale_ * x + params_.location_a;
}

double StableSampler::operator()(RandomSource& rng) const {
    const double angle = kPi * (rng.uniform() - 0.5);
    const double expo = rng.exponential();
    return transform(angle, expo);
}

double sample_stable(const StableParams& p, RandomSource& rng) {
    return StableSampler(p)(rng);
}

JumpLaw JumpLaw::symmetric_pareto(double alpha, double x_min) {
    check_pareto_alpha(alpha);
    if (!(x_min > 0.0)) throw DomainError("Pareto jump law needs x_min > 0");
    JumpLaw law;
    law.shape = SymmetricPareto{alpha, x_min};
    law.alpha_attr = alpha;
    law.sigma_attr = pareto_sigma(alpha, x_min);
    law.beta_attr = 0.0;
    return law;
}

JumpLaw JumpLaw::skewed_pareto(double alpha, double x_min, double p_right) {
    check_pareto_alpha(alpha);
    if (!(x_min > 0.0)) throw DomainError("Pareto jump law needs x_min > 0");
    if (!(p_right >= 0.0 && p_right <= 1.0)) throw DomainError("p_right must lie in [0,1]");
    JumpLaw law;
    law.shape = SkewedPareto{alpha, x_min, p_right};
    law.alpha_attr = alpha;
    law.sigma_attr = pareto_sigma(alpha, x_min);
    law.beta_attr = 1.0 - 2.0 * p_right;
    return law;
}

JumpLaw JumpLaw::gaussian(double variance) {
    if (!(variance > 0.0)) throw DomainError("Gaussian jump law needs positive variance");
    JumpLaw law;
    law.shape = GaussianJumps{variance};
    law.alpha_attr = 2.0;
    law.sigma_attr = std::sqrt(variance / 2.0);
    return law;
}

JumpLaw JumpLaw::lattice(double offset_a, double span_b,
                         std::vector<std::pair<long, double>> weights) {
    if (!(span_b > 0.0)) throw DomainError("lattice span must be positive");
    if (weights.empty()) throw DomainError("lattice weight table is empty");
    double total = 0.0;
    for (const auto& [n, p] : weights) {
        if (!(p >= 0.0)) throw DomainError("lattice weights must be nonnegative");
        total += p;
    }
    if (!(total > 0.0)) throw DomainError("lattice weights sum to zero");
    for (auto& entry : weights) entry.second /= total;
    std::sort(weights.begin(), weights.end());
    const double shift = lattice_mean(offset_a, span_b, weights);
    LatticeJumps l{offset_a - shift, span_b, std::move(weights)};
    const double var = lattice_variance(l);
    if (!(var > 0.0)) throw DomainError("lattice law is degenerate");
    JumpLaw law;
    law.shape = std::move(l);
    law.alpha_attr = 2.0;
    law.sigma_attr = std::sqrt(var / 2.0);
    return law;
}

JumpLaw JumpLaw::empirical(std::vector<double> values) {
    if (values.size() < 2) throw DomainError("empirical jump table needs at least two values");
    const double m = mean(values);
    for (double& v : values) v -= m;
    const double var = std::inner_product(values.begin(), values.end(), values.begin(), 0.0) /
                       static_cast<double>(values.size());
    if (!(var > 0.0)) throw DomainError("empirical jump table is degenerate");
    JumpLaw law;
    law.shape = EmpiricalJumps{std::move(values)};
    law.alpha_attr = 2.0;
    law.sigma_attr = std::sqrt(var / 2.0);
    return law;
}

std::string JumpLaw::name() const {
    std::ostringstream os;
    os.precision(17);
    std::visit(overloaded{
                   [&](const SymmetricPareto& s) {
                       os << "symmetric_pareto(alpha=" << s.alpha << ", x_min=" << s.x_min << ")";
                   },
                   [&](const SkewedPareto& s) {
                       os << "skewed_pareto(alpha=" << s.alpha << ", x_min=" << s.x_min
                          << ", p_right=" << s.p_right << ")";
                   },
                   [&](const GaussianJumps& g) { os << "gaussian(variance=" << g.variance << ")"; },
                   [&](const LatticeJumps& l) {
                       os << "lattice(a=" << l.offset_a << ", b=" << l.span_b << ", support="
                          << l.weights.size() << ")";
                   },
                   [&](const EmpiricalJumps& e) { os << "empirical(n=" << e.values.size() << ")"; },
               },
               shape);
    return os.str();
}

bool JumpLaw::is_symmetric() const {
    return std::visit(overloaded{
                          [](const SymmetricPareto&) { return true; },
                          [](const SkewedPareto& s) { return s.p_right == 0.5; },
                          [](const GaussianJumps&) { return true; },
                          [](const LatticeJumps& l) {
                              auto sorted = l.weights;
                              for (const auto& [n, p] : l.weights) {
                                  // value at n mirrors to -value.
                                  const double mirror = -(l.offset_a + l.span_b * n);
                                  const double k = (mirror - l.offset_a) / l.span_b;
                                  const long kn = std::lround(k);
                                  if (std::abs(k - kn) > 1e-9) return false;
                                  auto it = std::find_if(sorted.begin(), sorted.end(),
                                                         [&](const auto& e) { return e.first == kn; });
                                  if (it == sorted.end() || std::abs(it->second - p) > 1e-12)
                                      return false;
                              }
                              return true;
                          },
                          [](const EmpiricalJumps& e) {
                              auto v = e.values;
                              std::sort(v.begin(), v.end());
                              for (std::size_t i = 0; i < v.size(); ++i)
                                  if (std::abs(v[i] + v[v.size() - 1 - i]) > 1e-12) return false;
                              return true;
                          },
                      },
                      shape);
}

JumpSampler::JumpSampler(const JumpLaw& law) : law_(&law) {
    std::visit(overloaded{
                   [&](const SymmetricPareto& s) { inv_alpha_ = 1.0 / s.alpha; },
                   [&](const SkewedPareto& s) {
                       inv_alpha_ = 1.0 / s.alpha;
                       p_right_ = s.p_right;
                       shift_ = -s.x_min * s.alpha / (s.alpha - 1.0) * (2.0 * s.p_right - 1.0);
                   },
                   [&](const GaussianJumps& g) { std_dev_ = std::sqrt(g.variance); },
                   [&](const LatticeJumps& l) {
                       double acc = 0.0;
                       for (const auto& [n, p] : l.weights) {
                           acc += p;
                           cumulative_.push_back(acc);
                           lattice_values_.push_back(l.offset_a + l.span_b * static_cast<double>(n));
                       }
                       cumulative_.back() = 1.0;
                   },
                   [&](const EmpiricalJumps&) {},
               },
               law.shape);
}

double JumpSampler::operator()(RandomSource& rng) const {
    return std::visit(
        overloaded{
            [&](const SymmetricPareto& s) {
                const double mag = s.x_min * std::pow(rng.uniform(), -inv_alpha_);
                return rng.uniform() < 0.5 ? -mag : mag;
            },
            [&](const SkewedPareto& s) {
                const double mag = s.x_min * std::pow(rng.uniform(), -inv_alpha_);
                return (rng.uniform() < p_right_ ? mag : -mag) + shift_;
            },
            [&](const GaussianJumps&) { return std_dev_ * rng.normal(); },
            [&](const LatticeJumps&) {
                const double u = rng.uniform();
                const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
                return lattice_values_[static_cast<std::size_t>(it - cumulative_.begin())];
            },
            [&](const EmpiricalJumps& e) { return e.values[rng.index(e.values.size())]; },
        },
        law_->shape);
}

double sample_jump(const JumpLaw& law, RandomSource& rng) { return JumpSampler(law)(rng); }

double norm_constant(const JumpLaw& law, double t) {
    if (!(t > 0.0)) throw DomainError("norm_constant: t must be positive");
    const double level = law.slowly_varying ? law.slowly_varying(t) : law.sigma_attr;
    return level * std::pow(t, 1.0 / law.alpha_attr - 1.0);
}

double analytic_sigma(const JumpLaw& law) {
    return std::visit(overloaded{
                          [](const SymmetricPareto& s) { return pareto_sigma(s.alpha, s.x_min); },
                          [](const SkewedPareto& s) { return pareto_sigma(s.alpha, s.x_min); },
                          [](const GaussianJumps& g) { return std::sqrt(g.variance / 2.0); },
                          [](const LatticeJumps& l) { return std::sqrt(lattice_variance(l) / 2.0); },
                          [](const EmpiricalJumps& e) {
                              double v = 0.0;
                              for (double x : e.values) v += x * x;
                              return std::sqrt(v / static_cast<double>(e.values.size()) / 2.0);
                          },
                      },
                      law.shape);
}

namespace {

// KS distance between sorted a and sigma * sorted b without materializing
// the scaled copy.
double ks_scaled(const std::vector<double>& a, const std::vector<double>& b, double sigma) {
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], sigma * b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && sigma * b[j] == x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

struct ScaleFit {
    double sigma;
    double ks;
};

// Minimizes KS over a log-spaced grid and returns the centre of the
// minimizing plateau; the statistic is piecewise constant in sigma.
ScaleFit fit_scale_on_grid(const std::vector<double>& a, const std::vector<double>& b,
                           double centre, double half_width_log, int points) {
    std::vector<double> grid(static_cast<std::size_t>(points));
    std::vector<double> ks(grid.size());
    for (int k = 0; k < points; ++k) {
        const double s = -half_width_log + 2.0 * half_width_log * k / (points - 1);
        grid[static_cast<std::size_t>(k)] = centre * std::exp(s);
        ks[static_cast<std::size_t>(k)] = ks_scaled(a, b, grid[static_cast<std::size_t>(k)]);
    }
    const auto best = static_cast<std::size_t>(std::min_element(ks.begin(), ks.end()) - ks.begin());
    std::size_t lo = best, hi = best;
    while (lo > 0 && ks[lo - 1] == ks[best]) --lo;
    while (hi + 1 < ks.size() && ks[hi + 1] == ks[best]) ++hi;
    return {std::sqrt(grid[lo] * grid[hi]), ks[best]};
}

ScaleFit fit_scale(const std::vector<double>& a, const std::vector<double>& b) {
    const double iqr_a = quantile_sorted(a, 0.75) - quantile_sorted(a, 0.25);
    const double iqr_b = quantile_sorted(b, 0.75) - quantile_sorted(b, 0.25);
    if (!(iqr_a > 0.0 && iqr_b > 0.0)) return {1.0, 1.0};
    const auto coarse = fit_scale_on_grid(a, b, iqr_a / iqr_b, 0.4, 161);
    return fit_scale_on_grid(a, b, coarse.sigma, 0.01, 201);
}

}  // namespace

Calibration calibrate_sigma(const JumpLaw& law, std::int64_t n, std::int64_t replicates,
                            const CalibrationOptions& options) {
    if (n < 1 || replicates < 10) throw DomainError("calibrate_sigma: need n >= 1, M >= 10");
    const double alpha = law.alpha_attr;
    if (!(alpha > 1.0 && alpha <= 2.0)) throw DomainError("calibrate_sigma: alpha_attr outside (1,2]");
    const auto m = static_cast<std::size_t>(replicates);
    const double norm = std::pow(static_cast<double>(n), 1.0 / alpha);

    std::vector<double> sums(m);
    const JumpSampler jumps(law);
    parallel_for(m, options.workers, [&](std::size_t k) {
        RandomSource rng(derive_seed(options.seed, streams::calibration, k));
        double s = 0.0;
        for (std::int64_t i = 0; i < n; ++i) s += jumps(rng);
        sums[k] = s / norm;
    });
    std::sort(sums.begin(), sums.end());

    // Common random numbers for the reference ensemble across beta values.
    std::vector<double> angles(m), expos(m);
    {
        RandomSource rng(derive_seed(options.seed, streams::calibration_reference, 0));
        for (std::size_t k = 0; k < m; ++k) {
            angles[k] = kPi * (rng.uniform() - 0.5);
            expos[k] = rng.exponential();
        }
    }
    auto reference = [&](double beta) {
        const StableSampler sampler(StableParams{alpha, beta, 1.0, 0.0});
        std::vector<double> ref(m);
        for (std::size_t k = 0; k < m; ++k) ref[k] = sampler.transform(angles[k], expos[k]);
        std::sort(ref.begin(), ref.end());
        return ref;
    };

    Calibration best;
    auto consider = [&](double beta) {
        const auto fit = fit_scale(sums, reference(beta));
        if (fit.ks < best.ks_distance) best = {fit.sigma, beta, fit.ks};
    };

    if (law.is_symmetric() || alpha == 2.0) {
        consider(0.0);
    } else {
        for (int k = -10; k <= 10; ++k) consider(k / 10.0);
        const double centre = best.beta;
        for (int k = -5; k <= 5; ++k) {
            const double beta = std::clamp(centre + k * 0.02, -1.0, 1.0);
            if (beta != centre) consider(beta);
        }
    }
    if (best.ks_distance > options.max_ks) {
        std::ostringstream os;
        os << "calibrate_sigma: no scale fits " << law.name() << " (best KS " << best.ks_distance
           << " > " << options.max_ks << ")";
        throw CalibrationError(os.str(), best.ks_distance);
    }
    return best;
}

}  // namespace ctrw
