#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "ctrw/environment.hpp"
#include "ctrw/errors.hpp"
#include "ctrw/random.hpp"
#include "ctrw/statistics.hpp"

using namespace ctrw;

namespace {

// phi(x) = ln2 * max(0, 1 - |x|); int (e^phi - 1) = 2 (1/ln2 - 1) in closed form.
Kernel tent_kernel() {
    Kernel k;
    k.name = "tent";
    k.phi = [](double x) { return std::numbers::ln2 * std::max(0.0, 1.0 - std::abs(x)); };
    k.amplitude = std::numbers::ln2;
    k.bound_c = 2.0 * std::numbers::ln2;
    k.decay_beta = 1.0;
    k.cutoff_r = 1.0;
    k.compact = true;
    k.kinks = {-1.0, 0.0, 1.0};
    return k;
}

Kernel zero_kernel() {
    Kernel k = tent_kernel();
    k.name = "zero";
    k.phi = [](double) { return 0.0; };
    return k;
}

std::shared_ptr<const PoissonConfig> fixed_config(std::vector<double> pts, double lo, double hi) {
    auto c = std::make_shared<PoissonConfig>();
    c->points = std::move(pts);
    c->lo = lo;
    c->hi = hi;
    return c;
}

std::shared_ptr<const PoissonConfig> sampled(double lo, double hi, std::uint64_t seed) {
    RandomSource rng(seed);
    return std::make_shared<const PoissonConfig>(sample_config(lo, hi, rng));
}

}  // namespace

TEST_CASE("kernels satisfy their decay bound") {
    CHECK_NOTHROW(Kernel::power_law(1.0, 3.0).check_decay_bound());
    CHECK_NOTHROW(Kernel::compact_bump(1.0).check_decay_bound());
    CHECK(Kernel::power_law(1.0, 3.0).tail_bound() < 1e-6 * 1.0001);
    CHECK(Kernel::compact_bump(1.0).tail_bound() == 0.0);
    CHECK_THROWS_AS(Kernel::power_law(1.0, 0.0), DomainError);
}

TEST_CASE("poisson configurations") {
    RandomSource rng(1);
    CHECK(sample_config(0.0, 0.0, rng).points.empty());
    for (std::uint64_t s = 0; s < 20; ++s) {
        RandomSource r(derive_seed(5, 0, s));
        const auto c = sample_config(0.0, 1000.0, r);
        CHECK(std::abs(static_cast<double>(c.points.size()) - 1000.0) <= 100.0);
        CHECK(std::is_sorted(c.points.begin(), c.points.end()));
        CHECK(c.points.front() >= 0.0);
        CHECK(c.points.back() <= 1000.0);
    }
}

TEST_CASE("counts on disjoint halves are uncorrelated") {
    std::vector<double> left, right;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        RandomSource r(derive_seed(6, 0, s));
        const auto c = sample_config(0.0, 2e4, r);
        left.push_back(static_cast<double>(c.count_in(0.0, 1e4)));
        right.push_back(static_cast<double>(c.count_in(1e4, 2e4)));
    }
    const double ml = mean(left), mr = mean(right);
    double cov = 0.0;
    for (std::size_t i = 0; i < left.size(); ++i) cov += (left[i] - ml) * (right[i] - mr);
    cov /= static_cast<double>(left.size() - 1);
    const double corr = cov / std::sqrt(variance(left) * variance(right));
    CHECK(std::abs(corr) < 0.05);
    CHECK(ml == doctest::Approx(1e4).epsilon(0.01));
    CHECK(variance(left) == doctest::Approx(1e4).epsilon(0.15));
}

TEST_CASE("config save and load round-trips exactly") {
    const auto c = sampled(-50.0, 50.0, 3);
    std::stringstream ss;
    write_config(ss, *c);
    const auto back = read_config(ss);
    CHECK(back.lo == c->lo);
    CHECK(back.hi == c->hi);
    CHECK(back.points == c->points);
}

TEST_CASE("potential worked values") {
    const ShotNoiseEnv empty{Kernel::compact_bump(1.0), fixed_config({}, -10.0, 10.0)};
    CHECK(potential(empty, 0.0) == 0.0);
    CHECK(lambda(EnvSpec{empty}, 0.0) == 1.0);
    CHECK(lambda_inv(EnvSpec{empty}, 3.0) == 1.0);

    // phi = 1/(1+x^2): the power-law family with amplitude 1 and decay 1.
    const auto k = Kernel::power_law(1.0, 1.0);
    const double w = 2.0 * k.cutoff_r + 10.0;
    const ShotNoiseEnv single{k, fixed_config({0.0}, -w, w)};
    CHECK(potential(single, 1.0) == doctest::Approx(0.5));

    const ShotNoiseEnv ln2{Kernel::compact_bump(std::numbers::ln2), fixed_config({0.0}, -5.0, 5.0)};
    CHECK(lambda_inv(EnvSpec{ln2}, 0.0) == doctest::Approx(2.0));
}

TEST_CASE("cut-off potential matches the full sum within the tail bound") {
    const auto k = Kernel::power_law(1.0, 3.0);
    const auto config = sampled(-600.0, 600.0, 9);
    const ShotNoiseEnv env{k, config};
    for (double x : {-400.0, -3.3, 0.0, 17.5, 400.0}) {
        double full = 0.0;
        for (double y : config->points) full += k.phi(x - y);
        CHECK(std::abs(full - potential(env, x)) <= k.tail_bound());
    }
}

TEST_CASE("queries leaving the window are hard errors") {
    const ShotNoiseEnv env{Kernel::compact_bump(1.0), sampled(-10.0, 10.0, 2)};
    CHECK_NOTHROW(potential(env, 8.9));
    CHECK_THROWS_AS(potential(env, 9.5), BoundaryError);
    CHECK_THROWS_AS(lambda_inv(EnvSpec{env}, -9.5), BoundaryError);
}

TEST_CASE("reciprocal identity and lower bound") {
    const EnvSpec env = ShotNoiseEnv{Kernel::power_law(1.0, 3.0), sampled(-300.0, 300.0, 4)};
    for (double x = -150.0; x <= 150.0; x += 7.3) {
        CHECK(lambda_inv(env, x) * lambda(env, x) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(lambda_inv(env, x) >= 1.0);
    }
}

TEST_CASE("exponential moment: trivial cases") {
    CHECK(mean_lambda_inv_analytic(Kernel::compact_bump(1.0), 0.0).value == 1.0);
    CHECK(mean_lambda_inv_analytic(zero_kernel(), 1.0).value == 1.0);
    CHECK(theorem5_constant(zero_kernel(), 1.5) == 1.0);
    CHECK_THROWS_AS(theorem5_constant(Kernel::compact_bump(1.0), 1.0), DomainError);
    CHECK_THROWS_AS(theorem5_constant(Kernel::compact_bump(1.0), 2.0), DomainError);
}

TEST_CASE("exponential moment: tent kernel closed form and monte carlo") {
    const double exact = 2.0 * (1.0 / std::numbers::ln2 - 1.0);
    const auto k = tent_kernel();
    const auto m = mean_lambda_inv_analytic(k, 1.0);
    CHECK(exponent_integral(k, 1.0).value == doctest::Approx(exact).epsilon(1e-10));
    CHECK(m.value == doctest::Approx(std::exp(exact)).epsilon(1e-10));
    CHECK(m.error <= 1e-8 * m.value);
    CHECK(theorem5_constant(k, 1.5) == doctest::Approx(std::exp(-exact / 3.0)).epsilon(1e-10));

    std::vector<double> draws;
    for (std::uint64_t s = 0; s < 10000; ++s) {
        const ShotNoiseEnv env{k, sampled(-2.0, 2.0, derive_seed(8, 0, s))};
        draws.push_back(std::exp(potential(env, 0.0)));
    }
    const double se = std::sqrt(variance(draws) / static_cast<double>(draws.size()));
    CHECK(std::abs(mean(draws) - m.value) < 3.0 * se);
    CHECK(std::abs(mean(draws) - m.value) < 0.01 * m.value);
}

TEST_CASE("translation stationarity of the environment law") {
    const auto k = Kernel::compact_bump(1.0);
    std::vector<double> at0, at37;
    for (std::uint64_t s = 0; s < 10000; ++s) {
        const EnvSpec env = ShotNoiseEnv{k, sampled(-3.0, 40.0, derive_seed(10, 0, s))};
        at0.push_back(lambda_inv(env, 0.0));
        at37.push_back(lambda_inv(env, 37.2));
    }
    const double se = std::sqrt((variance(at0) + variance(at37)) / 10000.0);
    CHECK(std::abs(mean(at0) - mean(at37)) < 3.0 * se);
}

TEST_CASE("power kernel moment over infinite range") {
    // Power-law tail integrated to infinity; compared with truncated quadrature.
    const auto k = Kernel::power_law(1.0, 3.0);
    const auto full = exponent_integral(k, 1.0);
    const std::vector<double> kink{0.0};
    const auto inner = integrate_pieces([&](double y) { return std::expm1(k.phi(y)); }, -1e4, 1e4, kink, 1e-9);
    CHECK(full.value == doctest::Approx(inner.value).epsilon(1e-6));
}

TEST_CASE("weighted integral matches brute force") {
    const auto config = sampled(-30.0, 30.0, 12);
    const EnvSpec env = ShotNoiseEnv{Kernel::compact_bump(1.0), config};
    const auto g = [](double x) { return std::exp(-x * x); };
    const auto got = weighted_integral(g, env, 10.0);
    double brute = 0.0;
    const double h = 1e-5;
    for (double x = -10.0 + h / 2; x < 10.0; x += h) brute += g(x) * lambda_inv(env, x) * h;
    CHECK(got.value == doctest::Approx(brute).epsilon(1e-6));
}

TEST_CASE("cesaro error: deterministic environments") {
    const EnvSpec one = DeterministicEnv::constant(1.0);
    CHECK(cesaro_error(one, 100.0, 2.0, 0.5) == doctest::Approx(0.0).scale(1.0));
    const EnvSpec periodic = DeterministicEnv::periodic_inverse(2.0, 1.0);
    CHECK(lambda_bar_inv(periodic) == 2.0);
    for (double t : {10.0, 50.0, 100.0}) CHECK(cesaro_error(periodic, t, 1.0, 0.01) < 1e-8);
    // Non-integer horizons leave a fractional period.
    CHECK(cesaro_error(periodic, 10.5, 1.0, 0.01) > 1e-3);
}

TEST_CASE("cesaro error decreases with the horizon for shot noise") {
    const auto k = Kernel::compact_bump(1.0);
    int decreasing = 0;
    for (std::uint64_t s = 0; s < 50; ++s) {
        const double half = 400.0 * 400.0 + 400.0 + 2.0;
        const EnvSpec env = ShotNoiseEnv{k, sampled(-half, half, derive_seed(13, 0, s))};
        const auto e = cesaro_errors(env, {100.0, 400.0}, 2.0, 1.0);
        if (e[1] < e[0]) ++decreasing;
    }
    MESSAGE(decreasing << " of 50 configurations decrease");
    CHECK(decreasing >= 45);
}

TEST_CASE("sup growth: trivial environments") {
    const EnvSpec one = DeterministicEnv::constant(1.0);
    for (const auto& [n, sup] : sup_growth_check(one, {10.0, 100.0})) CHECK(sup == 1.0);
    const EnvSpec empty = ShotNoiseEnv{Kernel::compact_bump(1.0), fixed_config({}, -200.0, 200.0)};
    for (const auto& [n, sup] : sup_growth_check(empty, {10.0, 100.0})) CHECK(sup == 1.0);
}

TEST_CASE("window helper scales with the walk") {
    const auto k = Kernel::compact_bump(1.0);
    CHECK(walk_window_half_width(1e4, 2.0, k) == doctest::Approx(1e3 * 100.0 + 1.0));
    CHECK(walk_window_half_width(1e4, 1.5, k) > walk_window_half_width(1e4, 2.0, k));
}

TEST_CASE("sup growth is slower than n^0.1 for a weak kernel") {
    // The sup grows like exp(A log n / log log n); at moderate amplitude that
    // only drops below n^0.1 for astronomically large n, so a weak kernel is used.
    const auto k = Kernel::compact_bump(0.1);
    int ok = 0;
    const int configs = 40;
    for (int s = 0; s < configs; ++s) {
        const double half = 1e4 + k.cutoff_r + 1.0;
        const EnvSpec env = ShotNoiseEnv{k, sampled(-half, half, derive_seed(14, 0, static_cast<std::uint64_t>(s)))};
        const auto r = sup_growth_check(env, {1e2, 1e3, 1e4});
        double q[3];
        for (int i = 0; i < 3; ++i) q[i] = r[i].second / std::pow(r[i].first, 0.1);
        if (q[1] < q[0] && q[2] < q[1]) ++ok;
    }
    CHECK(ok >= 38);
}
