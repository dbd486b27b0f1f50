#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "ctrw/environment.hpp"
#include "ctrw/errors.hpp"
#include "ctrw/random.hpp"
#include "ctrw/stable.hpp"
#include "ctrw/walk.hpp"

using namespace ctrw;

namespace {

// Brute-force scan of the cumulative holds.
double scan_position(const PathSkeleton& p, double s) {
    double elapsed = 0.0;
    std::size_t k = 0;
    while (k < p.holds.size() && elapsed + p.holds[k] <= s) {
        elapsed += p.holds[k];
        ++k;
    }
    return p.positions[std::min(k, p.positions.size() - 1)];
}

}  // namespace

TEST_CASE("deterministic renewal") {
    RandomSource rng(1);
    const auto p = simulate_skeleton(JumpLaw::gaussian(2.0), WaitLaw::deterministic(1.0), nullptr, 5.5, rng);
    CHECK(p.n_jumps == 5);
    for (std::size_t k = 0; k <= 5; ++k) CHECK(p.holds[k] == 1.0);
    CHECK(check_bracketing(p));
}

TEST_CASE("short horizon: no jumps, walker stays at the origin") {
    RandomSource rng(2);
    const auto p = simulate_skeleton(JumpLaw::gaussian(2.0), WaitLaw::deterministic(10.0), nullptr, 3.0, rng);
    CHECK(p.n_jumps == 0);
    CHECK(position_at(p, 0.0) == 0.0);
    CHECK(position_at(p, 3.0) == 0.0);
    CHECK(check_bracketing(p));
}

TEST_CASE("bracketing holds on random paths") {
    for (std::uint64_t s = 0; s < 50; ++s) {
        RandomSource rng(derive_seed(3, 0, s));
        const auto p = simulate_skeleton(JumpLaw::symmetric_pareto(1.5), WaitLaw::pareto(2.5, 0.6), nullptr, 500.0, rng);
        CHECK(check_bracketing(p));
    }
}

TEST_CASE("environment slows holds: renewal rate doubles under Lambda = 2") {
    const EnvSpec env = DeterministicEnv::constant(2.0);
    double total = 0.0;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        RandomSource rng(derive_seed(4, 0, s));
        total += static_cast<double>(
            simulate_skeleton(JumpLaw::gaussian(2.0), WaitLaw::exponential_mean(1.0), &env, 1e3, rng).n_jumps);
    }
    CHECK(total / 1000.0 / 1e3 == doctest::Approx(2.0).epsilon(0.025));
}

TEST_CASE("law of large numbers for the jump count") {
    double total = 0.0;
    for (std::uint64_t s = 0; s < 200; ++s) {
        RandomSource rng(derive_seed(5, 0, s));
        total += static_cast<double>(
            simulate_skeleton(JumpLaw::gaussian(2.0), WaitLaw::exponential_mean(1.0), nullptr, 1e5, rng).n_jumps);
    }
    CHECK(total / 200.0 / 1e5 == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("environment-weighted holds average to mu times the Cesaro mean") {
    // Periodic 1/Lambda = 2 + sin(2 pi x); along a path the mean of theta / Lambda(S) tends to 2.
    const EnvSpec env = DeterministicEnv::periodic_inverse(2.0, 1.0);
    RandomSource rng(6);
    const auto p = simulate_skeleton(JumpLaw::gaussian(2.0), WaitLaw::exponential_mean(1.0), &env, 2.1e5, rng);
    REQUIRE(p.n_jumps >= 100000);
    double s = 0.0;
    for (std::size_t k = 0; k < 100000; ++k) s += p.holds[k];
    CHECK(s / 1e5 == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("intensity failures and runaway paths are reported") {
    DeterministicEnv bad = DeterministicEnv::constant(1.0);
    bad.lambda = [](double) { return 0.0; };
    const EnvSpec env = bad;
    RandomSource rng(7);
    CHECK_THROWS_AS(simulate_skeleton(JumpLaw::gaussian(2.0), WaitLaw::exponential_mean(1.0), &env, 10.0, rng),
                    SimulationError);
    try {
        simulate_skeleton(JumpLaw::gaussian(2.0), WaitLaw::deterministic(1.0), nullptr, 1000.0, rng,
                          SimulationOptions{100});
        FAIL("expected ResourceError");
    } catch (const ResourceError& e) {
        CHECK(e.cap() == 100);
    }
}

TEST_CASE("position lookup") {
    RandomSource rng(8);
    const auto p = simulate_skeleton(JumpLaw::gaussian(2.0), WaitLaw::exponential_mean(1.0), nullptr, 50.0, rng);
    REQUIRE(p.n_jumps >= 2);
    const double h1 = p.holds[0];
    CHECK(position_at(p, 0.0) == 0.0);
    CHECK(position_at(p, std::nextafter(h1, 0.0)) == 0.0);
    CHECK(position_at(p, h1) == p.positions[1]);
    CHECK_THROWS_AS(position_at(p, -1e-9), DomainError);
    CHECK_THROWS_AS(position_at(p, 50.1), DomainError);
    RandomSource pick(9);
    for (int i = 0; i < 1000; ++i) {
        const double s = pick.uniform(0.0, 50.0);
        CHECK(position_at(p, s) == scan_position(p, s));
    }
}

TEST_CASE("additive functional: constant and occupation examples") {
    RandomSource rng(10);
    const auto p = simulate_skeleton(JumpLaw::gaussian(2.0), WaitLaw::exponential_mean(1.0), nullptr, 100.0, rng);
    const std::vector<double> grid{0.25, 0.5, 1.0};
    const auto ones = additive_functional(p, FunctionalSpec::constant(1.0), 100.0, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(ones[i] == doctest::Approx(100.0 * grid[i]).epsilon(1e-12));
    const std::vector<double> zero{0.0};
    CHECK(additive_functional(p, FunctionalSpec::constant(1.0), 100.0, zero)[0] == 0.0);

    // Holds 1, 2, 3, ...: between the first and second jump the origin indicator equals h_1.
    PathSkeleton q;
    q.positions = {0.0, 1.0, 2.0};
    q.holds = {1.0, 2.0, 3.0};
    q.times = {0.0, 1.0, 3.0, 6.0};
    q.horizon = 5.0;
    q.n_jumps = 2;
    REQUIRE(check_bracketing(q));
    const std::vector<double> mid{2.0 / 5.0};
    CHECK(additive_functional(q, FunctionalSpec::point_indicator(0.0), 5.0, mid)[0] == 1.0);
}

TEST_CASE("additive functional matches a fine Riemann sum") {
    RandomSource rng(11);
    const double t = 200.0;
    const auto p = simulate_skeleton(JumpLaw::gaussian(2.0), WaitLaw::exponential_mean(1.0), nullptr, t, rng);
    const auto f = FunctionalSpec::gaussian_bump();
    const std::vector<double> grid{0.3, 1.0};
    const auto exact = additive_functional(p, f, t, grid);
    const double h = 1e-4 * t;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double riemann = 0.0;
        for (double s = h / 2; s < t * grid[i]; s += h) riemann += f.f(position_at(p, s)) * h;
        CHECK(exact[i] == doctest::Approx(riemann).epsilon(1e-3));
    }
}

TEST_CASE("additive functional is additive over the grid") {
    RandomSource rng(12);
    const double t = 300.0;
    const auto p = simulate_skeleton(JumpLaw::gaussian(2.0), WaitLaw::exponential_mean(1.0), nullptr, t, rng);
    const auto f = FunctionalSpec::interval_indicator(-1.0, 1.0);
    const std::vector<double> grid{0.4, 0.9};
    const auto v = additive_functional(p, f, t, grid);
    // Independent sweep over (t u1, t u2].
    double piece = 0.0, start = 0.0;
    for (std::size_t k = 0; k < p.holds.size(); ++k) {
        const double end = start + p.holds[k];
        const double lo = std::max(start, t * grid[0]), hi = std::min(end, t * grid[1]);
        if (hi > lo) piece += (hi - lo) * f.f(p.positions[k]);
        start = end;
    }
    CHECK(v[1] == doctest::Approx(v[0] + piece).epsilon(1e-12));
}

TEST_CASE("plain and environment-divided variants agree under Lambda = 1") {
    const EnvSpec one = DeterministicEnv::constant(1.0);
    RandomSource a(13), b(13);
    const auto pa = simulate_skeleton(JumpLaw::gaussian(2.0), WaitLaw::exponential_mean(1.0), nullptr, 1e3, a);
    const auto pb = simulate_skeleton(JumpLaw::gaussian(2.0), WaitLaw::exponential_mean(1.0), &one, 1e3, b);
    const auto f = FunctionalSpec::gaussian_bump();
    const auto va = additive_functional(pa, f, 1e3, kDefaultUGrid);
    const auto vb = additive_functional(pb, f.divided_by_environment(), 1e3, kDefaultUGrid);
    for (std::size_t i = 0; i < va.size(); ++i) CHECK(va[i] == vb[i]);
}

TEST_CASE("normalized functional composition") {
    RandomSource rng(14);
    auto law = JumpLaw::gaussian(2.0);
    const auto p = simulate_skeleton(law, WaitLaw::exponential_mean(1.0), nullptr, 1e4, rng);
    const std::vector<double> one{1.0};
    CHECK(normalized_functional(p, FunctionalSpec::constant(1.0), law, 1e4, one)[0] ==
          doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("lattice limit constants") {
    const auto pm1 = JumpLaw::lattice(0.0, 1.0, {{-1, 0.5}, {1, 0.5}});
    CHECK(lattice_limit_constant(pm1, FunctionalSpec::point_indicator(0.0).f) == 1.0);
    double direct = 0.0;
    for (int n = -10; n <= 10; ++n) direct += std::exp(-double(n * n));
    CHECK(lattice_limit_constant(pm1, FunctionalSpec::gaussian_bump().f) == doctest::Approx(direct).epsilon(1e-12));
    CHECK(direct == doctest::Approx(1.772637).epsilon(1e-6));
    const auto half = JumpLaw::lattice(0.0, 0.5, {{-1, 0.5}, {1, 0.5}});
    CHECK(lattice_limit_constant(half, FunctionalSpec::interval_indicator(0.0, 1.0).f) == doctest::Approx(1.0));
    CHECK_THROWS_AS(lattice_limit_constant(pm1, [](double) { return 1.0; }, LatticeSumOptions{1e-12, 1000}),
                    DivergentSumError);
    CHECK_THROWS_AS(lattice_limit_constant(JumpLaw::gaussian(2.0), FunctionalSpec::gaussian_bump().f), DomainError);
}

TEST_CASE("skeleton dump has one event per line") {
    RandomSource rng(15);
    const auto p = simulate_skeleton(JumpLaw::gaussian(2.0), WaitLaw::exponential_mean(1.0), nullptr, 20.0, rng);
    std::ostringstream os;
    write_skeleton(os, p);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line.rfind("#", 0) == 0);
    std::size_t rows = 0;
    while (std::getline(is, line)) {
        std::istringstream fields(line);
        std::size_t k;
        double s, h;
        REQUIRE(static_cast<bool>(fields >> k >> s >> h));
        CHECK(k == rows);
        CHECK(s == p.positions[rows]);
        ++rows;
    }
    CHECK(rows == static_cast<std::size_t>(p.n_jumps) + 1);
}

TEST_CASE("wait law means") {
    CHECK(WaitLaw::exponential_mean(2.5).mean() == doctest::Approx(2.5));
    CHECK(WaitLaw::pareto(3.0, 2.0).mean() == doctest::Approx(3.0));
    CHECK(WaitLaw::gamma(2.0, 0.5).mean() == doctest::Approx(1.0));
    CHECK_THROWS_AS(WaitLaw::pareto(1.0, 1.0), DomainError);
    RandomSource rng(16);
    const auto law = WaitLaw::pareto(3.0, 2.0);
    double s = 0.0;
    for (int i = 0; i < 200000; ++i) {
        const double w = sample_wait(law, rng);
        REQUIRE(w >= 2.0);
        s += w;
    }
    CHECK(s / 200000.0 == doctest::Approx(3.0).epsilon(0.02));
}
