#pragma once

#include <span>
#include <vector>

namespace ctrw {

// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|. Throws
// DomainError on empty input.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

// Same, for inputs already sorted ascending.
double ks_two_sample_sorted(std::span<const double> a, std::span<const double> b);

// Wasserstein-1 distance between the two empirical measures, i.e. the
// integral of |F_a^{-1} - F_b^{-1}| over (0,1). For equal sizes this is the
// mean absolute difference of the sorted samples.
double wasserstein1(std::span<const double> a, std::span<const double> b);

// Asymptotic two-sample KS critical value at significance `level`:
// sqrt(-ln(level/2)/2) * sqrt((n+m)/(n m)).
double ks_critical_value(std::size_t n, std::size_t m, double level);

// Linear-interpolation quantile (type 7) of a sorted sample.
double quantile_sorted(std::span<const double> sorted, double q);

double mean(std::span<const double> x);
double variance(std::span<const double> x);

std::vector<double> sorted_copy(std::span<const double> x);

}  // namespace ctrw
