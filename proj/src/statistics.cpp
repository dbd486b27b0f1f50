#include "ctrw/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ctrw/errors.hpp"

namespace ctrw {

std::vector<double> sorted_copy(std::span<const double> x) {
    std::vector<double> out(x.begin(), x.end());
    std::sort(out.begin(), out.end());
    return out;
}

double ks_two_sample_sorted(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty sample");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        // Advance past every copy of the smallest pending value in both
        // samples so ties are compared after the full ECDF step.
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty sample");
    const auto sa = sorted_copy(a);
    const auto sb = sorted_copy(b);
    return ks_two_sample_sorted(sa, sb);
}

double wasserstein1(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw DomainError("wasserstein1: empty sample");
    const auto sa = sorted_copy(a);
    const auto sb = sorted_copy(b);
    if (sa.size() == sb.size()) {
        double acc = 0.0;
        for (std::size_t k = 0; k < sa.size(); ++k) acc += std::abs(sa[k] - sb[k]);
        return acc / static_cast<double>(sa.size());
    }
    // Walk the merged grid of quantile levels k/na and l/nb.
    const double na = static_cast<double>(sa.size());
    const double nb = static_cast<double>(sb.size());
    std::size_t i = 0, j = 0;
    double level = 0.0, acc = 0.0;
    while (i < sa.size() && j < sb.size()) {
        const double next_a = static_cast<double>(i + 1) / na;
        const double next_b = static_cast<double>(j + 1) / nb;
        const double next = std::min(next_a, next_b);
        acc += (next - level) * std::abs(sa[i] - sb[j]);
        level = next;
        if (next_a <= next) ++i;
        if (next_b <= next) ++j;
    }
    return acc;
}

double ks_critical_value(std::size_t n, std::size_t m, double level) {
    if (n == 0 || m == 0 || !(level > 0.0 && level < 1.0))
        throw DomainError("ks_critical_value: need n, m > 0 and level in (0,1)");
    const double c = std::sqrt(-std::log(level / 2.0) / 2.0);
    const double dn = static_cast<double>(n), dm = static_cast<double>(m);
    return c * std::sqrt((dn + dm) / (dn * dm));
}

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw DomainError("quantile: empty sample");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double mean(std::span<const double> x) {
    if (x.empty()) throw DomainError("mean: empty sample");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
    if (x.size() < 2) throw DomainError("variance: need at least two values");
    const double m = mean(x);
    double acc = 0.0;
    for (double v : x) acc += (v - m) * (v - m);
    return acc / static_cast<double>(x.size() - 1);
}

}  // namespace ctrw
