#pragma once

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ctrw/errors.hpp"

namespace ctrw {

struct Integral {
    double value = 0.0;
    double error = 0.0;  // absolute error estimate
};

inline constexpr double kDefaultRelTol = 1e-8;

// Adaptive 15-point Gauss-Kronrod on [a, b]; infinite endpoints allowed.
// Throws QuadratureError when the error estimate misses rel_tol relative to
// the L1 norm of the integrand.
template <class F>
Integral integrate(F&& f, double a, double b, double rel_tol = kDefaultRelTol) {
    if (a == b) return {};
    // Panels a few ulps wide (coincident kinks) defeat the nodal rule; use
    // Simpson there, error taken as its gap to the midpoint rule.
    const double width = b - a;
    if (std::isfinite(width) &&
        std::abs(width) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)})) {
        const double fa = f(a), fm = f(a + 0.5 * width), fb = f(b);
        const double simpson = width * (fa + 4.0 * fm + fb) / 6.0;
        return {simpson, std::abs(simpson - width * fm)};
    }
    double error = 0.0, l1 = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, 15, rel_tol, &error, &l1);
    const double allowed = rel_tol * std::max(l1, std::abs(value)) + 1e-300;
    if (!std::isfinite(value) || error > allowed) {
        std::ostringstream os;
        os << std::setprecision(17) << "adaptive quadrature on [" << a << ", " << b
           << "] did not reach tolerance: value " << value << ", error " << error;
        throw QuadratureError(os.str(), error);
    }
    return {value, error};
}

// Integrates piece by piece between sorted breakpoints inside (a, b), so that
// kinks of the integrand sit on panel edges.
template <class F>
Integral integrate_pieces(F&& f, double a, double b, std::span<const double> breakpoints,
                          double rel_tol = kDefaultRelTol) {
    Integral total;
    double left = a;
    for (double x : breakpoints) {
        if (x <= left || x >= b) continue;
        const auto piece = integrate(f, left, x, rel_tol);
        total.value += piece.value;
        total.error += piece.error;
        left = x;
    }
    const auto piece = integrate(f, left, b, rel_tol);
    total.value += piece.value;
    total.error += piece.error;
    return total;
}

}  // namespace ctrw
