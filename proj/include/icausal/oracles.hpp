// oracles.hpp — Independent verification routines used by the test and
// acceptance suites. Production code never calls these: the light-time
// quadrature exists solely to cross-check the closed-form path.

#pragma once

#include <icausal/spacetime.hpp>

#include <cmath>
#include <stdexcept>

namespace icausal::oracles {

namespace detail {

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm, double fb, double whole, double tol,
                        int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

template <typename F>
double integrate(const F& f, double a, double b, double tol, int max_depth) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace detail

// Numerical evaluation of the radial light-travel coordinate time,
// (1/c) * integral of dr / (1 - R_s/r) between the two radii.
inline double light_time_quadrature(double r_from, double r_to, const gr::SpacetimeConfig& cfg, double tol = 1e-12,
                                    int max_depth = 60) {
    const double rs = cfg.schwarzschild_radius();
    if (r_from <= rs || r_to <= rs)
        throw gr::horizon_error("light_time_quadrature: radius inside the Schwarzschild radius");
    const double lo = std::min(r_from, r_to);
    const double hi = std::max(r_from, r_to);
    const auto integrand = [rs](double r) { return 1.0 / (1.0 - rs / r); };
    return detail::integrate(integrand, lo, hi, tol, max_depth) / cfg.c;
}

}  // namespace icausal::oracles
