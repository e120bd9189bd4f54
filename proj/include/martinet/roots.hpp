#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "martinet/errors.hpp"

namespace martinet {

/// Bracketed root finding by bisection with a secant refinement step.
/// Requires f(lo) and f(hi) of opposite sign; converges to |hi-lo| <= xtol.
template <class F>
double find_root(F&& f, double lo, double hi, double xtol = 1e-12, int max_iter = 200) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw solver_error("find_root: no sign change on [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "]");
    for (int it = 0; it < max_iter && (hi - lo) > xtol; ++it) {
        // secant proposal, clipped to the inner half of the bracket
        double mid = 0.5 * (lo + hi);
        double sec = (std::abs(fhi - flo) > 0.0) ? lo - flo * (hi - lo) / (fhi - flo) : mid;
        double x = (sec > lo + 0.25 * (hi - lo) && sec < hi - 0.25 * (hi - lo)) ? sec : mid;
        double fx = f(x);
        if (fx == 0.0) return x;
        if ((fx > 0.0) == (flo > 0.0)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
    }
    return 0.5 * (lo + hi);
}

/// Golden-section minimization of a unimodal function on [lo, hi].
template <class F>
double minimize_golden(F&& f, double lo, double hi, double xtol = 1e-10, int max_iter = 200) {
    constexpr double r = 0.6180339887498949;  // 1/phi
    double a = lo, b = hi;
    double x1 = b - r * (b - a), x2 = a + r * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < max_iter && (b - a) > xtol; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace martinet
