#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "martinet/errors.hpp"

namespace martinet {

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1],
/// via Newton iteration on P_n with the asymptotic initial guess.
inline void gauss_legendre_rule(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

/// Composite Gauss-Legendre integration of f on [a, b]: panel count doubles
/// until two successive levels agree to the requested relative tolerance.
template <class F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-13, int max_panels = 256) {
    static thread_local std::vector<double> xs, ws;
    if (xs.size() != 24) gauss_legendre_rule(24, xs, ws);
    auto level = [&](int panels) {
        double sum = 0.0;
        const double hp = (b - a) / panels;
        for (int p = 0; p < panels; ++p) {
            const double c = a + (p + 0.5) * hp;
            double s = 0.0;
            for (std::size_t i = 0; i < xs.size(); ++i) s += ws[i] * f(c + 0.5 * hp * xs[i]);
            sum += 0.5 * hp * s;
        }
        return sum;
    };
    double prev = level(1);
    for (int panels = 2; panels <= max_panels; panels *= 2) {
        double cur = level(panels);
        if (std::abs(cur - prev) <= rel_tol * (std::abs(cur) + 1e-300) + 1e-15) return cur;
        prev = cur;
    }
    throw solver_error("integrate: quadrature failed to converge");
}

}  // namespace martinet
