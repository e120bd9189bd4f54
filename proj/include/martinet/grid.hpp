#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "martinet/errors.hpp"

namespace martinet {

/// 1D computational domain for the quartic eigenproblems: N interior points
/// of [-L, L] with Dirichlet ends, uniform spacing, stencil order 2 or 4.
struct GridSpec {
    double half_width = 8.0;  // L
    int points = 2048;        // N, interior
    int order = 2;            // central-difference order

    double dx() const { return 2.0 * half_width / (points + 1); }
    double x(int i) const { return -half_width + (i + 1) * dx(); }

    std::vector<double> abscissae() const {
        std::vector<double> xs(points);
        for (int i = 0; i < points; ++i) xs[i] = x(i);
        return xs;
    }

    /// Structural sanity only; solver-grade checks live in validate_for_solve.
    void validate_basic() const {
        if (!(half_width > 0.0)) throw domain_error("GridSpec: half_width must be positive");
        if (points < 2) throw domain_error("GridSpec: need at least 2 points");
        if (order != 2 && order != 4)
            throw domain_error("GridSpec: order must be 2 or 4, got " + std::to_string(order));
    }

    /// Solver-grade validation: N >= 64, and the boundary potential value must
    /// clear the largest requested eigenvalue by the safety factor so the
    /// Dirichlet truncation error stays below the solve tolerance.
    void validate_for_solve(double boundary_potential, double largest_eigenvalue_estimate,
                            double safety = 4.0) const {
        validate_basic();
        if (points < 64)
            throw domain_error("GridSpec: N = " + std::to_string(points) +
                               " too coarse for an eigensolve (need N >= 64)");
        if (boundary_potential < safety * largest_eigenvalue_estimate)
            throw domain_error("GridSpec: V(L) = " + std::to_string(boundary_potential) +
                               " does not clear " + std::to_string(safety) + " x Lambda_est = " +
                               std::to_string(safety * largest_eigenvalue_estimate) +
                               "; enlarge half_width");
    }
};

/// Smallest L with (eta + L^2 zeta)^2 >= safety * E_target, then extended
/// until the Agmon integral of sqrt(V - E) over the forbidden region reaches
/// 16, which pushes the Dirichlet truncation error below ~1e-13 relative.
inline double auto_half_width(double eta, double zeta, double target_eigenvalue,
                              double safety = 4.0) {
    const double az = std::abs(zeta);
    if (az == 0.0) throw domain_error("auto_half_width: zeta must be nonzero");
    const double s = zeta > 0 ? 1.0 : -1.0;
    const double E = std::max(target_eigenvalue, 1.0);
    const double need = std::sqrt(safety * E);
    double L = std::sqrt((need + std::max(0.0, -eta * s)) / az);

    // outer classical turning point: |eta + x^2 zeta| = sqrt(E)
    const double xt = std::sqrt((std::sqrt(E) + std::max(0.0, -eta * s)) / az);
    auto agmon = [&](double Lb) {
        const int m = 200;
        const double h = (Lb - xt) / m;
        double a = 0.0;
        for (int i = 0; i < m; ++i) {
            const double x = xt + (i + 0.5) * h;
            const double w = eta + x * x * zeta;
            a += std::sqrt(std::max(0.0, w * w - E)) * h;
        }
        return a;
    };
    for (int it = 0; it < 80 && agmon(L) < 16.0; ++it) L *= 1.2;
    return L;
}

/// Default production grid for the Montgomery operator H_mu at parameter mu,
/// resolving eigenvalues up to index kmax.
inline GridSpec auto_grid(double mu, int kmax, int points = 2048, int order = 2,
                          double safety = 4.0) {
    // generous a-priori growth estimate; the solver re-checks after the solve
    const double quartic = 2.5 * std::pow(static_cast<double>(kmax) + 1.0, 4.0 / 3.0);
    const double est = quartic + mu * mu + 2.0 * std::sqrt(std::abs(mu)) * (2.0 * kmax + 1.0);
    return GridSpec{auto_half_width(mu, 1.0, est, safety), points, order};
}

}  // namespace martinet
