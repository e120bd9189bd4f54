#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "martinet/errors.hpp"

namespace martinet {

// Complete elliptic integrals via the arithmetic-geometric mean.
// All entry points take the modulus k, NOT the parameter m = k^2.

namespace detail {

struct agm_result {
    double K;
    double E;
};

/// One AGM run computing both K(k) and E(k) through the c_n^2 accumulation:
///   K = pi / (2 a_N),  E = K (1 - sum_n 2^{n-1} c_n^2),  c_0 = k.
/// Terminates when a_n and b_n agree to 4 ulp; 40 iterations is a hard cap
/// (convergence is quadratic).
inline agm_result agm_complete(double k) {
    double a = 1.0;
    double b = std::sqrt((1.0 - k) * (1.0 + k));
    double c = k;
    double csum = 0.5 * c * c;  // 2^{-1} c_0^2
    double pow2 = 1.0;
    constexpr double eps = std::numeric_limits<double>::epsilon();
    for (int n = 0; n < 40; ++n) {
        if (std::abs(a - b) <= 4.0 * eps * a) break;
        c = 0.5 * (a - b);
        double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
        csum += pow2 * c * c;  // 2^{n} c_{n+1}^2, accumulated as 2^{(n+1)-1}
        pow2 *= 2.0;
    }
    const double K = M_PI / (2.0 * a);
    return {K, K * (1.0 - csum)};
}

}  // namespace detail

/// K(k) = ∫_0^{pi/2} dt / sqrt(1 - k^2 sin^2 t), for 0 <= k < 1.
inline double ellip_K(double k) {
    if (!(k >= 0.0) || k >= 1.0)
        throw domain_error("ellip_K: modulus k = " + std::to_string(k) +
                           " outside [0, 1) (note: argument is k, not m = k^2)");
    return detail::agm_complete(k).K;
}

/// E(k) = ∫_0^{pi/2} sqrt(1 - k^2 sin^2 t) dt, for 0 <= k <= 1.
inline double ellip_E(double k) {
    if (!(k >= 0.0) || k > 1.0)
        throw domain_error("ellip_E: modulus k = " + std::to_string(k) +
                           " outside [0, 1] (note: argument is k, not m = k^2)");
    if (k == 1.0) return 1.0;  // AGM collapses; integral of cos t over a quarter period
    return detail::agm_complete(k).E;
}

}  // namespace martinet
