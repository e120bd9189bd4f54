#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "martinet/errors.hpp"
#include "martinet/grid.hpp"
#include "martinet/montgomery.hpp"

namespace martinet::spectrum {

/// Parameters (eta, zeta, k) of the quartic family H_{eta,zeta} = D^2 + (eta + x^2 zeta)^2.
struct MartinetParams {
    double eta = 0.0;
    double zeta = 1.0;
    int k = 1;

    void validate() const {
        if (zeta == 0.0) throw domain_error("MartinetParams: zeta must be nonzero");
        if (k < 1) throw domain_error("MartinetParams: k must be >= 1");
    }
};

/// Lattice mode (n1, n2, k) labeling one eigenfunction of the sub-Laplacian
/// on the zero-z-mean subspace; n2 = 0 is excluded by that restriction.
struct ModeIndex {
    int n1 = 0;
    int n2 = 1;
    int k = 1;

    void validate() const {
        if (n2 == 0) throw domain_error("ModeIndex: n2 must be nonzero (zero-z-mean subspace)");
        if (k < 1) throw domain_error("ModeIndex: k must be >= 1");
    }
    /// Montgomery parameter of the rescaled operator.
    double mu() const { return n1 * (n2 > 0 ? 1.0 : -1.0) / std::pow(std::abs(n2), 1.0 / 3.0); }
};

struct CriticalPointPair {
    int jmath = 0;
    double eta_j = 0.0;
    double zeta_j = 0.0;
    double mu_star = 0.0;
    double Lambda_at_star = 0.0;
};

/// Per-mode semiclassical diagnostics.
struct RegimeReport {
    ModeIndex mode;
    double energy = 0.0;       // eigenvalue E of P_n (= lambda^2 of the sub-Laplacian)
    double lambda_sqrt = 0.0;  // sqrt(E), to keep lambda vs lambda^2 explicit
    double h = 0.0;            // E^{-1/2}
    double eta_bar = 0.0;      // h n1
    double zeta_bar = 0.0;     // h^3 n2
    std::array<double, 4> rs_norms{};  // scaled X1..X4 norms
    double lambda_residual = 0.0;      // |lambda_k(eta_bar, zeta_bar) - 1|
    double u_peak = 0.0;               // density peak location, Montgomery variable
    double center_ratio = 0.0;         // density at x = 0 over peak density
    // derived two-microlocal columns (finite-mode stand-ins, not measures):
    double sigma_bar = 0.0;            // 2 x_peak h^2 n2, the scaled sigma = 2 x zeta
    double w_bar_mean = 0.0;           // h <n1 + x^2 n2>, the scaled w = eta + x^2 zeta
    std::string regime;                // M1, m3(0), m3(1), M2/m4
};

/// Scaling law: lambda_k(eta, zeta) = |zeta|^{2/3} Lambda_k(eta sgn(zeta) / |zeta|^{1/3}).
inline double lambda(const MartinetParams& p, const montgomery::SolveOptions& opt = {}) {
    p.validate();
    const double az = std::abs(p.zeta);
    const double mu = p.eta * (p.zeta > 0 ? 1.0 : -1.0) / std::pow(az, 1.0 / 3.0);
    return std::pow(az, 2.0 / 3.0) * montgomery::lambda_value(mu, p.k, opt);
}

/// Independent route: k-th eigenvalue of the discretized D^2 + (eta + x^2 zeta)^2,
/// no scaling shortcut, on an automatically sized grid.
inline double lambda_direct(const MartinetParams& p, const montgomery::SolveOptions& opt = {}) {
    p.validate();
    return montgomery::detail::extrapolated_values(p.eta, p.zeta, p.k, opt)[p.k - 1];
}

/// Same, on a caller-supplied grid (raw grid value, no extrapolation).
inline double lambda_direct(const MartinetParams& p, const GridSpec& g) {
    p.validate();
    return montgomery::detail::raw_solve(p.eta, p.zeta, g, p.k, false)->values[p.k - 1];
}

/// Relative defect of the degree-2 homogeneity lambda_k(s eta, s^3 zeta) = s^2 lambda_k(eta, zeta).
inline double homogeneity_check(const MartinetParams& p, double s,
                                const montgomery::SolveOptions& opt = {}) {
    if (!(s > 0.0)) throw domain_error("homogeneity_check: s must be positive");
    const double base = lambda(p, opt);
    const double scaled = lambda({s * p.eta, s * s * s * p.zeta, p.k}, opt);
    return std::abs(scaled - s * s * base) / (s * s * base);
}

/// d(lambda_k)/d(eta) through the chain rule and the Hellmann-Feynman derivative:
/// one eigensolve instead of two.
inline double lambda_deta(const MartinetParams& p, const montgomery::SolveOptions& opt = {}) {
    p.validate();
    const double az = std::abs(p.zeta);
    const double sgn = p.zeta > 0 ? 1.0 : -1.0;
    const double mu = p.eta * sgn / std::pow(az, 1.0 / 3.0);
    return sgn * std::pow(az, 1.0 / 3.0) * montgomery::hf_derivative(mu, p.k, opt);
}

struct CriticalPoints {
    std::array<CriticalPointPair, 2> pair;  // jmath = 0, 1
    double curvature = 0.0;                 // Lambda_k''(mu*) = d^2_eta lambda at either point
    double lambda_residual = 0.0;           // max |lambda(eta_j, zeta_j) - 1|
    double deta_residual = 0.0;             // max |d_eta lambda(eta_j, zeta_j)| (central diff)
};

/// The two points (eta_j, zeta_j) where the level set lambda_k = 1 meets the
/// critical curve: zeta_j = (-1)^j Lambda_k(mu*)^{-3/2}, eta_j = mu* (-1)^j |zeta_j|^{1/3}.
inline CriticalPoints critical_points(int k, const montgomery::SolveOptions& opt = {},
                                      double bracket_lo = -3.0, double bracket_hi = 1.0) {
    const auto cp = montgomery::critical_point(k, bracket_lo, bracket_hi, opt);
    CriticalPoints out;
    out.curvature = cp.second_derivative;
    for (int j = 0; j < 2; ++j) {
        const double sgn = (j == 0) ? 1.0 : -1.0;
        CriticalPointPair& q = out.pair[j];
        q.jmath = j;
        q.mu_star = cp.mu_star;
        q.Lambda_at_star = cp.value;
        q.zeta_j = sgn * std::pow(1.0 / cp.value, 1.5);
        q.eta_j = cp.mu_star * sgn * std::pow(std::abs(q.zeta_j), 1.0 / 3.0);

        const double lam = lambda({q.eta_j, q.zeta_j, k}, opt);
        out.lambda_residual = std::max(out.lambda_residual, std::abs(lam - 1.0));
        const double d = 1e-3;
        const double dl = (lambda({q.eta_j + d, q.zeta_j, k}, opt) -
                           lambda({q.eta_j - d, q.zeta_j, k}, opt)) /
                          (2.0 * d);
        out.deta_residual = std::max(out.deta_residual, std::abs(dl));
    }
    if (out.lambda_residual > 1e-8 || out.deta_residual > 1e-6)
        throw solver_error("critical_points: consistency failure, |lambda-1| = " +
                           std::to_string(out.lambda_residual) + ", |d_eta lambda| = " +
                           std::to_string(out.deta_residual));
    return out;
}

struct LevelCurvePoint {
    int k = 0;
    std::string branch;  // "left" / "right" of mu*, or "tangent"
    double eta = 0.0;
    double zeta = 0.0;
};

/// All eta with lambda_k(eta, zeta) = 1 for each requested zeta, found by
/// bisection on the two monotone sides of the minimum of Lambda_k. A zeta
/// whose |zeta|^{2/3} Lambda_k(mu*) exceeds 1 contributes no points.
inline std::vector<LevelCurvePoint> level_curve(int k, const std::vector<double>& zeta_samples,
                                                const montgomery::SolveOptions& opt = {}) {
    const auto cp = montgomery::critical_point(k, -3.0, 1.0, opt);
    std::vector<LevelCurvePoint> out;
    for (double zeta : zeta_samples) {
        if (zeta == 0.0) throw domain_error("level_curve: zeta samples must be nonzero");
        const double target = std::pow(std::abs(zeta), -2.0 / 3.0);
        const double sgn = zeta > 0 ? 1.0 : -1.0;
        const double cbrt_az = std::pow(std::abs(zeta), 1.0 / 3.0);
        if (cp.value > target * (1.0 + 1e-12)) continue;  // level set does not reach this zeta
        if (std::abs(cp.value - target) <= 1e-9 * target) {
            out.push_back({k, "tangent", cp.mu_star * sgn * cbrt_az, zeta});
            continue;
        }
        auto fr = [&](double mu) { return montgomery::lambda_value(mu, k, opt) - target; };
        // expand outward until Lambda exceeds the target on each side
        double lo = cp.mu_star - 1.0;
        while (fr(lo) < 0.0) lo = cp.mu_star - 2.0 * (cp.mu_star - lo);
        double hi = cp.mu_star + 1.0;
        while (fr(hi) < 0.0) hi = cp.mu_star + 2.0 * (hi - cp.mu_star);
        const double mu_l = find_root(fr, lo, cp.mu_star, 1e-10);
        const double mu_r = find_root(fr, cp.mu_star, hi, 1e-10);
        out.push_back({k, "left", mu_l * sgn * cbrt_az, zeta});
        out.push_back({k, "right", mu_r * sgn * cbrt_az, zeta});
    }
    return out;
}

namespace detail {

/// Direct eigensolve of P_n with vectors on an auto-sized grid, regrowing the
/// domain until the boundary potential clears the top requested eigenvalue.
inline std::pair<GridSpec, std::shared_ptr<const montgomery::detail::RawSolve>>
direct_solve_auto(double eta, double zeta, int kmax, const montgomery::SolveOptions& opt) {
    GridSpec g = montgomery::detail::solver_grid(eta, zeta, kmax, opt);
    for (int attempt = 0; attempt < 5; ++attempt) {
        auto raw = montgomery::detail::raw_solve(eta, zeta, g, kmax, true);
        const double wL = eta + g.half_width * g.half_width * zeta;
        if (wL * wL >= opt.safety * raw->values[kmax - 1]) return {g, raw};
        g.half_width *= 1.5;
    }
    throw solver_error("direct_solve_auto: domain regrowth failed");
}

}  // namespace detail

/// Rothschild-Stein diagnostics of one mode. The eigenfunction comes from a
/// direct order-4 solve of P_n = D^2 + (n1 + x^2 n2)^2; with psi = phi e^{i(n1 y + n2 z)}
/// the torus factors integrate to 1 and all norms reduce to 1D quadratures:
///   rs = (h ||phi'||, h ||(n1 + x^2 n2) phi||, 2 h^2 |n2| ||x phi||, 2 h^3 |n2|).
inline RegimeReport rs_diagnostics(const ModeIndex& mode, const montgomery::SolveOptions& opt_in = {},
                                   double nonzero_limit_threshold = 0.05) {
    mode.validate();
    montgomery::SolveOptions opt = opt_in;
    opt.order = 4;  // order-4 stencil keeps the grid eigenvalue at ~1e-8 accuracy
    auto [g, raw] = detail::direct_solve_auto(mode.n1, mode.n2, mode.k, opt);
    const int n = g.points;
    const auto& v = raw->vectors[mode.k - 1];

    RegimeReport r;
    r.mode = mode;
    r.energy = raw->values[mode.k - 1];
    r.lambda_sqrt = std::sqrt(r.energy);
    r.h = 1.0 / r.lambda_sqrt;
    r.eta_bar = r.h * mode.n1;
    r.zeta_bar = r.h * r.h * r.h * mode.n2;

    // potential and moment quadratures (unit l2 vector: dx weights cancel)
    double pot = 0.0, xx = 0.0, wmean = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = g.x(i);
        const double w = mode.n1 + x * x * mode.n2;
        pot += w * w * v[i] * v[i];
        xx += x * x * v[i] * v[i];
        wmean += w * v[i] * v[i];
    }
    // kinetic part through the stencil quadratic form: rs1^2 + rs2^2 = h^2 E exactly
    const double kin = r.energy - pot;
    r.rs_norms[0] = r.h * std::sqrt(std::max(0.0, kin));
    r.rs_norms[1] = r.h * std::sqrt(pot);
    r.rs_norms[2] = 2.0 * r.h * r.h * std::abs(mode.n2) * std::sqrt(xx);
    r.rs_norms[3] = 2.0 * r.h * r.h * r.h * std::abs(mode.n2);

    r.lambda_residual = std::abs(lambda({r.eta_bar, r.zeta_bar, mode.k}, opt_in) - 1.0);

    // density shape in the Montgomery variable u = |n2|^{1/3} x
    int ipeak = 0;
    double peak = 0.0;
    for (int i = 0; i < n; ++i)
        if (v[i] * v[i] > peak) {
            peak = v[i] * v[i];
            ipeak = i;
        }
    const int i0 = static_cast<int>(std::llround((0.0 + g.half_width) / g.dx())) - 1;
    const double center = (i0 >= 0 && i0 < n) ? v[i0] * v[i0] : 0.0;
    r.u_peak = std::abs(g.x(ipeak)) * std::pow(std::abs(mode.n2), 1.0 / 3.0);
    r.center_ratio = center / peak;
    r.sigma_bar = 2.0 * std::abs(g.x(ipeak)) * r.h * r.h * mode.n2;
    r.w_bar_mean = r.h * wmean;

    const bool away = r.u_peak > 1.0 && r.center_ratio < 0.05;
    if (away)
        r.regime = "M2/m4";
    else if (std::abs(r.zeta_bar) >= nonzero_limit_threshold)
        r.regime = "M1";
    else
        r.regime = mode.n2 > 0 ? "m3(0)" : "m3(1)";
    return r;
}

struct SpectrumEntry {
    ModeIndex mode;
    double energy = 0.0;
};

/// All eigenvalues of the mode decomposition with E <= E_max: E is the k-th
/// eigenvalue of P_n = D^2 + (n1 + x^2 n2)^2, over n2 != 0, all n1, k >= 1.
/// Pruning: E >= |n2|^{2/3} Lambda_1(mu*) always, E >= n1^2 when n1 n2 > 0,
/// and Lambda_1 is monotone on each side of mu*, so each n1 scan stops once
/// the floor exceeds E_max beyond the critical point. Output sorted by energy
/// with ties broken lexicographically on (n2, n1, k).
inline std::vector<SpectrumEntry> enumerate_spectrum(double E_max,
                                                     const montgomery::SolveOptions& opt = {}) {
    if (!(E_max > 0.0)) throw domain_error("enumerate_spectrum: E_max must be positive");
    const auto cp = montgomery::critical_point(1, -3.0, 1.0, opt);
    const double floor1 = cp.value;  // min over mu of Lambda_1

    std::vector<SpectrumEntry> out;
    auto emit_for_mu = [&](int n1, int n2, double scale) {
        // scale = |n2|^{2/3}; appends all k with E_k <= E_max, for +n2 and the
        // mirror mode (-n1, -n2) which has the identical spectrum
        const double mu = n1 / std::pow(static_cast<double>(n2), 1.0 / 3.0);
        int kcap = 4;
        for (;;) {
            const auto lam = montgomery::lambda_values(mu, kcap, opt);
            if (scale * lam.back() <= E_max) {
                if (kcap >= 256)
                    throw solver_error("enumerate_spectrum: E_max needs k > 256 at one mode");
                kcap *= 2;
                continue;
            }
            for (int k = 1; k <= kcap; ++k) {
                const double E = scale * lam[k - 1];
                if (E > E_max) break;
                out.push_back({{n1, n2, k}, E});
                out.push_back({{-n1, -n2, k}, E});
            }
            return;
        }
    };

    for (int n2 = 1; std::pow(static_cast<double>(n2), 2.0 / 3.0) * floor1 <= E_max; ++n2) {
        const double scale = std::pow(static_cast<double>(n2), 2.0 / 3.0);
        const double cbrt_n2 = std::pow(static_cast<double>(n2), 1.0 / 3.0);
        for (int dir : {+1, -1}) {
            for (int n1 = (dir > 0 ? 0 : -1);; n1 += dir) {
                if (n1 > 0 && static_cast<double>(n1) * n1 > E_max) break;  // V >= n1^2
                const double mu = n1 / cbrt_n2;
                const double E1 = scale * montgomery::lambda_value(mu, 1, opt);
                if (E1 <= E_max)
                    emit_for_mu(n1, n2, scale);
                else if ((dir > 0 && mu > cp.mu_star) || (dir < 0 && mu < cp.mu_star))
                    break;  // beyond the critical point the floor only grows
                if (std::abs(n1) > 4096)
                    throw solver_error("enumerate_spectrum: runaway n1 scan");
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const SpectrumEntry& a, const SpectrumEntry& b) {
        if (a.energy != b.energy) return a.energy < b.energy;
        return std::tie(a.mode.n2, a.mode.n1, a.mode.k) <
               std::tie(b.mode.n2, b.mode.n1, b.mode.k);
    });
    for (const auto& e : out)
        if (!(e.energy > 0.0)) throw solver_error("enumerate_spectrum: nonpositive eigenvalue");
    return out;
}

}  // namespace martinet::spectrum
