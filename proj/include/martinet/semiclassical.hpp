#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "martinet/errors.hpp"
#include "martinet/spectrum.hpp"

namespace martinet::semiclassical {

using spectrum::ModeIndex;
using spectrum::RegimeReport;

/// Rule generating ModeIndex(j) for j = 1..J at fixed k. Supported families:
/// pure n2 = j with n1 = 0; fixed ratio n2 = round(c j^3), n1 = round(d j);
/// explicit user lists.
struct ModeSequence {
    enum class Family { pure_n2, fixed_ratio, user };
    Family family = Family::pure_n2;
    double c = 1.0;  // n2 coefficient (fixed_ratio)
    double d = 0.0;  // n1 coefficient (fixed_ratio)
    int k = 1;
    int length = 8;
    std::vector<ModeIndex> user_modes;

    ModeIndex at(int j) const {  // j = 1..length
        ModeIndex m;
        switch (family) {
            case Family::pure_n2:
                m = {0, j, k};
                break;
            case Family::fixed_ratio: {
                const long n2 = std::llround(c * static_cast<double>(j) * j * j);
                m = {static_cast<int>(std::llround(d * j)), static_cast<int>(n2 == 0 ? 1 : n2), k};
                break;
            }
            case Family::user:
                if (j < 1 || j > static_cast<int>(user_modes.size()))
                    throw domain_error("ModeSequence: index outside user list");
                m = user_modes[j - 1];
                break;
        }
        m.validate();
        return m;
    }
};

/// Per-mode diagnostics plus the regime tag (delegates to spectrum::rs_diagnostics).
inline RegimeReport mode_invariants(const ModeIndex& mode,
                                    const montgomery::SolveOptions& opt = {}) {
    return spectrum::rs_diagnostics(mode, opt);
}

struct RegimeThresholds {
    double drift_per_step = 0.01;  // max fitted |d zeta_bar / dj| for "converged"
    double nonzero_limit = 0.05;   // min |limit| for "nonzero limit"
};

struct SequenceVerdict {
    std::vector<RegimeReport> reports;
    std::string verdict;        // M1, m3(0), m3(1), M2/m4, mixed
    double zbar_limit = 0.0;    // mean of the tail
    double zbar_drift = 0.0;    // least-squares slope per step over the tail
};

/// Sequence classification from the tail behaviour of zeta_bar_j and the
/// position-density shape of the tail modes.
inline SequenceVerdict classify_regime(const ModeSequence& seq,
                                       const RegimeThresholds& thr = {},
                                       const montgomery::SolveOptions& opt = {}) {
    if (seq.length < 8)
        throw domain_error("classify_regime: need J >= 8 modes, got " +
                           std::to_string(seq.length));
    SequenceVerdict out;
    out.reports.reserve(seq.length);
    for (int j = 1; j <= seq.length; ++j) out.reports.push_back(mode_invariants(seq.at(j), opt));

    const int tail0 = seq.length / 2;
    const int m = seq.length - tail0;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int i = tail0; i < seq.length; ++i) {
        const double x = i + 1.0, y = out.reports[i].zeta_bar;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    out.zbar_drift = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    out.zbar_limit = sy / m;

    int away = 0, pos = 0, neg = 0;
    for (int i = tail0; i < seq.length; ++i) {
        if (out.reports[i].regime == "M2/m4") ++away;
        (out.reports[i].mode.n2 > 0 ? pos : neg)++;
    }
    if (2 * away >= m)
        out.verdict = "M2/m4";
    else if (std::abs(out.zbar_drift) < thr.drift_per_step &&
             std::abs(out.zbar_limit) > thr.nonzero_limit)
        out.verdict = "M1";
    else if (std::abs(out.zbar_limit) <= thr.nonzero_limit &&
             std::abs(out.reports[seq.length - 1].zeta_bar) <=
                 std::abs(out.reports[tail0].zeta_bar) + 1e-12)
        out.verdict = (pos == m) ? "m3(0)" : (neg == m ? "m3(1)" : "mixed");
    else
        out.verdict = "mixed";
    return out;
}

/// Phase-space window in the rescaled variables (X, Xi) = (x/h, h D_x).
struct HusimiWindow {
    double x_min = 0.0, x_max = 0.0;
    double xi_min = 0.0, xi_max = 0.0;
    int nx = 120, nxi = 120;
};

/// Husimi density of one mode: squared overlaps against Gaussian coherent
/// states of width sqrt(h) on the (X, Xi) window, normalized to total mass 1.
struct HusimiField {
    HusimiWindow window;
    ModeIndex mode;
    double h = 0.0;
    double eta_bar = 0.0;
    double zeta_bar = 0.0;
    double width = 0.0;              // coherent-state width in X
    std::vector<double> density;     // row-major, density[i*nxi + j] at (X_i, Xi_j)
    double total_mass = 0.0;         // after normalization: 1
    double coverage = 0.0;           // fraction of the state inside the window
    bool coverage_warning = false;   // set when the window misses > 1% of mass

    double X(int i) const {
        return window.x_min + (window.x_max - window.x_min) * (i + 0.5) / window.nx;
    }
    double Xi(int j) const {
        return window.xi_min + (window.xi_max - window.xi_min) * (j + 0.5) / window.nxi;
    }
};

/// Default window: covers the classically allowed region of the rescaled
/// shell Xi^2 + (eta_bar + zeta_bar X^2)^2 <= 1 with margin for both the
/// state spread and the coherent smearing (position ~ width, momentum ~ 1/width).
inline HusimiWindow auto_window(double eta_bar, double zeta_bar, double width, int nx = 120,
                                int nxi = 120) {
    const double xt = std::sqrt((1.2 + std::abs(eta_bar)) / std::abs(zeta_bar));
    const double xm = 1.2 * xt + 4.0 * width + 0.5;
    const double xim = 1.1 + 4.0 / (width * std::sqrt(2.0)) + 0.5;
    return {-xm, xm, -xim, xim, nx, nxi};
}

inline HusimiField husimi(const ModeIndex& mode, const HusimiWindow& window_in = {},
                          const montgomery::SolveOptions& opt_in = {},
                          double width_override = 0.0) {
    mode.validate();
    montgomery::SolveOptions opt = opt_in;
    opt.order = 4;
    auto [g, raw] = spectrum::detail::direct_solve_auto(mode.n1, mode.n2, mode.k, opt);
    const int n = g.points;
    const auto& v = raw->vectors[mode.k - 1];
    const double E = raw->values[mode.k - 1];
    const double h = 1.0 / std::sqrt(E);

    HusimiField f;
    f.mode = mode;
    f.h = h;
    f.eta_bar = h * mode.n1;
    f.zeta_bar = h * h * h * mode.n2;
    f.width = (width_override > 0.0) ? width_override : std::sqrt(h);
    f.window = (window_in.nx > 0 && window_in.x_max > window_in.x_min)
                   ? window_in
                   : auto_window(f.eta_bar, f.zeta_bar, f.width);

    // state in the rescaled variable X = x/h, unit l2 with weight dX
    const double dX = g.dx() / h;
    std::vector<double> X(n), psi(n);
    for (int i = 0; i < n; ++i) {
        X[i] = g.x(i) / h;
        psi[i] = v[i] / std::sqrt(dX);  // sum psi^2 dX = 1
    }

    const int nx = f.window.nx, nxi = f.window.nxi;
    f.density.assign(static_cast<std::size_t>(nx) * nxi, 0.0);
    const double s = f.width;
    const double gauss_norm = std::pow(M_PI * s * s, -0.25);
    std::vector<double> envelope(n);
    for (int i = 0; i < nx; ++i) {
        const double X0 = f.X(i);
        int lo = n, hi = -1;
        for (int p = 0; p < n; ++p) {
            const double arg = (X[p] - X0) / s;
            if (std::abs(arg) < 8.0) {
                envelope[p] = gauss_norm * std::exp(-0.5 * arg * arg) * psi[p];
                if (p < lo) lo = p;
                hi = p;
            }
        }
        if (hi < lo) continue;
        for (int j = 0; j < nxi; ++j) {
            const double Xi0 = f.Xi(j);
            double re = 0.0, im = 0.0;
            for (int p = lo; p <= hi; ++p) {
                const double ph = Xi0 * X[p];
                re += envelope[p] * std::cos(ph);
                im += envelope[p] * std::sin(ph);
            }
            f.density[static_cast<std::size_t>(i) * nxi + j] = (re * re + im * im) * dX * dX;
        }
    }

    // resolution of identity: integral of |<g, psi>|^2 dX0 dXi0 / (2 pi) = 1
    const double cell = ((f.window.x_max - f.window.x_min) / nx) *
                        ((f.window.xi_max - f.window.xi_min) / nxi);
    double total = 0.0;
    for (double d : f.density) total += d;
    f.coverage = total * cell / (2.0 * M_PI);
    f.coverage_warning = f.coverage < 0.99;
    if (total <= 0.0) throw solver_error("husimi: empty window");
    for (double& d : f.density) d /= total;
    f.total_mass = 1.0;
    return f;
}

struct ShellMasses {
    double annulus = 0.0;   // mass with |S - 1| < thickness
    double sublevel = 0.0;  // mass with S < 1 + thickness
};

/// Mass of the field inside the shell tube of the rescaled energy symbol
/// S(X, Xi) = Xi^2 + (eta_bar + zeta_bar X^2)^2.
inline ShellMasses shell_masses(const HusimiField& f, double thickness = 0.2) {
    ShellMasses m;
    for (int i = 0; i < f.window.nx; ++i)
        for (int j = 0; j < f.window.nxi; ++j) {
            const double X = f.X(i), Xi = f.Xi(j);
            const double w = f.eta_bar + f.zeta_bar * X * X;
            const double S = Xi * Xi + w * w;
            const double d = f.density[static_cast<std::size_t>(i) * f.window.nxi + j];
            if (std::abs(S - 1.0) < thickness) m.annulus += d;
            if (S < 1.0 + thickness) m.sublevel += d;
        }
    return m;
}

/// Sampled position density |phi_k|^2 with mass-near-zero statistics in the
/// Montgomery variable u = |n2|^{1/3} x and the locations of density maxima.
struct PositionDensity {
    ModeIndex mode;
    std::vector<double> u;        // Montgomery variable samples
    std::vector<double> density;  // normalized: sum density * du = 1
    double mass_within_01 = 0.0;  // |u| < 0.1
    double mass_within_05 = 0.0;  // |u| < 0.5
    std::vector<double> maxima_u;
    std::vector<double> maxima_x;
    double total = 0.0;
};

inline PositionDensity position_density(const ModeIndex& mode,
                                        const montgomery::SolveOptions& opt_in = {}) {
    mode.validate();
    montgomery::SolveOptions opt = opt_in;
    opt.order = 4;
    auto [g, raw] = spectrum::detail::direct_solve_auto(mode.n1, mode.n2, mode.k, opt);
    const int n = g.points;
    const auto& v = raw->vectors[mode.k - 1];
    const double scale = std::pow(std::abs(mode.n2), 1.0 / 3.0);
    const double du = g.dx() * scale;

    PositionDensity p;
    p.mode = mode;
    p.u.resize(n);
    p.density.resize(n);
    double peak = 0.0;
    for (int i = 0; i < n; ++i) {
        p.u[i] = g.x(i) * scale;
        p.density[i] = v[i] * v[i] / du;  // sum density du = 1
        peak = std::max(peak, p.density[i]);
        const double au = std::abs(p.u[i]);
        if (au < 0.1) p.mass_within_01 += v[i] * v[i];
        if (au < 0.5) p.mass_within_05 += v[i] * v[i];
        p.total += v[i] * v[i];
    }
    // strict on the left so an exactly-even plateau across the midpoint counts once
    for (int i = 1; i + 1 < n; ++i)
        if (p.density[i] > p.density[i - 1] && p.density[i] >= p.density[i + 1] &&
            p.density[i] > 0.25 * peak) {
            p.maxima_u.push_back(p.u[i]);
            p.maxima_x.push_back(g.x(i));
        }
    return p;
}

}  // namespace martinet::semiclassical
