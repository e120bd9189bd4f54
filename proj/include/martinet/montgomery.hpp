#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <tuple>
#include <vector>

#include "martinet/banded.hpp"
#include "martinet/errors.hpp"
#include "martinet/grid.hpp"
#include "martinet/roots.hpp"

namespace martinet::montgomery {

/// One eigenpair of H_mu = D_x^2 + (mu + x^2)^2. `vector` holds samples of
/// phi_k on the interior grid, L2-normalized under the trapezoid weight
/// (sum phi^2 dx = 1); index k starts at 1.
struct EigenPair {
    int k = 0;
    double value = 0.0;
    std::vector<double> vector;
    double residual = 0.0;
};

struct EigencurveSample {
    double mu = 0.0;
    int k = 0;
    double value = 0.0;
    double derivative = 0.0;  // dLambda_k/dmu via Hellmann-Feynman
};

struct SolveOptions {
    int points = 2048;
    int order = 2;
    bool richardson = true;  // extrapolate values over dx (order-2 stencil)
    double safety = 4.0;     // V(L) >= safety * largest requested eigenvalue
    double residual_tol = 1e-6;
    double gap_tol = 1e-9;   // below this, eigenpairs reports a degeneracy
};

/// Discretized Schrodinger operator -d^2/dx^2 + (eta + x^2 zeta)^2 with
/// Dirichlet ends, central differences at the grid's order.
inline SymmetricBanded build_schrodinger(double eta, double zeta, const GridSpec& g) {
    g.validate_basic();
    const int n = g.points;
    const double dx = g.dx();
    const double idx2 = 1.0 / (dx * dx);
    SymmetricBanded A = SymmetricBanded::zero(n, g.order == 4 ? 2 : 1);
    for (int i = 0; i < n; ++i) {
        const double x = g.x(i);
        const double w = eta + x * x * zeta;
        A.diag[i] = w * w;
    }
    if (g.order == 2) {
        for (int i = 0; i < n; ++i) A.diag[i] += 2.0 * idx2;
        for (int i = 0; i + 1 < n; ++i) A.band[0][i] = -idx2;
    } else {
        for (int i = 0; i < n; ++i) A.diag[i] += 2.5 * idx2;
        for (int i = 0; i + 1 < n; ++i) A.band[0][i] = -4.0 / 3.0 * idx2;
        for (int i = 0; i + 2 < n; ++i) A.band[1][i] = idx2 / 12.0;
    }
    return A;
}

/// The Montgomery operator H_mu itself (zeta = 1).
inline SymmetricBanded build_hamiltonian(double mu, const GridSpec& g) {
    return build_schrodinger(mu, 1.0, g);
}

namespace detail {

struct SolveKey {
    double eta, zeta, L;
    int n, order;
    bool operator<(const SolveKey& o) const {
        return std::tie(eta, zeta, L, n, order) < std::tie(o.eta, o.zeta, o.L, o.n, o.order);
    }
};

struct RawSolve {
    std::vector<double> values;
    std::vector<std::vector<double>> vectors;  // unit l2 vectors; empty if not requested
};

class SolveCache {
public:
    std::shared_ptr<const RawSolve> get(const SolveKey& key, int kmax, bool vectors) {
        {
            std::shared_lock lk(mu_);
            auto it = map_.find(key);
            if (it != map_.end() && static_cast<int>(it->second->values.size()) >= kmax &&
                (!vectors || !it->second->vectors.empty()))
                return it->second;
        }
        return nullptr;
    }
    void put(const SolveKey& key, std::shared_ptr<const RawSolve> val) {
        std::unique_lock lk(mu_);
        auto it = map_.find(key);
        if (it == map_.end() || it->second->values.size() < val->values.size() ||
            (it->second->vectors.empty() && !val->vectors.empty()))
            map_[key] = std::move(val);
    }
    void clear() {
        std::unique_lock lk(mu_);
        map_.clear();
    }

private:
    std::shared_mutex mu_;
    std::map<SolveKey, std::shared_ptr<const RawSolve>> map_;
};

inline SolveCache& cache() {
    static SolveCache c;
    return c;
}

/// Raw grid eigensolve of D^2 + (eta + x^2 zeta)^2, cached.
inline std::shared_ptr<const RawSolve> raw_solve(double eta, double zeta, const GridSpec& g,
                                                 int kmax, bool vectors) {
    const SolveKey key{eta, zeta, g.half_width, g.points, g.order};
    if (auto hit = cache().get(key, kmax, vectors)) return hit;

    const SymmetricBanded A = build_schrodinger(eta, zeta, g);
    auto out = std::make_shared<RawSolve>();
    out->values = banded_eigenvalues(A, kmax);
    if (vectors) {
        out->vectors.reserve(kmax);
        for (int k = 0; k < kmax; ++k) {
            std::vector<std::vector<double>> orth;
            for (int m = 0; m < k; ++m)
                if (out->values[k] - out->values[m] < 1e-3 * (1.0 + std::abs(out->values[k])))
                    orth.push_back(out->vectors[m]);
            // the potential is even in x, so the k-th state has parity (-1)^{k-1};
            // the hint keeps tunneling doublets from mixing
            out->vectors.push_back(
                inverse_iteration(A, out->values[k], orth, (k % 2 == 0) ? +1 : -1));
        }
    }
    cache().put(key, out);
    return out;
}

inline void fix_sign(std::vector<double>& v) {
    double maxabs = 0.0;
    for (double t : v) maxabs = std::max(maxabs, std::abs(t));
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        const double a = std::abs(v[i]);
        if (a >= std::abs(v[i - 1]) && a >= std::abs(v[i + 1]) && a > 0.1 * maxabs) {
            if (v[i] < 0.0)
                for (double& t : v) t = -t;
            return;
        }
    }
}

inline GridSpec solver_grid(double eta, double zeta, int kmax, const SolveOptions& opt) {
    const double az = std::abs(zeta);
    const double mu_eff = eta * (zeta > 0 ? 1.0 : -1.0) / std::pow(az, 1.0 / 3.0);
    const double quartic = 2.5 * std::pow(kmax + 1.0, 4.0 / 3.0);
    const double est = std::pow(az, 2.0 / 3.0) *
                       (quartic + mu_eff * mu_eff +
                        2.0 * std::sqrt(std::abs(mu_eff)) * (2.0 * kmax + 1.0));
    return GridSpec{auto_half_width(eta, zeta, est, opt.safety), opt.points, opt.order};
}

/// Grid eigenvalues with optional Richardson extrapolation over dx. The grid
/// is auto-sized; if the solved values turn out too close to the boundary
/// potential, the domain is regrown and the solve repeated.
inline std::vector<double> extrapolated_values(double eta, double zeta, int kmax,
                                               const SolveOptions& opt) {
    GridSpec g = solver_grid(eta, zeta, kmax, opt);
    for (int attempt = 0; attempt < 4; ++attempt) {
        auto fine = raw_solve(eta, zeta, g, kmax, false);
        const double wL = eta + g.half_width * g.half_width * zeta;
        if (wL * wL < opt.safety * fine->values[kmax - 1]) {
            g.half_width *= 1.5;
            continue;
        }
        if (!opt.richardson) return fine->values;
        GridSpec gc{g.half_width, g.points / 2, g.order};
        auto coarse = raw_solve(eta, zeta, gc, kmax, false);
        const double r = gc.dx() / g.dx();
        const double r2 = r * r;
        std::vector<double> vals(kmax);
        for (int k = 0; k < kmax; ++k)
            vals[k] = (r2 * fine->values[k] - coarse->values[k]) / (r2 - 1.0);
        return vals;
    }
    throw solver_error("extrapolated_values: domain regrowth failed to clear V(L)");
}

}  // namespace detail

inline void clear_cache() { detail::cache().clear(); }

/// Lambda_k(mu) for k = 1..kmax on the production auto grid.
inline std::vector<double> lambda_values(double mu, int kmax, const SolveOptions& opt = {}) {
    if (kmax < 1) throw domain_error("lambda_values: kmax must be >= 1");
    return detail::extrapolated_values(mu, 1.0, kmax, opt);
}

inline double lambda_value(double mu, int k, const SolveOptions& opt = {}) {
    return lambda_values(mu, k, opt)[k - 1];
}

/// First kmax eigenpairs on a caller-supplied grid, sorted ascending, with the
/// sign convention phi_k > 0 at its first extremum from the left.
inline std::vector<EigenPair> eigenpairs(double mu, const GridSpec& g, int kmax,
                                         const SolveOptions& opt = {}) {
    if (kmax < 1) throw domain_error("eigenpairs: kmax must be >= 1");
    if (kmax > g.points / 4)
        throw domain_error("eigenpairs: kmax = " + std::to_string(kmax) +
                           " beyond trusted range N/4 for N = " + std::to_string(g.points));
    const double wL = mu + g.half_width * g.half_width;
    // estimate the top eigenvalue from a cheap value solve to validate clearance
    auto raw = detail::raw_solve(mu, 1.0, g, kmax, true);
    g.validate_for_solve(wL * wL, raw->values[kmax - 1], opt.safety);

    const SymmetricBanded A = build_hamiltonian(mu, g);
    std::vector<EigenPair> out(kmax);
    for (int k = 0; k < kmax; ++k) {
        if (k + 1 < kmax) {
            const double gap = raw->values[k + 1] - raw->values[k];
            if (gap < opt.gap_tol)
                throw solver_error("eigenpairs: near-degenerate pair Lambda_" +
                                   std::to_string(k + 1) + " = " + std::to_string(raw->values[k]) +
                                   ", Lambda_" + std::to_string(k + 2) + " = " +
                                   std::to_string(raw->values[k + 1]) +
                                   " (gap below tolerance; grid too coarse, true spectrum is simple)");
        }
        EigenPair& p = out[k];
        p.k = k + 1;
        p.value = raw->values[k];
        p.vector = raw->vectors[k];
        detail::fix_sign(p.vector);
        std::vector<double> Av;
        A.apply(p.vector, Av);
        double r2 = 0.0;
        for (int i = 0; i < g.points; ++i) {
            const double d = Av[i] - p.value * p.vector[i];
            r2 += d * d;
        }
        p.residual = std::sqrt(r2);
        if (p.residual > opt.residual_tol)
            throw solver_error("eigenpairs: residual " + std::to_string(p.residual) +
                               " above tolerance for k = " + std::to_string(k + 1));
        // report in trapezoid-weight normalization
        const double s = 1.0 / std::sqrt(g.dx());
        for (double& t : p.vector) t *= s;
    }
    return out;
}

/// Hellmann-Feynman derivative on a fixed grid:
///   dLambda_k/dmu = 2 * integral (mu + x^2) |phi_k|^2 dx,
/// which is the exact derivative of the discrete eigenvalue.
inline double hf_derivative_on_grid(double mu, int k, const GridSpec& g) {
    auto raw = detail::raw_solve(mu, 1.0, g, k, true);
    const auto& v = raw->vectors[k - 1];
    double s = 0.0;
    for (int i = 0; i < g.points; ++i) {
        const double x = g.x(i);
        s += (mu + x * x) * v[i] * v[i];
    }
    return 2.0 * s;  // unit l2 vector: the dx weights cancel
}

/// Production Hellmann-Feynman derivative: Richardson-extrapolated over dx.
inline double hf_derivative(double mu, int k, const SolveOptions& opt = {}) {
    GridSpec g = detail::solver_grid(mu, 1.0, k, opt);
    const double fine = hf_derivative_on_grid(mu, k, g);
    if (!opt.richardson) return fine;
    GridSpec gc{g.half_width, g.points / 2, g.order};
    const double coarse = hf_derivative_on_grid(mu, k, gc);
    const double r = gc.dx() / g.dx(), r2 = r * r;
    return (r2 * fine - coarse) / (r2 - 1.0);
}

struct CriticalPoint {
    double mu_star = 0.0;
    double value = 0.0;              // Lambda_k(mu_star)
    double second_derivative = 0.0;  // Lambda_k''(mu_star) > 0 asserted
};

/// Critical point of Lambda_k located as the bracketed root of the
/// Hellmann-Feynman derivative; nondegeneracy (positive curvature) asserted.
inline CriticalPoint critical_point(int k, double bracket_lo = -3.0, double bracket_hi = 1.0,
                                    const SolveOptions& opt = {}) {
    auto dfun = [&](double mu) { return hf_derivative(mu, k, opt); };
    const double flo = dfun(bracket_lo), fhi = dfun(bracket_hi);
    if ((flo > 0.0) == (fhi > 0.0))
        throw solver_error("critical_point: no sign change of dLambda/dmu on bracket [" +
                           std::to_string(bracket_lo) + ", " + std::to_string(bracket_hi) + "]");
    CriticalPoint cp;
    cp.mu_star = find_root(dfun, bracket_lo, bracket_hi, 1e-10);
    const double d = 1e-3;
    cp.second_derivative = (dfun(cp.mu_star + d) - dfun(cp.mu_star - d)) / (2.0 * d);
    if (!(cp.second_derivative > 0.0))
        throw solver_error("critical_point: nondegeneracy violated, Lambda_k'' = " +
                           std::to_string(cp.second_derivative));
    cp.value = lambda_value(cp.mu_star, k, opt);
    if (!(cp.value < lambda_value(bracket_lo, k, opt)) ||
        !(cp.value < lambda_value(bracket_hi, k, opt)))
        throw solver_error("critical_point: value fails global-minimum consistency on bracket");
    return cp;
}

struct EigvecDerivative {
    std::vector<double> dphi;           // d phi_k / d mu, trapezoid-normalized grid samples
    double residual = 0.0;              // || 2(w - <w>) phi - (Lambda - H) dphi ||
    std::vector<double> residual_decay; // residual at mmax/4, mmax/2, mmax
};

/// d(phi_k)/d(mu) by first-order perturbation over the grid eigenbasis:
///   sum_{m != k} <2(mu+x^2) phi_k, phi_m> / (Lambda_k - Lambda_m) phi_m.
/// The cohomological residual is checked against the discrete operator.
inline EigvecDerivative eigvec_derivative(double mu, int k, const GridSpec& g, int mmax,
                                          double residual_tol = 1e-5) {
    if (k > mmax) throw domain_error("eigvec_derivative: need k <= mmax");
    auto raw = detail::raw_solve(mu, 1.0, g, mmax, true);
    const int n = g.points;
    const auto& vals = raw->values;
    auto phi = raw->vectors[k - 1];
    detail::fix_sign(phi);

    std::vector<double> target(n);  // 2 w phi_k, w = mu + x^2
    double mean_w = 0.0;
    for (int i = 0; i < n; ++i) {
        const double w = mu + g.x(i) * g.x(i);
        target[i] = 2.0 * w * phi[i];
        mean_w += w * phi[i] * phi[i];
    }

    const SymmetricBanded A = build_hamiltonian(mu, g);
    std::vector<double> dphi(n, 0.0), Ad, rhs(n);
    for (int i = 0; i < n; ++i) rhs[i] = target[i] - 2.0 * mean_w * phi[i];

    EigvecDerivative out;
    auto residual_at = [&]() {
        A.apply(dphi, Ad);
        double r2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = rhs[i] - (vals[k - 1] * dphi[i] - Ad[i]);
            r2 += d * d;
        }
        return std::sqrt(r2);
    };

    for (int m = 0; m < mmax; ++m) {
        if (m == k - 1) continue;
        auto vm = raw->vectors[m];
        detail::fix_sign(vm);
        double c = 0.0;
        for (int i = 0; i < n; ++i) c += target[i] * vm[i];
        c /= (vals[k - 1] - vals[m]);
        for (int i = 0; i < n; ++i) dphi[i] += c * vm[i];
        if (m + 1 == mmax / 4 || m + 1 == mmax / 2) out.residual_decay.push_back(residual_at());
    }
    out.residual = residual_at();
    out.residual_decay.push_back(out.residual);
    if (out.residual > residual_tol) {
        std::string curve;
        for (double r : out.residual_decay) curve += " " + std::to_string(r);
        throw solver_error("eigvec_derivative: residual " + std::to_string(out.residual) +
                           " above tolerance after mmax = " + std::to_string(mmax) +
                           " terms; decay curve:" + curve);
    }
    const double s = 1.0 / std::sqrt(g.dx());
    out.dphi = std::move(dphi);
    for (double& t : out.dphi) t *= s;
    return out;
}

/// Eigencurve sweep over mu for the CSV export `mu,k,lambda,dlambda_dmu`.
inline std::vector<EigencurveSample> eigencurve(double mu_min, double mu_max, int steps, int k,
                                                const SolveOptions& opt = {}) {
    if (steps < 1 || mu_max < mu_min) throw domain_error("eigencurve: bad sweep range");
    std::vector<EigencurveSample> rows;
    rows.reserve(steps + 1);
    for (int i = 0; i <= steps; ++i) {
        const double mu = mu_min + (mu_max - mu_min) * i / steps;
        EigencurveSample s;
        s.mu = mu;
        s.k = k;
        s.value = lambda_value(mu, k, opt);
        s.derivative = hf_derivative(mu, k, opt);
        rows.push_back(s);
    }
    return rows;
}

}  // namespace martinet::montgomery
