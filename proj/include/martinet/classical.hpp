#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "martinet/elliptic.hpp"
#include "martinet/errors.hpp"
#include "martinet/quadrature.hpp"
#include "martinet/roots.hpp"

namespace martinet::classical {

/// Classical point (varsigma, xi) for the effective Hamiltonians.
struct PhaseState {
    double varsigma = 0.0;
    double xi = 0.0;
};

enum class OrbitBranch { single, left_well, right_well, homoclinic, equilibrium };

/// An E = 1 orbit of H_eta^j(varsigma, xi) = xi^2 + (eta + (-1)^j varsigma^2)^2.
/// For (-1)^j eta < -1 the shell splits into two wells; `branch` selects one.
struct OrbitSpec {
    int jmath = 0;
    double eta = 0.0;
    double energy = 1.0;
    OrbitBranch branch = OrbitBranch::single;

    /// Reduced parameter eta' = (-1)^j eta; the (varsigma, xi) orbit of H_eta^j
    /// coincides with the j = 0 orbit at eta'.
    double eta_reduced() const { return (jmath % 2 == 0) ? eta : -eta; }

    void validate() const {
        if (jmath != 0 && jmath != 1) throw domain_error("OrbitSpec: jmath must be 0 or 1");
        if (!(energy > 0.0)) throw domain_error("OrbitSpec: energy must be positive");
        const double ep = eta_reduced();
        const bool two_wells = ep < -1.0;
        switch (branch) {
            case OrbitBranch::single:
                if (two_wells)
                    throw domain_error("OrbitSpec: E=1 shell splits into two wells for eta' < -1");
                break;
            case OrbitBranch::left_well:
            case OrbitBranch::right_well:
                if (!two_wells)
                    throw domain_error("OrbitSpec: well branches require eta' < -1");
                break;
            case OrbitBranch::homoclinic:
                if (ep != -1.0) throw domain_error("OrbitSpec: homoclinic set requires eta' = -1");
                break;
            case OrbitBranch::equilibrium:
                break;
        }
    }
};

inline double hamiltonian(int jmath, double eta, const PhaseState& s) {
    const double sign = (jmath % 2 == 0) ? 1.0 : -1.0;
    const double w = eta + sign * s.varsigma * s.varsigma;
    return s.xi * s.xi + w * w;
}

struct FlowResult {
    PhaseState state;
    double energy_drift = 0.0;    // |H(end) - H(start)|
    double drift_constant = 0.0;  // energy_drift / (dt^2 t)
};

namespace detail {

// Hamilton's equations for H = xi^2 + (eta' + varsigma^2)^2 in reduced form:
//   d(varsigma)/dt = 2 xi,   d(xi)/dt = -4 varsigma (eta' + varsigma^2).
inline double force(double ep, double varsigma) {
    return -4.0 * varsigma * (ep + varsigma * varsigma);
}

/// One Stormer-Verlet (leapfrog) step.
inline PhaseState sv_step(double ep, const PhaseState& s, double dt) {
    PhaseState r = s;
    double xi_half = r.xi + 0.5 * dt * force(ep, r.varsigma);
    r.varsigma += dt * 2.0 * xi_half;
    r.xi = xi_half + 0.5 * dt * force(ep, r.varsigma);
    return r;
}

}  // namespace detail

/// Advance (varsigma, xi) by time t with a fixed-step Stormer-Verlet scheme.
inline FlowResult flow(const OrbitSpec& spec, const PhaseState& s0, double t, double dt) {
    if (!(dt > 0.0)) throw domain_error("flow: dt must be positive");
    const double ep = spec.eta_reduced();
    const double h0 = hamiltonian(0, ep, s0);
    PhaseState s = s0;
    double remaining = std::abs(t);
    while (remaining > 0.0) {
        const double d = std::min(dt, remaining);
        s = detail::sv_step(ep, s, (t >= 0.0) ? d : -d);
        remaining -= d;
    }
    FlowResult r;
    r.state = s;
    r.energy_drift = std::abs(hamiltonian(0, ep, s) - h0);
    r.drift_constant = (t != 0.0) ? r.energy_drift / (dt * dt * std::abs(t)) : 0.0;
    if (!(r.energy_drift <= 1e-3))  // NaN-safe: a blown-up trajectory must throw
        throw solver_error("flow: energy drift " + std::to_string(r.energy_drift) +
                           " over t = " + std::to_string(t) + "; reduce dt");
    return r;
}

/// Closed-form full period of the E = 1 orbit:
///   sqrt(2) K(sqrt((1-eta')/2))              for eta' in (-1, 1],
///   K(sqrt(2/(1-eta'))) / sqrt(1-eta')       for eta' < -1 (either well).
/// The two-well prefactor is pinned by ODE event detection of the full
/// return time; it is one quarter of the pseudo-time integral of 1/varsigma.
inline double period(const OrbitSpec& spec) {
    spec.validate();
    if (spec.energy != 1.0) throw domain_error("period: only the E = 1 shell is supported");
    const double ep = spec.eta_reduced();
    if (ep == -1.0) throw solver_error("period: divergent period on the homoclinic set");
    if (ep > 1.0) throw domain_error("period: E = 1 shell is empty for eta' > 1");
    if (ep > -1.0) return std::sqrt(2.0) * ellip_K(std::sqrt(0.5 * (1.0 - ep)));
    return ellip_K(std::sqrt(2.0 / (1.0 - ep))) / std::sqrt(1.0 - ep);
}

/// Event-detected period: integrate from the outer turning point and find the
/// first return crossing of the Poincare section xi = 0 with the starting
/// orientation. Crossing times are refined by bisection on partial steps.
inline double period_ode(const OrbitSpec& spec, int steps_per_period = 65536) {
    spec.validate();
    if (spec.energy != 1.0) throw domain_error("period_ode: only the E = 1 shell is supported");
    const double ep = spec.eta_reduced();
    if (ep == -1.0) throw solver_error("period_ode: divergent period on the homoclinic set");
    if (ep >= 1.0) throw domain_error("period_ode: degenerate orbit at eta' >= 1");

    const double s0 = std::sqrt(1.0 - ep);  // outer turning point, xi = 0
    const double T_est = period(spec);
    const double dt = T_est / steps_per_period;
    PhaseState s{(spec.branch == OrbitBranch::left_well) ? -s0 : s0, 0.0};
    const double orient = detail::force(ep, s.varsigma);  // sign of dxi/dt at start

    double t = 0.0;
    PhaseState prev = s;
    for (long step = 0; step < 4L * steps_per_period; ++step) {
        prev = s;
        s = detail::sv_step(ep, s, dt);
        t += dt;
        const bool crossing = (prev.xi > 0.0) && (s.xi <= 0.0);
        const bool matches = orient < 0.0;  // falling crossings match a falling start
        const bool crossing_up = (prev.xi < 0.0) && (s.xi >= 0.0);
        if ((matches && crossing) || (!matches && crossing_up)) {
            // refine within [t - dt, t] by bisection on a partial step from prev
            double lo = 0.0, hi = dt;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double xi_mid = detail::sv_step(ep, prev, mid).xi;
                if ((xi_mid > 0.0) == (prev.xi > 0.0))
                    lo = mid;
                else
                    hi = mid;
            }
            return t - dt + 0.5 * (lo + hi);
        }
    }
    throw solver_error("period_ode: no section return detected");
}

/// Time average (1/T) \oint f dt over the E = 1 orbit, computed in the
/// auxiliary parameterization varsigma(s) = sqrt(cos s - eta'), xi(s) = -sin s
/// with weight ds / varsigma(s); the arc is completed to the full orbit by
/// reflection symmetry. The single-well endpoint singularity is removed by
/// the substitution u = sqrt(Tcal - s). Homoclinic and degenerate shells
/// collapse to the equilibrium value f(0, 0).
inline double orbit_average(const OrbitSpec& spec,
                            const std::function<double(const PhaseState&)>& f) {
    spec.validate();
    if (spec.energy != 1.0) throw domain_error("orbit_average: only the E = 1 shell is supported");
    const double ep = spec.eta_reduced();
    if (ep > 1.0) throw domain_error("orbit_average: E = 1 shell is empty for eta' > 1");
    if (ep == 1.0 || ep == -1.0 || spec.branch == OrbitBranch::homoclinic ||
        spec.branch == OrbitBranch::equilibrium)
        return f({0.0, 0.0});

    if (ep > -1.0) {
        // one orbit, symmetric under both reflections: quarter arc suffices
        const double Tcal = std::acos(ep);
        auto fsym = [&](double v, double xi) {
            return 0.25 * (f({v, xi}) + f({-v, xi}) + f({v, -xi}) + f({-v, -xi}));
        };
        auto varsigma = [&](double u) {
            // cos(Tcal - u^2) - ep, written to survive cancellation at u -> 0
            const double c = 2.0 * std::sin(Tcal - 0.5 * u * u) * std::sin(0.5 * u * u);
            return std::sqrt(std::max(c, 0.0));
        };
        auto make = [&](bool weight_only) {
            return [&, weight_only](double u) {
                const double s = Tcal - u * u;
                const double vs = varsigma(u);
                const double base = 2.0 * u / vs;
                return weight_only ? base : base * fsym(vs, -std::sin(s));
            };
        };
        const double ub = std::sqrt(Tcal);
        const double num = integrate(make(false), 0.0, ub, 1e-13);
        const double den = integrate(make(true), 0.0, ub, 1e-13);
        return num / den;
    }

    // two wells: the arc s in [0, pi] covers the lower half of one well orbit;
    // complete by the xi reflection, mirror varsigma for the left well
    const double mirror = (spec.branch == OrbitBranch::left_well) ? -1.0 : 1.0;
    auto fsym = [&](double v, double xi) { return 0.5 * (f({v, xi}) + f({v, -xi})); };
    auto make = [&](bool weight_only) {
        return [&, weight_only](double s) {
            const double vs = std::sqrt(std::cos(s) - ep);
            const double base = 1.0 / vs;
            return weight_only ? base : base * fsym(mirror * vs, -std::sin(s));
        };
    };
    const double num = integrate(make(false), 0.0, M_PI, 1e-13);
    const double den = integrate(make(true), 0.0, M_PI, 1e-13);
    return num / den;
}

/// Closed-form Upsilon_j(eta) = Upsilon((-1)^j eta), the orbit average of
/// eta' + varsigma^2 on the E = 1 shell (Upsilon(1) = 1 normalization):
///   2E(k)/K(k) - 1,            k = sqrt((1-eta')/2),  eta' in (-1, 1],
///   -1,                         eta' = -1,
///   (1-eta') E(k)/K(k) + eta',  k = sqrt(2/(1-eta')), eta' < -1.
/// The two-well branch follows from cos(s) = (cos(s) - eta') + eta' and the
/// half-angle reduction of the arc integrals:
///   int_0^pi sqrt(cos s - eta') ds = 2 sqrt(1-eta') E(k),
///   int_0^pi ds / sqrt(cos s - eta') = (2/sqrt(1-eta')) K(k);
/// it matches the ODE flow average (the 2E/K + k^2 - 2 form seen in print
/// does not reproduce either integral).
inline double upsilon(int jmath, double eta) {
    if (jmath != 0 && jmath != 1) throw domain_error("upsilon: jmath must be 0 or 1");
    const double ep = (jmath == 0) ? eta : -eta;
    if (ep > 1.0)
        throw domain_error("upsilon: (-1)^j eta = " + std::to_string(ep) +
                           " > 1, off the E = 1 shell");
    if (ep == -1.0) return -1.0;
    if (ep == 1.0) return 1.0;
    if (ep > -1.0) {
        const double k = std::sqrt(0.5 * (1.0 - ep));
        return 2.0 * ellip_E(k) / ellip_K(k) - 1.0;
    }
    const double k = std::sqrt(2.0 / (1.0 - ep));
    return (1.0 - ep) * ellip_E(k) / ellip_K(k) + ep;
}

/// Flow-average route to Upsilon: the orbit average of eta' + varsigma^2.
inline double upsilon_bruteforce(int jmath, double eta) {
    if (jmath != 0 && jmath != 1) throw domain_error("upsilon_bruteforce: jmath must be 0 or 1");
    const double ep = (jmath == 0) ? eta : -eta;
    if (ep > 1.0) throw domain_error("upsilon_bruteforce: off the E = 1 shell");
    OrbitSpec spec;
    spec.jmath = 0;
    spec.eta = ep;
    spec.branch = (ep < -1.0) ? OrbitBranch::right_well
                              : (ep == -1.0 ? OrbitBranch::homoclinic : OrbitBranch::single);
    return orbit_average(spec, [&](const PhaseState& s) { return ep + s.varsigma * s.varsigma; });
}

struct EtaStar {
    double eta_star = 0.0;
    double upsilon_prime = 0.0;  // central difference, asserted nonzero
};

/// The unique root of Upsilon on (-1, 1).
inline EtaStar eta_star() {
    auto f = [](double e) { return upsilon(0, e); };
    EtaStar r;
    r.eta_star = find_root(f, -0.999, 0.999, 1e-12);
    const double d = 1e-5;
    r.upsilon_prime = (f(r.eta_star + d) - f(r.eta_star - d)) / (2.0 * d);
    if (std::abs(r.upsilon_prime) < 1e-6)
        throw solver_error("eta_star: Upsilon'(eta*) vanished; elliptic branch bug");
    return r;
}

/// Harmonic levels nu_j(sigma) = |sigma| (2j + 1), j = 0..jmax.
inline std::vector<double> harmonic_levels(double sigma, int jmax) {
    if (sigma == 0.0) throw domain_error("harmonic_levels: sigma must be nonzero");
    if (jmax < 0) throw domain_error("harmonic_levels: jmax must be >= 0");
    std::vector<double> out(jmax + 1);
    for (int j = 0; j <= jmax; ++j) out[j] = std::abs(sigma) * (2.0 * j + 1.0);
    return out;
}

}  // namespace martinet::classical
