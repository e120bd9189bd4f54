#pragma once

// The invariant suite behind `martinet selftest`: every module invariant,
// evaluated at production settings with one pass/fail row per invariant.

#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "martinet/classical.hpp"
#include "martinet/elliptic.hpp"
#include "martinet/io.hpp"
#include "martinet/montgomery.hpp"
#include "martinet/parallel.hpp"
#include "martinet/quadrature.hpp"
#include "martinet/semiclassical.hpp"
#include "martinet/spectrum.hpp"

namespace martinet::selftest {

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

namespace detail {

inline std::string num(double v) { return io::full_precision(v); }

}  // namespace detail

inline std::vector<Check> run_all(int threads = 1) {
    std::vector<Check> out;
    auto add = [&](const std::string& name, bool pass, const std::string& detail) {
        out.push_back({name, pass, detail});
    };

    // --- elliptic ---
    {
        double worst = 0.0;
        for (int i = 1; i <= 20; ++i) {
            const double k = i / 21.0;
            const double Kq = integrate(
                [k](double t) {
                    const double s = std::sin(t);
                    return 1.0 / std::sqrt(1.0 - k * k * s * s);
                },
                0.0, M_PI / 2.0);
            const double Eq = integrate(
                [k](double t) {
                    const double s = std::sin(t);
                    return std::sqrt(1.0 - k * k * s * s);
                },
                0.0, M_PI / 2.0);
            worst = std::max(worst, std::abs(ellip_K(k) - Kq) / Kq);
            worst = std::max(worst, std::abs(ellip_E(k) - Eq) / Eq);
        }
        add("elliptic/agm_vs_quadrature", worst <= 1e-10, "max rel diff " + detail::num(worst));

        double legendre = 0.0;
        for (double k : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            const double kp = std::sqrt(1.0 - k * k);
            legendre = std::max(legendre,
                                std::abs(ellip_E(k) * ellip_K(kp) + ellip_E(kp) * ellip_K(k) -
                                         ellip_K(k) * ellip_K(kp) - M_PI / 2.0));
        }
        add("elliptic/legendre_relation", legendre <= 1e-10, "max residual " + detail::num(legendre));

        bool mono = true;
        const double ks[] = {0.0, 0.2, 0.5, 0.8, 0.9, 0.999};
        for (std::size_t i = 1; i < std::size(ks); ++i)
            mono = mono && ellip_K(ks[i]) > ellip_K(ks[i - 1]) &&
                   ellip_E(ks[i]) < ellip_E(ks[i - 1]);
        add("elliptic/monotonicity", mono, "K increasing, E decreasing on ascending grid");
    }

    // --- montgomery ---
    {
        const double truth = 1.06036209048418;
        double e_prev = 0.0;
        bool second_order = true;
        for (int n : {256, 512, 1024}) {
            const GridSpec g{4.5, n, 2};
            const double err =
                std::abs(montgomery::detail::raw_solve(0.0, 1.0, g, 1, false)->values[0] - truth);
            if (e_prev > 0.0) second_order = second_order && (e_prev / err >= 3.9);
            e_prev = err;
        }
        add("montgomery/second_order_convergence", second_order,
            "error ratio >= 3.9 under grid doubling");

        double min_gap = 1e9;
        for (double mu : {-2.0, -1.0, 0.0, 1.0}) {
            const auto v = montgomery::lambda_values(mu, 9);
            for (int k = 0; k + 1 < 9; ++k) min_gap = std::min(min_gap, v[k + 1] - v[k]);
        }
        add("montgomery/simplicity_gaps", min_gap > 0.1, "min gap " + detail::num(min_gap));

        double worst = 0.0;
        for (double mu : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
            const double h = 1e-4;
            const double fd =
                (montgomery::lambda_value(mu + h, 1) - montgomery::lambda_value(mu - h, 1)) /
                (2.0 * h);
            worst = std::max(worst, std::abs(montgomery::hf_derivative(mu, 1) - fd) /
                                        std::max(1.0, std::abs(fd)));
        }
        add("montgomery/hellmann_feynman_vs_fd", worst <= 1e-5, "max rel diff " + detail::num(worst));

        bool blowup = true;
        for (int k : {1, 2}) {
            blowup = blowup &&
                     montgomery::lambda_value(-8.0, k) > montgomery::lambda_value(-4.0, k) &&
                     montgomery::lambda_value(-4.0, k) > montgomery::lambda_value(-2.0, k) &&
                     montgomery::lambda_value(8.0, k) > montgomery::lambda_value(4.0, k) &&
                     montgomery::lambda_value(4.0, k) > montgomery::lambda_value(2.0, k);
        }
        add("montgomery/eigenvalue_blowup_both_sides", blowup,
            "Lambda_k monotone outward on {+-2, +-4, +-8}");
    }

    // --- spectrum ---
    {
        struct Case {
            double eta, zeta;
            int k;
        };
        std::vector<Case> cases;
        for (double eta : {-1.0, 0.0, 0.7})
            for (double zeta : {0.5, 1.0, 2.0})
                for (int k : {1, 2}) cases.push_back({eta, zeta, k});
        std::vector<double> diffs(cases.size());
        parallel_for(cases.size(), threads, [&](std::size_t i) {
            const spectrum::MartinetParams p{cases[i].eta, cases[i].zeta, cases[i].k};
            const double direct = spectrum::lambda_direct(p);
            diffs[i] = std::abs(spectrum::lambda(p) - direct) / direct;
        });
        const double worst = *std::max_element(diffs.begin(), diffs.end());
        add("spectrum/scaling_vs_direct", worst <= 1e-6, "max rel diff " + detail::num(worst));

        double homog = 0.0;
        for (double s : {0.5, 2.0, 5.0})
            homog = std::max(homog, spectrum::homogeneity_check({0.3, 1.0, 1}, s));
        add("spectrum/homogeneity", homog <= 1e-10, "max rel defect " + detail::num(homog));

        double level = 0.0, energy_id = 0.0;
        for (int j : {1, 2, 4, 8, 16, 32}) {
            const auto r = spectrum::rs_diagnostics({0, j, 1});
            level = std::max(level, r.lambda_residual);
            energy_id = std::max(energy_id, std::abs(r.rs_norms[0] * r.rs_norms[0] +
                                                     r.rs_norms[1] * r.rs_norms[1] - 1.0));
        }
        add("spectrum/level_set_membership", level <= 1e-6, "max |lambda-1| " + detail::num(level));
        add("spectrum/energy_identity", energy_id <= 1e-8, "max defect " + detail::num(energy_id));

        // the main-text scaling matches the direct solve; the appendix display
        // (exponents attached to the other variable) does not
        const spectrum::MartinetParams p{2.0, 3.0, 1};
        const double direct = spectrum::lambda_direct(p);
        const double main_text = spectrum::lambda(p);
        const double appendix =
            std::pow(std::abs(p.eta), 1.0 / 3.0) *
            montgomery::lambda_value(p.zeta / std::pow(std::abs(p.eta), 2.0 / 3.0), 1);
        const bool ok = std::abs(main_text - direct) <= 1e-6 * direct &&
                        std::abs(appendix - direct) > 1e-3 * direct;
        add("spectrum/main_text_formula_not_appendix", ok,
            "direct " + detail::num(direct) + ", main " + detail::num(main_text) + ", appendix " +
                detail::num(appendix));
    }

    // --- classical ---
    {
        double drift = 0.0;
        for (double ep : {-2.0, 0.0, 0.9}) {
            classical::OrbitSpec s;
            s.eta = ep;
            s.branch = ep < -1.0 ? classical::OrbitBranch::right_well
                                 : classical::OrbitBranch::single;
            const double T = classical::period(s);
            const auto r = classical::flow(s, {std::sqrt(1.0 - ep), 0.0}, 100.0 * T, T / 4096.0);
            drift = std::max(drift, r.energy_drift);
        }
        add("classical/energy_conservation", drift <= 1e-8, "max drift " + detail::num(drift));

        double dperiod = 0.0, dups = 0.0;
        for (double ep : {-2.0, -1.2, -0.5, 0.0, 0.5, 0.9}) {
            classical::OrbitSpec s;
            s.eta = ep;
            s.branch = ep < -1.0 ? classical::OrbitBranch::right_well
                                 : classical::OrbitBranch::single;
            dperiod = std::max(dperiod, std::abs(classical::period(s) - classical::period_ode(s)));
            dups = std::max(dups,
                            std::abs(classical::upsilon(0, ep) - classical::upsilon_bruteforce(0, ep)));
        }
        add("classical/period_closed_vs_ode", dperiod <= 1e-6, "max diff " + detail::num(dperiod));
        add("classical/upsilon_closed_vs_flow", dups <= 1e-6, "max diff " + detail::num(dups));

        const bool cont = classical::upsilon(0, -0.99) > -1.0 && classical::upsilon(0, -1.01) > -1.0;
        add("classical/branch_continuity_at_homoclinic", cont,
            "Upsilon(-1 +- 0.01) stays above -1");

        bool jsym = true;
        for (double eta : {-0.9, 0.0, 0.7, 2.0})
            jsym = jsym && classical::upsilon(1, eta) == classical::upsilon(0, -eta);
        add("classical/jmath_symmetry", jsym, "Upsilon_1(eta) = Upsilon_0(-eta) exactly");
    }

    // --- semiclassical ---
    {
        // R-S norms stable under doubling J along (0, j, 1)
        double max_half = 0.0, max_full = 0.0;
        const int J = 16;
        std::vector<spectrum::RegimeReport> reports(J);
        parallel_for(J, threads, [&](std::size_t i) {
            reports[i] = spectrum::rs_diagnostics({0, static_cast<int>(i + 1), 1});
        });
        for (int j = 0; j < J; ++j)
            for (double n : reports[j].rs_norms) {
                if (j < J / 2) max_half = std::max(max_half, n);
                max_full = std::max(max_full, n);
            }
        const double slope = std::log(max_full / max_half) / std::log(2.0);
        add("semiclassical/rs_norms_bounded", slope < 0.05,
            "max " + detail::num(max_full) + ", doubling slope " + detail::num(slope));

        // Husimi outside-mass of the closed 0.2 tube stays bounded along M1
        // (fixed unit window width: the h-rescaling collapses the family onto
        // one phase-space profile, so the masses must be j-independent)
        std::vector<int> js = {8, 16, 32, 64, 128, 256, 512, 1024};
        std::vector<double> outside(js.size());
        parallel_for(js.size(), threads, [&](std::size_t i) {
            semiclassical::HusimiWindow w;
            w.nx = 48;
            w.nxi = 48;
            const auto f = semiclassical::husimi({0, js[i], 1}, w, {}, 1.0);
            outside[i] = 1.0 - semiclassical::shell_masses(f, 0.2).sublevel;
        });
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const int n = static_cast<int>(js.size());
        for (int i = 0; i < n; ++i) {
            const double x = std::log(static_cast<double>(js[i])), y = std::log(outside[i]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double hslope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        add("semiclassical/husimi_outside_mass_bounded", std::abs(hslope) < 0.05,
            "log-fit slope " + detail::num(hslope));
    }

    return out;
}

}  // namespace martinet::selftest
