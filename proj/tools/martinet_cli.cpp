// Batch CLI for the Martinet spectral laboratory. Every subcommand writes
// plot-ready CSV artifacts (17 significant digits) plus a JSON sidecar with
// the effective mathematical configuration, and prints a JSON summary on
// stdout. Exit codes: 0 success, 1 internal invariant failure, 2 bad config.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "martinet/martinet.hpp"
#include "martinet/selftest.hpp"

using json = nlohmann::ordered_json;
using namespace martinet;

namespace {

struct GlobalConfig {
    std::string out_dir;
    int threads = 1;
    std::string format = "csv";
    std::string config_path;
};

std::string default_out_dir() {
    if (const char* env = std::getenv("MARTINET_OUT_DIR")) return env;
    return ".";
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

void ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (!std::filesystem::is_directory(dir))
        throw domain_error("output directory not writable: " + dir);
}

/// Writes the table as CSV (default) or as a JSON array of row objects.
std::string write_table(const GlobalConfig& g, const std::string& stem, const std::string& header,
                        const std::vector<std::vector<std::string>>& rows) {
    ensure_out_dir(g.out_dir);
    if (g.format == "json") {
        std::vector<std::string> cols;
        std::stringstream hs(header);
        std::string col;
        while (std::getline(hs, col, ',')) cols.push_back(col);
        json arr = json::array();
        for (const auto& r : rows) {
            json obj;
            for (std::size_t i = 0; i < r.size(); ++i) obj[cols[i]] = r[i];
            arr.push_back(obj);
        }
        const std::string path = join_path(g.out_dir, stem + ".json");
        io::write_text(path, arr.dump(2) + "\n");
        return path;
    }
    const std::string path = join_path(g.out_dir, stem + ".csv");
    io::write_csv(path, header, rows);
    return path;
}

void write_sidecar(const GlobalConfig& g, const std::string& stem, const std::string& command,
                   const json& math_config, const json& extra = {}) {
    json side;
    side["artifact"] = stem;
    side["command"] = command;
    side["version"] = martinet::version;
    side["config"] = math_config;  // full effective math config; execution
                                   // details (threads, out_dir) live in stdout only
    if (!extra.is_null() && !extra.empty()) side["meta"] = extra;
    io::write_text(join_path(g.out_dir, stem + ".meta.json"), side.dump(2) + "\n");
}

void print_summary(const GlobalConfig& g, const std::string& command, const json& math_config,
                   const std::vector<std::string>& artifacts, const json& headline) {
    json s;
    s["version"] = martinet::version;
    s["command"] = command;
    s["config"] = math_config;
    s["environment"] = {{"threads", g.threads}, {"out_dir", g.out_dir}};
    s["artifacts"] = artifacts;
    s["headline"] = headline;
    s["status"] = "ok";
    std::cout << s.dump(2) << std::endl;
}

// --config accepts a JSON object whose keys mirror the long flags of the
// chosen subcommand; flags given on the command line win. Unknown keys are
// rejected.
void apply_config_file(CLI::App* sub, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw domain_error("cannot read config file: " + path);
    json cfg;
    try {
        in >> cfg;
    } catch (const std::exception& e) {
        throw domain_error(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!cfg.is_object()) throw domain_error("config file must hold a JSON object");
    for (const auto& [key, value] : cfg.items()) {
        CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (opt == nullptr) throw domain_error("unknown config key: " + key);
        if (!opt->empty()) continue;  // command line overrides file values
        std::string text = value.is_string() ? value.get<std::string>() : value.dump();
        opt->add_result(text);
        opt->run_callback();
    }
}

std::vector<std::string> fmt_row(std::initializer_list<double> vals) {
    std::vector<std::string> row;
    for (double v : vals) row.push_back(io::full_precision(v));
    return row;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"martinet: spectral laboratory for the Martinet sub-Laplacian"};
    app.require_subcommand(1);

    GlobalConfig g;
    g.out_dir = default_out_dir();

    // ----- subcommand definitions -----
    struct LambdaCurveArgs {
        int k = 1;
        double mu_min = -3.0, mu_max = 1.0;
        int steps = 80;
        int points = 2048, order = 2;
    } lc;
    struct CriticalArgs {
        int k = 1;
        double lo = -3.0, hi = 1.0;
    } cr;
    struct LevelSetArgs {
        int k = 1;
        double zeta_min = 0.1, zeta_max = 1.6;
        int steps = 15;
    } ls;
    struct UpsilonArgs {
        int jmath = 0;
        double eta_min = -2.0, eta_max = 1.0;
        int steps = 60;
    } up;
    struct PeriodArgs {
        int jmath = 0;
        double eta_min = -2.0, eta_max = 0.95;
        int steps = 30;
    } pe;
    struct SpectrumArgs {
        double emax = 10.0;
        bool diagnostics = true;
    } sp;
    struct RegimeArgs {
        std::string family = "pure";
        double c = 1.0, d = 0.0;
        int k = 1, length = 8;
        std::string modes;  // "n1,n2,k;n1,n2,k;..."
        double drift = 0.01, limit = 0.05;
    } rg;
    struct HusimiArgs {
        int n1 = 0, n2 = 50, k = 1;
        int nx = 120, nxi = 120;
        double x_min = 0.0, x_max = 0.0, xi_min = 0.0, xi_max = 0.0;
    } hu;

    auto add_globals = [&](CLI::App* sub) {
        sub->add_option("--out-dir", g.out_dir, "artifact output directory")
            ->envname("MARTINET_OUT_DIR")
            ->capture_default_str();
        sub->add_option("--threads", g.threads, "worker cap for sweeps (results independent)")
            ->check(CLI::Range(1, 256))
            ->capture_default_str();
        sub->add_option("--format", g.format, "artifact table format")
            ->check(CLI::IsMember({"csv", "json"}))
            ->capture_default_str();
        sub->add_option("--config", g.config_path, "JSON file mirroring the flags");
    };

    CLI::App* c_lambda = app.add_subcommand("lambda-curve", "sweep Lambda_k(mu) with dLambda/dmu");
    c_lambda->add_option("--k", lc.k)->check(CLI::Range(1, 64));
    c_lambda->add_option("--mu-min", lc.mu_min);
    c_lambda->add_option("--mu-max", lc.mu_max);
    c_lambda->add_option("--steps", lc.steps)->check(CLI::Range(1, 100000));
    c_lambda->add_option("--points", lc.points)->check(CLI::Range(64, 65536));
    c_lambda->add_option("--order", lc.order)->check(CLI::IsMember({2, 4}));
    add_globals(c_lambda);

    CLI::App* c_crit = app.add_subcommand("critical-point", "mu*, (eta_j, zeta_j), curvature");
    c_crit->add_option("--k", cr.k)->check(CLI::Range(1, 16));
    c_crit->add_option("--bracket-lo", cr.lo);
    c_crit->add_option("--bracket-hi", cr.hi);
    add_globals(c_crit);

    CLI::App* c_level = app.add_subcommand("level-set", "eta branches of lambda_k = 1 per zeta");
    c_level->add_option("--k", ls.k)->check(CLI::Range(1, 16));
    c_level->add_option("--zeta-min", ls.zeta_min);
    c_level->add_option("--zeta-max", ls.zeta_max);
    c_level->add_option("--steps", ls.steps)->check(CLI::Range(1, 100000));
    add_globals(c_level);

    CLI::App* c_ups = app.add_subcommand("upsilon", "closed form + flow average + eta*");
    c_ups->add_option("--jmath", up.jmath)->check(CLI::IsMember({0, 1}));
    c_ups->add_option("--eta-min", up.eta_min);
    c_ups->add_option("--eta-max", up.eta_max);
    c_ups->add_option("--steps", up.steps)->check(CLI::Range(1, 100000));
    add_globals(c_ups);

    CLI::App* c_per = app.add_subcommand("period", "closed-form vs ODE event-detected periods");
    c_per->add_option("--jmath", pe.jmath)->check(CLI::IsMember({0, 1}));
    c_per->add_option("--eta-min", pe.eta_min);
    c_per->add_option("--eta-max", pe.eta_max);
    c_per->add_option("--steps", pe.steps)->check(CLI::Range(1, 100000));
    add_globals(c_per);

    CLI::App* c_spec = app.add_subcommand("spectrum", "enumerate Sp(Delta_M) up to E_max");
    c_spec->add_option("--emax", sp.emax)->check(CLI::PositiveNumber);
    c_spec->add_flag("--diagnostics,!--no-diagnostics", sp.diagnostics,
                     "attach Rothschild-Stein diagnostics per mode");
    add_globals(c_spec);

    CLI::App* c_reg = app.add_subcommand("regime-scan", "classify a mode sequence");
    c_reg->add_option("--family", rg.family)->check(CLI::IsMember({"pure", "ratio", "list"}));
    c_reg->add_option("--c", rg.c);
    c_reg->add_option("--d", rg.d);
    c_reg->add_option("--k", rg.k)->check(CLI::Range(1, 16));
    c_reg->add_option("--length", rg.length)->check(CLI::Range(8, 512));
    c_reg->add_option("--modes", rg.modes, "explicit list: n1,n2,k;n1,n2,k;...");
    c_reg->add_option("--drift-threshold", rg.drift)->check(CLI::PositiveNumber);
    c_reg->add_option("--limit-threshold", rg.limit)->check(CLI::PositiveNumber);
    add_globals(c_reg);

    CLI::App* c_hus = app.add_subcommand("husimi", "phase-space density of one mode");
    c_hus->add_option("--n1", hu.n1);
    c_hus->add_option("--n2", hu.n2);
    c_hus->add_option("--k", hu.k)->check(CLI::Range(1, 16));
    c_hus->add_option("--nx", hu.nx)->check(CLI::Range(16, 1024));
    c_hus->add_option("--nxi", hu.nxi)->check(CLI::Range(16, 1024));
    c_hus->add_option("--x-min", hu.x_min);
    c_hus->add_option("--x-max", hu.x_max);
    c_hus->add_option("--xi-min", hu.xi_min);
    c_hus->add_option("--xi-max", hu.xi_max);
    add_globals(c_hus);

    CLI::App* c_self = app.add_subcommand("selftest", "run the full invariant suite");
    add_globals(c_self);

    try {
        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            if (e.get_exit_code() == 0) return app.exit(e);  // --help
            std::cerr << "config error: " << e.what() << std::endl;
            return 2;
        }
        CLI::App* sub = app.get_subcommands().front();
        if (!g.config_path.empty()) apply_config_file(sub, g.config_path);

        const std::string cmd = sub->get_name();

        if (cmd == "lambda-curve") {
            if (lc.mu_max < lc.mu_min) throw domain_error("lambda-curve: mu-max < mu-min");
            montgomery::SolveOptions opt;
            opt.points = lc.points;
            opt.order = lc.order;
            std::vector<std::vector<std::string>> rows(lc.steps + 1);
            parallel_for(rows.size(), g.threads, [&](std::size_t i) {
                const double mu = lc.mu_min + (lc.mu_max - lc.mu_min) * i / lc.steps;
                rows[i] = fmt_row({mu, static_cast<double>(lc.k),
                                   montgomery::lambda_value(mu, lc.k, opt),
                                   montgomery::hf_derivative(mu, lc.k, opt)});
            });
            json cfg = {{"k", lc.k},        {"mu_min", lc.mu_min}, {"mu_max", lc.mu_max},
                        {"steps", lc.steps}, {"points", lc.points}, {"order", lc.order},
                        {"format", g.format}};
            const auto path = write_table(g, "lambda_curve", "mu,k,lambda,dlambda_dmu", rows);
            write_sidecar(g, "lambda_curve", cmd, cfg);
            double lmin = 1e300;
            for (auto& r : rows) lmin = std::min(lmin, std::stod(r[2]));
            print_summary(g, cmd, cfg, {path}, {{"rows", rows.size()}, {"min_lambda", lmin}});
        } else if (cmd == "critical-point") {
            const auto cps = spectrum::critical_points(cr.k, {}, cr.lo, cr.hi);
            json cfg = {{"k", cr.k}, {"bracket_lo", cr.lo}, {"bracket_hi", cr.hi}};
            json head;
            head["mu_star"] = cps.pair[0].mu_star;
            head["Lambda_at_star"] = cps.pair[0].Lambda_at_star;
            head["curvature"] = cps.curvature;
            head["eta_0"] = cps.pair[0].eta_j;
            head["zeta_0"] = cps.pair[0].zeta_j;
            head["eta_1"] = cps.pair[1].eta_j;
            head["zeta_1"] = cps.pair[1].zeta_j;
            head["lambda_residual"] = cps.lambda_residual;
            head["deta_residual"] = cps.deta_residual;
            std::vector<std::vector<std::string>> rows;
            for (const auto& p : cps.pair)
                rows.push_back(fmt_row({static_cast<double>(p.jmath), p.eta_j, p.zeta_j, p.mu_star,
                                        p.Lambda_at_star}));
            const auto path =
                write_table(g, "critical_point", "jmath,eta,zeta,mu_star,Lambda_at_star", rows);
            write_sidecar(g, "critical_point", cmd, cfg);
            print_summary(g, cmd, cfg, {path}, head);
        } else if (cmd == "level-set") {
            if (ls.zeta_max < ls.zeta_min) throw domain_error("level-set: zeta-max < zeta-min");
            std::vector<double> zetas;
            for (int i = 0; i <= ls.steps; ++i) {
                const double z = ls.zeta_min + (ls.zeta_max - ls.zeta_min) * i / ls.steps;
                if (z != 0.0) zetas.push_back(z);
            }
            const auto pts = spectrum::level_curve(ls.k, zetas);
            std::vector<std::vector<std::string>> rows;
            for (const auto& p : pts) {
                auto row = fmt_row({static_cast<double>(p.k)});
                row.push_back(p.branch);
                row.push_back(io::full_precision(p.eta));
                row.push_back(io::full_precision(p.zeta));
                rows.push_back(row);
            }
            json cfg = {{"k", ls.k},
                        {"zeta_min", ls.zeta_min},
                        {"zeta_max", ls.zeta_max},
                        {"steps", ls.steps},
                        {"format", g.format}};
            const auto path = write_table(g, "level_set", "k,branch,eta,zeta", rows);
            write_sidecar(g, "level_set", cmd, cfg);
            print_summary(g, cmd, cfg, {path},
                          {{"points", rows.size()}, {"zeta_samples", zetas.size()}});
        } else if (cmd == "upsilon") {
            if (up.eta_max < up.eta_min) throw domain_error("upsilon: eta-max < eta-min");
            std::vector<std::vector<std::string>> rows(up.steps + 1);
            std::vector<double> diffs(up.steps + 1, 0.0);
            parallel_for(rows.size(), g.threads, [&](std::size_t i) {
                const double eta = up.eta_min + (up.eta_max - up.eta_min) * i / up.steps;
                const double ep = (up.jmath == 0) ? eta : -eta;
                const double closed = classical::upsilon(up.jmath, eta);
                double flow = closed;
                if (std::abs(ep + 1.0) > 1e-9) flow = classical::upsilon_bruteforce(up.jmath, eta);
                diffs[i] = std::abs(closed - flow);
                rows[i] = fmt_row(
                    {eta, static_cast<double>(up.jmath), closed, flow, std::abs(closed - flow)});
            });
            const auto root = classical::eta_star();
            json cfg = {{"jmath", up.jmath}, {"eta_min", up.eta_min}, {"eta_max", up.eta_max},
                        {"steps", up.steps}, {"format", g.format}};
            const auto path =
                write_table(g, "upsilon", "eta,jmath,upsilon_closed,upsilon_flow,abs_diff", rows);
            write_sidecar(g, "upsilon", cmd, cfg);
            print_summary(g, cmd, cfg, {path},
                          {{"eta_star", root.eta_star},
                           {"upsilon_prime_at_root", root.upsilon_prime},
                           {"max_abs_diff", *std::max_element(diffs.begin(), diffs.end())}});
        } else if (cmd == "period") {
            if (pe.eta_max < pe.eta_min) throw domain_error("period: eta-max < eta-min");
            std::vector<std::vector<std::string>> rows;
            std::vector<std::vector<std::string>> tmp(pe.steps + 1);
            parallel_for(tmp.size(), g.threads, [&](std::size_t i) {
                const double eta = pe.eta_min + (pe.eta_max - pe.eta_min) * i / pe.steps;
                const double ep = (pe.jmath == 0) ? eta : -eta;
                if (std::abs(ep + 1.0) < 1e-9 || ep >= 1.0) return;  // homoclinic / degenerate
                classical::OrbitSpec s;
                s.jmath = pe.jmath;
                s.eta = eta;
                s.branch = ep < -1.0 ? classical::OrbitBranch::right_well
                                     : classical::OrbitBranch::single;
                const double tc = classical::period(s);
                const double to = classical::period_ode(s);
                tmp[i] = fmt_row({eta, static_cast<double>(pe.jmath), tc, to, std::abs(tc - to)});
            });
            for (auto& r : tmp)
                if (!r.empty()) rows.push_back(std::move(r));
            json cfg = {{"jmath", pe.jmath}, {"eta_min", pe.eta_min}, {"eta_max", pe.eta_max},
                        {"steps", pe.steps}, {"format", g.format}};
            const auto path =
                write_table(g, "period", "eta,jmath,period_closed,period_ode,abs_diff", rows);
            write_sidecar(g, "period", cmd, cfg);
            double worst = 0.0;
            for (auto& r : rows) worst = std::max(worst, std::stod(r[4]));
            print_summary(g, cmd, cfg, {path}, {{"rows", rows.size()}, {"max_abs_diff", worst}});
        } else if (cmd == "spectrum") {
            const auto entries = spectrum::enumerate_spectrum(sp.emax);
            std::vector<std::vector<std::string>> rows(entries.size());
            if (sp.diagnostics) {
                parallel_for(entries.size(), g.threads, [&](std::size_t i) {
                    const auto r = spectrum::rs_diagnostics(entries[i].mode);
                    rows[i] = fmt_row({static_cast<double>(entries[i].mode.n1),
                                       static_cast<double>(entries[i].mode.n2),
                                       static_cast<double>(entries[i].mode.k), r.energy,
                                       r.lambda_sqrt, r.h, r.eta_bar, r.zeta_bar, r.rs_norms[0],
                                       r.rs_norms[1], r.rs_norms[2], r.rs_norms[3]});
                    rows[i].push_back(r.regime);
                });
            } else {
                for (std::size_t i = 0; i < entries.size(); ++i) {
                    const auto& e = entries[i];
                    const double h = 1.0 / std::sqrt(e.energy);
                    rows[i] = fmt_row({static_cast<double>(e.mode.n1),
                                       static_cast<double>(e.mode.n2),
                                       static_cast<double>(e.mode.k), e.energy,
                                       std::sqrt(e.energy), h, h * e.mode.n1,
                                       h * h * h * e.mode.n2, 0.0, 0.0, 0.0, 0.0});
                    rows[i].push_back("-");
                }
            }
            json cfg = {{"emax", sp.emax}, {"diagnostics", sp.diagnostics}, {"format", g.format}};
            const auto path = write_table(
                g, "spectrum", "n1,n2,k,E,lambda,h,eta_bar,zeta_bar,rs1,rs2,rs3,rs4,regime", rows);
            write_sidecar(g, "spectrum", cmd, cfg);
            print_summary(g, cmd, cfg, {path},
                          {{"count", entries.size()},
                           {"lowest", entries.empty() ? 0.0 : entries.front().energy}});
        } else if (cmd == "regime-scan") {
            semiclassical::ModeSequence seq;
            seq.k = rg.k;
            seq.length = rg.length;
            if (rg.family == "pure") {
                seq.family = semiclassical::ModeSequence::Family::pure_n2;
            } else if (rg.family == "ratio") {
                seq.family = semiclassical::ModeSequence::Family::fixed_ratio;
                seq.c = rg.c;
                seq.d = rg.d;
            } else {
                seq.family = semiclassical::ModeSequence::Family::user;
                std::stringstream ss(rg.modes);
                std::string item;
                while (std::getline(ss, item, ';')) {
                    int n1, n2, k;
                    if (std::sscanf(item.c_str(), "%d,%d,%d", &n1, &n2, &k) != 3)
                        throw domain_error("regime-scan: bad --modes entry: " + item);
                    seq.user_modes.push_back({n1, n2, k});
                }
                seq.length = static_cast<int>(seq.user_modes.size());
            }
            semiclassical::RegimeThresholds thr{rg.drift, rg.limit};
            const auto v = semiclassical::classify_regime(seq, thr);
            std::vector<std::vector<std::string>> rows;
            for (const auto& r : v.reports) {
                auto row = fmt_row({static_cast<double>(r.mode.n1), static_cast<double>(r.mode.n2),
                                    static_cast<double>(r.mode.k), r.energy, r.lambda_sqrt, r.h,
                                    r.eta_bar, r.zeta_bar, r.rs_norms[0], r.rs_norms[1],
                                    r.rs_norms[2], r.rs_norms[3]});
                row.push_back(r.regime);
                rows.push_back(row);
            }
            json cfg = {{"family", rg.family}, {"c", rg.c},           {"d", rg.d},
                        {"k", rg.k},           {"length", seq.length}, {"modes", rg.modes},
                        {"drift_threshold", rg.drift}, {"limit_threshold", rg.limit},
                        {"format", g.format}};
            const auto path = write_table(
                g, "regime_scan", "n1,n2,k,E,lambda,h,eta_bar,zeta_bar,rs1,rs2,rs3,rs4,regime",
                rows);
            json sigma_bars = json::array(), w_bar_means = json::array();
            for (const auto& r : v.reports) {
                sigma_bars.push_back(r.sigma_bar);
                w_bar_means.push_back(r.w_bar_mean);
            }
            write_sidecar(g, "regime_scan", cmd, cfg,
                          {{"verdict", v.verdict},
                           {"zbar_limit", v.zbar_limit},
                           {"zbar_drift", v.zbar_drift},
                           {"sigma_bar", sigma_bars},
                           {"w_bar_mean", w_bar_means}});
            print_summary(g, cmd, cfg, {path},
                          {{"verdict", v.verdict},
                           {"zbar_limit", v.zbar_limit},
                           {"zbar_drift", v.zbar_drift}});
        } else if (cmd == "husimi") {
            spectrum::ModeIndex mode{hu.n1, hu.n2, hu.k};
            semiclassical::HusimiWindow w;
            w.nx = hu.nx;
            w.nxi = hu.nxi;
            w.x_min = hu.x_min;
            w.x_max = hu.x_max;
            w.xi_min = hu.xi_min;
            w.xi_max = hu.xi_max;
            const auto f = semiclassical::husimi(mode, w);
            // dense matrix: one CSV row per X sample, columns are Xi samples
            std::vector<std::vector<std::string>> rows(f.window.nx);
            for (int i = 0; i < f.window.nx; ++i) {
                rows[i].reserve(f.window.nxi);
                for (int j = 0; j < f.window.nxi; ++j)
                    rows[i].push_back(io::full_precision(
                        f.density[static_cast<std::size_t>(i) * f.window.nxi + j]));
            }
            std::string header;
            for (int j = 0; j < f.window.nxi; ++j)
                header += (j ? "," : "") + ("xi_" + std::to_string(j));
            json cfg = {{"n1", hu.n1}, {"n2", hu.n2},   {"k", hu.k},
                        {"nx", f.window.nx},  {"nxi", f.window.nxi}, {"format", g.format}};
            const auto path = write_table(g, "husimi", header, rows);
            const auto m = semiclassical::shell_masses(f, 0.2);
            write_sidecar(g, "husimi", cmd, cfg,
                          {{"window",
                            {{"x_min", f.window.x_min},
                             {"x_max", f.window.x_max},
                             {"xi_min", f.window.xi_min},
                             {"xi_max", f.window.xi_max},
                             {"nx", f.window.nx},
                             {"nxi", f.window.nxi}}},
                           {"mode", {{"n1", hu.n1}, {"n2", hu.n2}, {"k", hu.k}}},
                           {"h", f.h},
                           {"eta_bar", f.eta_bar},
                           {"zeta_bar", f.zeta_bar},
                           {"width", f.width},
                           {"coverage", f.coverage},
                           {"coverage_warning", f.coverage_warning}});
            print_summary(g, cmd, cfg, {path},
                          {{"h", f.h},
                           {"coverage", f.coverage},
                           {"coverage_warning", f.coverage_warning},
                           {"annulus_mass_0p2", m.annulus},
                           {"sublevel_mass_0p2", m.sublevel}});
        } else if (cmd == "selftest") {
            const auto checks = selftest::run_all(g.threads);
            std::vector<std::vector<std::string>> rows;
            std::size_t failed = 0;
            for (const auto& c : checks) {
                rows.push_back({c.name, c.pass ? "pass" : "FAIL", c.detail});
                if (!c.pass) ++failed;
                std::fprintf(stderr, "%-50s %s  %s\n", c.name.c_str(),
                             c.pass ? "pass" : "FAIL", c.detail.c_str());
            }
            json cfg = {{"format", g.format}};
            const auto path = write_table(g, "selftest", "check,status,detail", rows);
            write_sidecar(g, "selftest", cmd, cfg);
            json head = {{"checks", checks.size()}, {"failed", failed}};
            print_summary(g, cmd, cfg, {path}, head);
            if (failed > 0) return 1;
        }
        return 0;
    } catch (const domain_error& e) {
        std::cerr << "config error: " << e.what() << std::endl;
        return 2;
    } catch (const solver_error& e) {
        std::cerr << "invariant failure: " << e.what() << std::endl;
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
}
