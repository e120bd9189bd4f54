#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(MARTINET_CLI_PATH) + " " + args + " 2>/dev/null";
    std::array<char, 4096> buf{};
    RunResult r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), p)) r.out.append(buf.data(), n);
    const int status = pclose(p);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

fs::path fresh_dir(const std::string& tag) {
    const fs::path d = fs::temp_directory_path() / ("martinet_cli_" + tag);
    std::error_code ec;
    fs::remove_all(d, ec);
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("upsilon sweep: artifact, summary JSON, closed-vs-flow agreement") {
    const auto dir = fresh_dir("ups");
    const auto r = run_cli("upsilon --jmath 0 --eta-min -2 --eta-max 1 --steps 60 --out-dir " +
                           dir.string());
    REQUIRE(r.exit_code == 0);
    const auto summary = nlohmann::json::parse(r.out);
    CHECK(summary["command"] == "upsilon");
    CHECK(summary.contains("version"));
    CHECK(summary["config"]["steps"] == 60);
    CHECK(summary["headline"].contains("eta_star"));

    const auto csv = slurp(dir / "upsilon.csv");
    REQUIRE(!csv.empty());
    CHECK(csv.rfind("eta,jmath,upsilon_closed,upsilon_flow,abs_diff", 0) == 0);
    // every row off eta = -1 agrees to 1e-6
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    int rows = 0;
    while (std::getline(lines, line)) {
        double eta, j, c, f, d;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf", &eta, &j, &c, &f, &d) == 5);
        if (std::abs(eta + 1.0) > 1e-9) CHECK(d < 1e-6);
        ++rows;
    }
    CHECK(rows == 61);
    CHECK(fs::exists(dir / "upsilon.meta.json"));
}

TEST_CASE("critical-point: JSON with both pairs and a small residual") {
    const auto dir = fresh_dir("crit");
    const auto r = run_cli("critical-point --k 1 --out-dir " + dir.string());
    REQUIRE(r.exit_code == 0);
    const auto s = nlohmann::json::parse(r.out);
    CHECK(s["headline"].contains("mu_star"));
    CHECK(s["headline"].contains("eta_0"));
    CHECK(s["headline"].contains("zeta_0"));
    CHECK(s["headline"].contains("eta_1"));
    CHECK(s["headline"].contains("zeta_1"));
    CHECK(s["headline"]["lambda_residual"].get<double>() < 1e-8);
    CHECK(s["headline"]["zeta_0"].get<double>() > 0.0);
    CHECK(s["headline"]["zeta_1"].get<double>() < 0.0);
}

TEST_CASE("config file mirrors flags; flags override; unknown keys rejected") {
    const auto dir = fresh_dir("cfg");
    {
        std::ofstream cfg(dir / "cfg.json");
        cfg << R"({"eta-min": -1.5, "eta-max": 0.5, "steps": 10})";
    }
    const auto r = run_cli("upsilon --config " + (dir / "cfg.json").string() + " --steps 12" +
                           " --out-dir " + dir.string());
    REQUIRE(r.exit_code == 0);
    const auto s = nlohmann::json::parse(r.out);
    CHECK(s["config"]["eta_min"] == -1.5);
    CHECK(s["config"]["steps"] == 12);  // flag wins over file

    {
        std::ofstream cfg(dir / "bad.json");
        cfg << R"({"no-such-key": 1})";
    }
    const auto bad =
        run_cli("upsilon --config " + (dir / "bad.json").string() + " --out-dir " + dir.string());
    CHECK(bad.exit_code == 2);
}

TEST_CASE("domain errors exit with code 2") {
    CHECK(run_cli("spectrum --emax -3").exit_code == 2);
    CHECK(run_cli("no-such-subcommand").exit_code == 2);
    CHECK(run_cli("husimi --n2 0").exit_code == 2);
}

TEST_CASE("internal invariant failures exit with code 1") {
    // no sign change of the derivative inside this bracket
    const auto dir = fresh_dir("exit1");
    CHECK(run_cli("critical-point --k 1 --bracket-lo 0.5 --bracket-hi 1.0 --out-dir " +
                  dir.string())
              .exit_code == 1);
}

TEST_CASE("json artifact format") {
    const auto dir = fresh_dir("jsonfmt");
    const auto r = run_cli("lambda-curve --k 1 --mu-min 0 --mu-max 1 --steps 4 --format json" +
                           std::string(" --out-dir ") + dir.string());
    REQUIRE(r.exit_code == 0);
    const auto arr = nlohmann::json::parse(slurp(dir / "lambda_curve.json"));
    REQUIRE(arr.is_array());
    REQUIRE(arr.size() == 5);
    CHECK(arr[0].contains("mu"));
    CHECK(arr[0].contains("dlambda_dmu"));
}

TEST_CASE("spectrum artifact has the documented header and sane content") {
    const auto dir = fresh_dir("spec");
    const auto r = run_cli("spectrum --emax 3 --out-dir " + dir.string());
    REQUIRE(r.exit_code == 0);
    const auto csv = slurp(dir / "spectrum.csv");
    CHECK(csv.rfind("n1,n2,k,E,lambda,h,eta_bar,zeta_bar,rs1,rs2,rs3,rs4,regime", 0) == 0);
    const auto s = nlohmann::json::parse(r.out);
    CHECK(s["headline"]["count"].get<int>() > 0);
    CHECK(s["headline"]["lowest"].get<double>() == Catch::Approx(1.06036209).epsilon(1e-6));
}

TEST_CASE("determinism: byte-identical artifacts across runs and thread counts") {
    const auto d1 = fresh_dir("det1");
    const auto d2 = fresh_dir("det2");
    const auto d3 = fresh_dir("det3");
    const std::string args = "lambda-curve --k 1 --mu-min -1 --mu-max 1 --steps 24";
    REQUIRE(run_cli(args + " --threads 1 --out-dir " + d1.string()).exit_code == 0);
    REQUIRE(run_cli(args + " --threads 1 --out-dir " + d2.string()).exit_code == 0);
    REQUIRE(run_cli(args + " --threads 8 --out-dir " + d3.string()).exit_code == 0);
    const auto a = slurp(d1 / "lambda_curve.csv");
    REQUIRE(!a.empty());
    CHECK(a == slurp(d2 / "lambda_curve.csv"));
    CHECK(a == slurp(d3 / "lambda_curve.csv"));
    CHECK(slurp(d1 / "lambda_curve.meta.json") == slurp(d3 / "lambda_curve.meta.json"));
}

TEST_CASE("level-set artifact lists branch labels") {
    const auto dir = fresh_dir("ls");
    const auto r =
        run_cli("level-set --k 1 --zeta-min 0.4 --zeta-max 1.0 --steps 3 --out-dir " + dir.string());
    REQUIRE(r.exit_code == 0);
    const auto csv = slurp(dir / "level_set.csv");
    CHECK(csv.rfind("k,branch,eta,zeta", 0) == 0);
    CHECK(csv.find("left") != std::string::npos);
    CHECK(csv.find("right") != std::string::npos);
}

TEST_CASE("husimi artifact with sidecar window metadata") {
    const auto dir = fresh_dir("hus");
    const auto r = run_cli("husimi --n1 0 --n2 50 --k 1 --nx 48 --nxi 48 --out-dir " + dir.string());
    REQUIRE(r.exit_code == 0);
    const auto side = nlohmann::json::parse(slurp(dir / "husimi.meta.json"));
    CHECK(side["meta"]["mode"]["n2"] == 50);
    CHECK(side["meta"].contains("h"));
    CHECK(side["meta"]["window"].contains("x_min"));
    const auto s = nlohmann::json::parse(r.out);
    CHECK(s["headline"]["coverage"].get<double>() > 0.99);
}

TEST_CASE("help documents the output-directory environment variable") {
    const auto r = run_cli("upsilon --help");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("MARTINET_OUT_DIR") != std::string::npos);
}
