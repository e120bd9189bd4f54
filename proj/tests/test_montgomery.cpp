#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "martinet/montgomery.hpp"
#include "martinet/parallel.hpp"
#include "oracles.hpp"

using namespace martinet;
namespace mont = martinet::montgomery;

namespace {

// Spec'd oracle: order-2 finite differences at N = 4096, L = 8, Richardson
// extrapolated over dx. Independent of the production auto-grid path.
double oracle_lambda(double mu, int k) {
    const GridSpec fine{8.0, 4096, 2};
    const GridSpec coarse{8.0, 2048, 2};
    const double lf = mont::detail::raw_solve(mu, 1.0, fine, k, false)->values[k - 1];
    const double lc = mont::detail::raw_solve(mu, 1.0, coarse, k, false)->values[k - 1];
    const double r = coarse.dx() / fine.dx(), r2 = r * r;
    return (r2 * lf - lc) / (r2 - 1.0);
}

}  // namespace

TEST_CASE("stencil transcription at mu = 0, N = 5, L = 1, order 2") {
    const GridSpec g{1.0, 5, 2};
    const auto A = mont::build_hamiltonian(0.0, g);
    const double dx = g.dx();
    REQUIRE(A.n == 5);
    REQUIRE(A.bw == 1);
    for (int i = 0; i < 5; ++i) {
        const double x = g.x(i);
        CHECK(A.diag[i] == Catch::Approx(2.0 / (dx * dx) + x * x * x * x).epsilon(1e-15));
    }
    for (int i = 0; i < 4; ++i) CHECK(A.band[0][i] == Catch::Approx(-1.0 / (dx * dx)));
    // symmetry is structural: one stored band serves both triangles
    std::vector<double> e1(5, 0.0), e2(5, 0.0), y;
    e1[1] = 1.0;
    e2[2] = 1.0;
    A.apply(e1, y);
    const double a12 = y[2];
    A.apply(e2, y);
    CHECK(a12 == y[1]);
}

TEST_CASE("coarse-grid Ritz value within 5% of 1.0604") {
    const GridSpec g{5.0, 96, 2};
    const auto vals = banded_eigenvalues(mont::build_hamiltonian(0.0, g), 1);
    CHECK(std::abs(vals[0] - 1.0604) / 1.0604 < 0.05);
}

TEST_CASE("low-lying eigenvalues at mu = 0 against the fine-grid oracle") {
    CHECK(oracle_lambda(0.0, 1) == Catch::Approx(1.06036209048).epsilon(1e-8));
    CHECK(oracle_lambda(0.0, 2) == Catch::Approx(3.79967302980).epsilon(1e-8));
    CHECK(mont::lambda_value(0.0, 1) == Catch::Approx(1.06036209048).epsilon(1e-9));
    CHECK(mont::lambda_value(0.0, 2) == Catch::Approx(3.79967302980).epsilon(1e-9));
    // off-center frozen values (fine-grid Richardson oracle)
    CHECK(mont::lambda_value(-2.0, 1) == Catch::Approx(2.289649547280).epsilon(1e-7));
    CHECK(mont::lambda_value(10.0, 1) == Catch::Approx(104.508932803898).epsilon(1e-6));
}

TEST_CASE("memo cache is safe and consistent under concurrent identical solves") {
    mont::clear_cache();
    std::vector<double> vals(32);
    martinet::parallel_for(vals.size(), 8, [&](std::size_t i) {
        vals[i] = mont::lambda_value(-0.7, 1 + static_cast<int>(i % 3));
    });
    for (std::size_t i = 0; i < vals.size(); ++i)
        CHECK(vals[i] == mont::lambda_value(-0.7, 1 + static_cast<int>(i % 3)));
}

TEST_CASE("eigenpair contract: ordering, normalization, residual, parity") {
    const GridSpec g{4.5, 1024, 2};
    const auto pairs = mont::eigenpairs(0.0, g, 4);
    REQUIRE(pairs.size() == 4);
    for (std::size_t i = 1; i < pairs.size(); ++i) CHECK(pairs[i].value > pairs[i - 1].value);
    for (const auto& p : pairs) {
        CHECK(p.value > 0.0);
        double norm = 0.0;
        for (double v : p.vector) norm += v * v * g.dx();
        CHECK(std::abs(norm - 1.0) < 1e-12);
        CHECK(p.residual < 1e-6);
    }
    // mu = 0 potential is even: phi_1 even, phi_2 odd
    const int n = g.points;
    double even_defect = 0.0, odd_defect = 0.0;
    for (int i = 0; i < n; ++i) {
        even_defect += std::pow(pairs[0].vector[i] - pairs[0].vector[n - 1 - i], 2) * g.dx();
        odd_defect += std::pow(pairs[1].vector[i] + pairs[1].vector[n - 1 - i], 2) * g.dx();
    }
    CHECK(std::sqrt(even_defect) < 1e-8);
    CHECK(std::sqrt(odd_defect) < 1e-8);
    // sign convention: first extremum from the left is positive
    CHECK(pairs[0].vector[g.points / 2] > 0.0);
}

TEST_CASE("order-4 stencil agrees with order-2 Richardson") {
    const GridSpec g4{4.5, 1024, 4};
    const auto vals = mont::detail::raw_solve(0.0, 1.0, g4, 2, false)->values;
    CHECK(vals[0] == Catch::Approx(1.06036209048).epsilon(5e-9));
    CHECK(vals[1] == Catch::Approx(3.79967302980).epsilon(5e-9));
}

TEST_CASE("spectral convergence is second order in dx") {
    const double truth = 1.06036209048418;
    double prev_err = 0.0;
    for (int n : {256, 512, 1024}) {
        const GridSpec g{4.5, n, 2};
        const double err =
            std::abs(mont::detail::raw_solve(0.0, 1.0, g, 1, false)->values[0] - truth);
        if (prev_err > 0.0) CHECK(prev_err / err >= 3.9);
        prev_err = err;
    }
}

TEST_CASE("simplicity: spaced gaps for k <= 8 at production resolution") {
    for (double mu : {-2.0, -1.0, 0.0, 1.0}) {
        const auto vals = mont::lambda_values(mu, 9);
        for (int k = 0; k + 1 < 9; ++k) {
            CAPTURE(mu, k);
            CHECK(vals[k + 1] - vals[k] > 0.1);
        }
    }
}

TEST_CASE("eigenvalue curves blow up on both sides of the critical point") {
    const double mus[] = {-8.0, -4.0, -2.0};
    for (int k : {1, 2}) {
        double prev = mont::lambda_value(mus[0], k);
        for (std::size_t i = 1; i < std::size(mus); ++i) {
            const double cur = mont::lambda_value(mus[i], k);
            CHECK(cur < prev);  // decreasing toward the minimum from the left
            prev = cur;
        }
        prev = mont::lambda_value(2.0, k);
        for (double mu : {4.0, 8.0}) {
            const double cur = mont::lambda_value(mu, k);
            CHECK(cur > prev);
            prev = cur;
        }
    }
}

TEST_CASE("Hellmann-Feynman derivative vs central finite differences") {
    for (double mu : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
        for (int k : {1, 2}) {
            const double h = 1e-4;
            const double fd =
                (mont::lambda_value(mu + h, k) - mont::lambda_value(mu - h, k)) / (2.0 * h);
            const double hf = mont::hf_derivative(mu, k);
            CAPTURE(mu, k, fd, hf);
            CHECK(std::abs(hf - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
        }
    }
}

TEST_CASE("asymptotic slope: dLambda_1/dmu(10) is close to 2 mu") {
    CHECK(std::abs(mont::hf_derivative(10.0, 1) - 20.0) / 20.0 < 0.05);
}

TEST_CASE("critical point of Lambda_1") {
    const auto cp = mont::critical_point(1);
    CHECK(cp.mu_star < 0.0);
    // frozen from the Richardson HF-quadrature oracle sweep
    CHECK(cp.mu_star == Catch::Approx(-0.436888212116).margin(2e-6));
    CHECK(cp.value == Catch::Approx(0.904533371403).margin(1e-7));
    CHECK(cp.value < mont::lambda_value(0.0, 1));
    CHECK(cp.second_derivative == Catch::Approx(1.576126466).margin(2e-3));
    CHECK(cp.second_derivative > 0.0);
    // sign pattern of a minimum
    CHECK(mont::hf_derivative(cp.mu_star - 0.1, 1) < 0.0);
    CHECK(mont::hf_derivative(cp.mu_star + 0.1, 1) > 0.0);
    // the root sits where hf vanishes
    CHECK(std::abs(mont::hf_derivative(cp.mu_star, 1)) < 1e-8);
}

TEST_CASE("critical point of Lambda_2") {
    const auto cp = mont::critical_point(2);
    CHECK(cp.mu_star == Catch::Approx(-1.422601736497).margin(5e-6));
    CHECK(cp.value == Catch::Approx(2.625031048946).margin(5e-7));
    CHECK(cp.second_derivative > 0.0);
}

TEST_CASE("critical point bracketing error") {
    CHECK_THROWS_AS(mont::critical_point(1, 0.5, 1.0), solver_error);
}

TEST_CASE("eigenvector derivative: residual identity and gauge") {
    const GridSpec g{4.5, 1024, 2};
    const auto pairs = mont::eigenpairs(0.0, g, 1);
    const auto d = mont::eigvec_derivative(0.0, 1, g, 40);
    CHECK(d.residual < 1e-5);
    // normalization gauge <dphi, phi> = 0
    double dot = 0.0;
    for (int i = 0; i < g.points; ++i) dot += d.dphi[i] * pairs[0].vector[i] * g.dx();
    CHECK(std::abs(dot) < 1e-10);
    // documented decay as mmax grows
    REQUIRE(d.residual_decay.size() == 3);
    CHECK(d.residual_decay[2] <= d.residual_decay[0]);
}

TEST_CASE("eigenvector derivative: finite-difference cross-check") {
    const GridSpec g{4.5, 1024, 2};
    const double h = 1e-3;
    const auto d = mont::eigvec_derivative(0.0, 1, g, 40);
    const auto pp = mont::eigenpairs(h, g, 1);
    const auto pm = mont::eigenpairs(-h, g, 1);
    double err = 0.0;
    for (int i = 0; i < g.points; ++i) {
        const double fd = (pp[0].vector[i] - pm[0].vector[i]) / (2.0 * h);
        err += std::pow(fd - d.dphi[i], 2) * g.dx();
    }
    CHECK(std::sqrt(err) < 1e-4);
}

TEST_CASE("eigencurve sweep rows match the pointwise operations") {
    const auto rows = mont::eigencurve(-1.0, 0.0, 4, 1);
    REQUIRE(rows.size() == 5);
    CHECK(rows.front().mu == -1.0);
    CHECK(rows.back().mu == 0.0);
    for (const auto& r : rows) {
        CHECK(r.k == 1);
        CHECK(r.value == mont::lambda_value(r.mu, 1));
        CHECK(r.derivative == mont::hf_derivative(r.mu, 1));
        CHECK(r.value > 0.0);
        CHECK(std::isfinite(r.derivative));
    }
    CHECK_THROWS_AS(mont::eigencurve(1.0, 0.0, 4, 1), domain_error);
}

TEST_CASE("grid validation errors") {
    CHECK_THROWS_AS(mont::eigenpairs(0.0, GridSpec{4.5, 32, 2}, 1), domain_error);
    CHECK_THROWS_AS(mont::eigenpairs(0.0, GridSpec{1.2, 1024, 2}, 3), domain_error);
    CHECK_THROWS_AS(mont::build_hamiltonian(0.0, GridSpec{-1.0, 128, 2}), domain_error);
    CHECK_THROWS_AS(mont::build_hamiltonian(0.0, GridSpec{1.0, 128, 3}), domain_error);
    CHECK_THROWS_AS(mont::eigenpairs(0.0, GridSpec{4.5, 256, 2}, 128), domain_error);
}
