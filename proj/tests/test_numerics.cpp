#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <cmath>
#include <vector>

#include "martinet/parallel.hpp"
#include "martinet/quadrature.hpp"
#include "martinet/roots.hpp"

using namespace martinet;

TEST_CASE("gauss-legendre composite integration") {
    CHECK(integrate([](double t) { return std::cos(t); }, 0.0, M_PI / 2.0) ==
          Catch::Approx(1.0).epsilon(1e-14));
    CHECK(integrate([](double t) { return t * t * t; }, -1.0, 2.0) ==
          Catch::Approx(15.0 / 4.0).epsilon(1e-14));
    // non-integrable singularity inside the panel: no convergence
    CHECK_THROWS_AS(integrate([](double t) { return 1.0 / ((t - 0.5) * (t - 0.5)); }, 0.0, 1.0),
                    solver_error);
}

TEST_CASE("bracketed root finding") {
    const double r = find_root([](double x) { return x * x * x - 2.0; }, 0.0, 2.0, 1e-13);
    CHECK(r == Catch::Approx(std::cbrt(2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(find_root([](double x) { return 1.0 + x * x; }, -1.0, 1.0), solver_error);
}

TEST_CASE("golden-section minimization") {
    const double m = minimize_golden([](double x) { return std::pow(x - 0.7, 4) + 1.0; }, -2.0,
                                     2.0, 1e-8);
    CHECK(m == Catch::Approx(0.7).margin(1e-3));
}

TEST_CASE("parallel_for covers every index once and propagates exceptions") {
    std::vector<std::atomic<int>> hits(257);
    parallel_for(hits.size(), 8, [&](std::size_t i) { hits[i].fetch_add(1); });
    for (auto& h : hits) CHECK(h.load() == 1);

    CHECK_THROWS_AS(parallel_for(16, 4,
                                 [&](std::size_t i) {
                                     if (i == 7) throw solver_error("boom");
                                 }),
                    solver_error);
}
