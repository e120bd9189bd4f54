#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "martinet/elliptic.hpp"
#include "oracles.hpp"

using martinet::ellip_E;
using martinet::ellip_K;

TEST_CASE("K at pinned moduli") {
    CHECK(ellip_K(0.0) == Catch::Approx(M_PI / 2.0).epsilon(1e-15));
    // oracle value from adaptive quadrature of the defining integral
    CHECK(ellip_K(1.0 / std::sqrt(2.0)) == Catch::Approx(1.8540746773013719).epsilon(1e-12));
    CHECK(ellip_K(0.999) > 4.0);
}

TEST_CASE("E at pinned moduli") {
    CHECK(ellip_E(0.0) == Catch::Approx(M_PI / 2.0).epsilon(1e-15));
    CHECK(ellip_E(1.0) == 1.0);
    CHECK(ellip_E(1.0 / std::sqrt(2.0)) == Catch::Approx(1.3506438810476755).epsilon(1e-12));
}

TEST_CASE("AGM agrees with quadrature of the defining integrals") {
    for (int i = 1; i <= 20; ++i) {
        const double k = i / 21.0;
        CAPTURE(k);
        CHECK(std::abs(ellip_K(k) - oracles::K_quadrature(k)) <=
              1e-10 * oracles::K_quadrature(k));
        CHECK(std::abs(ellip_E(k) - oracles::E_quadrature(k)) <=
              1e-10 * oracles::E_quadrature(k));
    }
}

TEST_CASE("Legendre relation") {
    for (double k : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const double kp = std::sqrt(1.0 - k * k);
        const double r = ellip_E(k) * ellip_K(kp) + ellip_E(kp) * ellip_K(k) -
                         ellip_K(k) * ellip_K(kp);
        CAPTURE(k);
        CHECK(std::abs(r - M_PI / 2.0) <= 1e-10);
    }
}

TEST_CASE("monotonicity on an ascending modulus grid") {
    const double grid[] = {0.0, 0.1, 0.2, 0.35, 0.5, 0.65, 0.8, 0.9, 0.96, 0.999};
    for (std::size_t i = 1; i < std::size(grid); ++i) {
        CHECK(ellip_K(grid[i]) > ellip_K(grid[i - 1]));
        CHECK(ellip_E(grid[i]) < ellip_E(grid[i - 1]));
    }
    for (double k : grid)
        if (k > 0.0) CHECK(ellip_E(k) < ellip_K(k));
}

TEST_CASE("domain errors name the offending value") {
    CHECK_THROWS_AS(ellip_K(1.0), martinet::domain_error);
    CHECK_THROWS_AS(ellip_K(-0.5), martinet::domain_error);
    CHECK_THROWS_AS(ellip_E(1.5), martinet::domain_error);
    CHECK_THROWS_WITH(ellip_K(1.25), Catch::Matchers::ContainsSubstring("1.25"));
}
