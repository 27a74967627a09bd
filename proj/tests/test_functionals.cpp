#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rieszlab/error.hpp"
#include "rieszlab/functionals.hpp"

using namespace rieszlab;

TEST_CASE("J0 against an independent midpoint oracle") {
    const double p = 0.1, beta = 1.5;
    // log1p keeps the far tail free of cancellation under the substitution.
    auto h = [&](double t) {
        const double v = std::pow(t, -beta);
        return std::expm1(p * (t > 1 ? std::log1p(-v) : std::log(v - 1.0)));
    };
    // Finite part on (0,2] by graded midpoints, the rest by the substitution
    // t = 2/u^2 which removes the t^{-beta} decay.
    double ref = oracle::graded_midpoint(h, 0.0, 1.0, 400000) + oracle::graded_midpoint(h, 1.0, 2.0, 400000);
    ref += oracle::graded_midpoint([&](double u) { return u == 0 ? 0.0 : h(2.0 / (u * u)) * 4.0 / (u * u * u); },
                                   0.0, 1.0, 400000);
    CHECK(std::abs(J0(p, 0.5) - 2.0 * ref) < 1e-9);
}

TEST_CASE("J0 is negative for small p with the predicted slope") {
    CHECK(J0(0.1, 0.5) < 0);
    const double L = J0_slope_limit(0.5);
    CHECK(L == doctest::Approx(-2.0 * kPi / std::sqrt(3.0)).epsilon(1e-12));
    CHECK(std::abs(J0(1e-3, 0.5) / 1e-3 / L - 1.0) < 0.02);
    // The ratio approaches L from above as p decreases.
    double prev = 0;
    for (double p : {0.2, 0.1, 0.05, 0.01}) {
        const double r = J0(p, 0.5) / p;
        CHECK(r < prev);
        CHECK(r > L);
        prev = r;
    }
}

TEST_CASE("J0 rejects exponents at or beyond 1/beta") {
    CHECK_THROWS_AS(J0(1.0 / 1.5, 0.5), Error);
    CHECK_THROWS_AS(J0(0.0, 0.5), Error);
}

TEST_CASE("J(eps, theta) reduces to J0 and converges as theta and eps shrink") {
    const double p = 0.1;
    CHECK(J_eps_theta(0.0, 0.0, p, 0.5) == J0(p, 0.5));
    const double j0 = J0(p, 0.5);
    CHECK(std::abs(J_eps_theta(0.05, 0.0, p, 0.5) - j0) < std::abs(j0) / 2);
    double gap = 0;
    for (double eps : {0.02, 0.05, 0.1})
        gap = std::max(gap, std::abs(J_eps_theta(eps, 1e-3, p, 0.5) - J_eps_theta(eps, 0.0, p, 0.5)));
    CHECK(gap < 1e-2);
}

TEST_CASE("unit level crossings of the building block") {
    const double alpha = 0.5;
    CHECK(level_crossings(0.0, 1.0, alpha) == std::vector<double>{1.0});
    for (double eps : {0.02, 0.1}) {
        const auto roots = level_crossings(eps, 1.0, alpha);
        REQUIRE(!roots.empty());
        for (double r : roots) CHECK(std::abs(block_F(eps, r, alpha) - 1.0) < 1e-9);
        // The outer crossing sits close to the bare kernel's t = 1.
        CHECK(std::abs(roots.back() - 1.0) < 0.05);
    }
}

TEST_CASE("block_F at eps = 0 is |t|^{-beta}") {
    CHECK(block_F(0.0, 1.0, 0.5) == 1.0);
    CHECK(block_F(0.0, 4.0, 0.5) == doctest::Approx(0.125).epsilon(1e-15));
    CHECK_THROWS_AS(block_F(0.0, 0.0, 0.5), Error);
}
