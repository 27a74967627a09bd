#include <doctest.h>

#include <cmath>

#include "rieszlab/error.hpp"
#include "rieszlab/params.hpp"

using namespace rieszlab;

TEST_CASE("gamma and kappa formulas") {
    CHECK(gamma_of(-1.0, 0.1, 0.1) == doctest::Approx(std::pow(0.95, 10)).epsilon(1e-14));
    CHECK(gamma_of(-1.0, 0.1, 0.1) == doctest::Approx(0.59874).epsilon(1e-5));
    CHECK(kappa_of(-1.0, 0.1, 0.1, 0.1) == doctest::Approx(std::pow(0.05, 10)).epsilon(1e-14));
    CHECK(kappa_of(-1.0, 0.1, 0.1, 0.1) == doctest::Approx(9.765625e-14).epsilon(1e-12));
    CHECK(kappa_of(-1.0, 0.5, 1.0, 0.8) == doctest::Approx(0.1));
}

TEST_CASE("comb tail constant against a direct partial sum") {
    double direct = 0;
    for (long k = 1; k <= 2000000; ++k) direct += std::pow(k - 0.5, -1.5) + std::pow(k + 0.5, -1.5);
    direct += 2.0 * std::pow(2000000.0, -0.5) / 0.5;
    CHECK(std::abs(comb_tail_constant(1.5) - direct) < 1e-6);
}

TEST_CASE("config parses, rejects unknown keys and round-trips bit-exactly") {
    const RunConfig c = parse_config("alpha = 0.5\n# comment\ndelta = 1/8\ntau=0.25\nlambda = 2e-6\nkappa=1e-3\n");
    CHECK(c.alpha == 0.5);
    CHECK(c.delta == 0.125);
    CHECK(c.lambda.value() == 2e-6);
    CHECK(!c.theta.has_value());
    CHECK(parse_config(serialize_config(c)) == c);
    CHECK_THROWS_AS(parse_config("alpha=0.5\ncolour=red\n"), Error);
    CHECK_THROWS_AS(parse_config("alpha=0.5\nalpha=0.6\n"), Error);
    CHECK_THROWS_AS(parse_config("alpha 0.5\n"), Error);
    CHECK_THROWS_AS(parse_config("n_max=2.5\n"), Error);

    RunConfig odd;
    odd.alpha = 0.1 + 0.2;
    odd.B = -1.0 / 3.0;
    odd.eps_c = std::nextafter(0.31, 1.0);
    const RunConfig back = parse_config(serialize_config(odd));
    CHECK(back.alpha == odd.alpha);
    CHECK(back.B.value() == odd.B.value());
    CHECK(back.eps_c.value() == odd.eps_c.value());
    CHECK(serialize_config(back) == serialize_config(odd));
}

TEST_CASE("exact reciprocals") {
    CHECK(exact_reciprocal(0.125) == 8);
    CHECK(exact_reciprocal(1.0 / 3.0) == 3);
    CHECK(exact_reciprocal(0.3) == 0);
    CHECK(exact_reciprocal(0.0) == 0);
}

TEST_CASE("derived parameters satisfy every invariant") {
    const Derivation d = derive_params(RunConfig{});
    const ParamSet& ps = d.params;
    for (const auto& c : ps.checks()) {
        INFO(c.name);
        CHECK(c.holds);
    }
    CHECK(ps.B < 0);
    CHECK(ps.p > 0);
    CHECK(ps.eta < 1);
    CHECK(ps.eta_prime == std::sqrt(ps.eta));
    // Admissible box: every scanned J lies below B.
    for (const auto& r : d.report.J_table)
        if (r.y <= ps.theta) CHECK(r.value < ps.B);
    // The eps sequence sums to 1/5.
    double s = 0;
    for (int n = 1; n < 200000; ++n) s += ps.eps(n);
    CHECK(std::abs(s - 0.2) < 1e-5);

    // Pinning the derived values reproduces the same set.
    const ParamSet again = derive_params(pinned_config(RunConfig{}, ps)).params;
    CHECK(again.lambda == ps.lambda);
    CHECK(again.B == ps.B);
    CHECK(again.eta == ps.eta);
    CHECK(again.K0 == ps.K0);
}

TEST_CASE("integrality violations are parameter errors") {
    RunConfig c;
    c.delta = 1.0 / 3.0;
    c.tau = 0.25;
    try {
        derive_params(c);
        FAIL("expected InvalidParams");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidParams);
    }
}

TEST_CASE("an oversized lambda override is rejected") {
    RunConfig c;
    c.lambda = 0.5;
    try {
        derive_params(c);
        FAIL("expected EtaTooLarge");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EtaTooLarge);
    }
}
