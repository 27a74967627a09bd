#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "rieszlab/block_profile.hpp"
#include "rieszlab/error.hpp"
#include "rieszlab/functionals.hpp"
#include "rieszlab/kernels.hpp"
#include "rieszlab/state_io.hpp"

using namespace rieszlab;

TEST_CASE("reference selection counts and amplitudes") {
    const auto& s = fixture::reference_state(3);
    REQUIRE(s.built() == 3);
    CHECK(s.blocks(1).size() == 8);
    CHECK(s.blocks(2).size() == 48);
    CHECK(s.levels()[2].delayed.size() == 16);
    // Level 1 amplitudes are f_1 at the cell centres, f_1(t) = F^[1](t - 1).
    for (const auto& b : s.blocks(1)) {
        const double c = s.grid().geometry(b.Q).center;
        CHECK(b.amplitude.real() == doctest::Approx(unit_block_direct(0.5, c - 1.0)).epsilon(1e-7));
        CHECK(b.amplitude.imag() == 0.0);
    }
}

TEST_CASE("g_n equals g_1 outside I and f_n - f_{n+1} is the block sum") {
    const auto& s = fixture::reference_state(3);
    for (double t : {0.6, 0.8, 1.0, 1.3, 1.45}) {
        CHECK(s.eval_g(3, t) == s.g1(t));
        CHECK(s.eval_g(3, t).real() == doctest::Approx(oracle::bump(t - 1.0)).epsilon(1e-12));
    }
    for (double t : {-0.41, -0.05, 0.123, 0.37}) {
        const Complex d = s.eval_f(2, t) - s.eval_f(3, t);
        CHECK(std::abs(d - s.level_sum(2, t)) <= 1e-12 * (1 + std::abs(d)));
    }
}

TEST_CASE("a block is W of its density at the stored scale") {
    const auto& s = fixture::reference_state(2);
    const BlockTerm& b = s.blocks(1)[3];
    const auto geo = s.grid().geometry(b.Q);
    const double w = s.params().lambda * geo.length;
    // Away from the core the block is well resolved by direct quadrature of
    // W applied to the density (centred at 0, since W commutes with shifts).
    const SmoothDensity d = scaled_finitizator(0.0, 1.0 / (b.eps * w), std::pow(w, 0.5) / b.eps);
    for (double k : {0.2, 0.7, 5.0, 400.0}) {
        const double u = k * b.eps * w;
        const Complex direct = operator_W(d, u, 0.5) * b.amplitude * std::polar(1.0, s.params().theta);
        const Complex table = s.block_term(b, geo.center + u);
        CHECK(std::abs(direct - table) <= 1e-6 * std::max(std::abs(table), std::pow(b.eps, -1.5)));
    }
}

TEST_CASE("U f_n matches the composition constant times g_n") {
    const auto& s = fixture::reference_state(2);
    const double c = composition_constant_fourier(0.5);
    CHECK(c == doctest::Approx(-4 * kPi).epsilon(1e-14));
    SmoothDensity fn;
    fn.value = [&](double x) { return s.eval_f(2, x); };
    fn.breakpoints = s.breakpoints(2, -0.5, 0.5);
    fn.breakpoints.push_back(0.5);
    fn.breakpoints.push_back(1.5);
    QuadratureBudget q;
    q.abs_tol = 1e-9;
    q.rel_tol = 1e-8;
    q.max_subdivisions = 400000;
    for (double t : {0.75, 1.1}) {
        const Complex u = potential_U(fn, t, 0.5, q);
        CHECK(std::abs(u - c * s.eval_g(2, t)) <= 1e-6 * std::abs(c * s.eval_g(2, t)));
    }
}

TEST_CASE("construction is deterministic across thread counts") {
    const auto cfg = fixture::reference_config(3);
    const auto& ps = fixture::reference_params(3);
    EngineOptions one, two;
    one.threads = 1;
    two.threads = 2;
    const auto a = run_construction(cfg, ps, one);
    const auto b = run_construction(cfg, ps, two);
    CHECK(state_to_string(a) == state_to_string(b));
    CHECK(metrics_csv(a) == metrics_csv(b));
}

TEST_CASE("an oversized support budget stops the build") {
    ParamSet ps = fixture::reference_params(2);
    ps.lambda = 4.0; // bypasses validate(): lambda sum eps_n > 1/4
    ConstructionState s(fixture::reference_config(2), ps);
    try {
        build_level(s);
        FAIL("expected BudgetExceeded");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BudgetExceeded);
    }
    CHECK(s.built() == 1);
}

TEST_CASE("halving lambda scales the far-field tail by 2^beta") {
    ParamSet ps = fixture::reference_params(2);
    ConstructionState a(fixture::reference_config(2), ps);
    ps.lambda /= 2;
    ConstructionState b(fixture::reference_config(2), ps);
    build_level(a);
    build_level(b);
    REQUIRE(a.blocks(1).size() == b.blocks(1).size());
    for (double t : {0.7, 1.2, -0.9}) {
        const double ratio = std::abs(a.level_sum(1, t)) / std::abs(b.level_sum(1, t));
        CHECK(ratio == doctest::Approx(std::pow(2.0, 1.5)).epsilon(1e-6));
    }
}

TEST_CASE("metrics rows") {
    const auto& s = fixture::reference_state(3);
    const auto& m = s.metrics();
    REQUIRE(m.size() == 3);
    for (std::size_t i = 1; i < m.size(); ++i) {
        CHECK(m[i].Lp_int < m[i - 1].Lp_int);
        CHECK(m[i].V_len <= m[i - 1].V_len);
        CHECK(m[i].supp_sum > m[i - 1].supp_sum);
    }
    CHECK(m[0].Lp_int == doctest::Approx(s.params().f1_mass).epsilon(1e-10));
    CHECK(m[2].supp_sum == doctest::Approx(s.supp_sum()).epsilon(1e-15));
}

TEST_CASE("constant density correction factor is lambda J(eps, theta)") {
    // For h = 1 on Q the averaged change (1/|Q|)∫_Q (|1 - block|^p - 1) is
    // lambda times J(eps, theta) restricted to |u| < 1/(2 lambda).
    const auto& ps = fixture::reference_params(2);
    const double lambda = 1e-4, eps = ps.eps(1);
    const double J = J_eps_theta(eps, ps.theta, ps.p, ps.alpha);
    const Complex rot = std::polar(1.0, ps.theta);
    const auto g = [&](double u) {
        return std::pow(std::abs(1.0 - rot * block_F(eps, u, ps.alpha)), ps.p) - 1.0;
    };
    auto crossings = level_crossings(eps, 1.0, ps.alpha);
    double inner = 0;
    std::vector<double> pts{0.0};
    for (double x : crossings) pts.push_back(x);
    pts.push_back(0.5 / lambda);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        inner += oracle::graded_midpoint(g, pts[i], pts[i + 1], 4000);
    const double factor = lambda * 2 * inner;
    CHECK(factor == doctest::Approx(lambda * J).epsilon(0.05));
    const double gamma_p_minus_1 = ps.B * lambda / 2;
    CHECK(factor <= gamma_p_minus_1);
}
