#include "rieszlab/functionals.hpp"

#include <algorithm>
#include <cmath>

#include "rieszlab/block_profile.hpp"
#include "rieszlab/error.hpp"

namespace rieszlab {

namespace {

void require_exponent(double p, double alpha) {
    if (!(p > 0 && p < 1.0 / (alpha + 1.0)))
        throw Error(ErrorCode::InvalidExponent,
                    "p=" + format_double(p) + " outside (0, 1/beta)");
}

QuadratureBudget functional_budget(const QuadratureBudget& budget) {
    QuadratureBudget b = budget;
    b.abs_tol = std::min(b.abs_tol, 1e-10);
    return b;
}

} // namespace

double block_F(double eps, double t, double alpha) {
    if (eps < 0) throw Error(ErrorCode::InvalidArgument, "eps must be non-negative");
    if (eps == 0) {
        if (t == 0) throw Error(ErrorCode::PoleAtZero, "F^[0] at t=0");
        return std::pow(std::abs(t), -(alpha + 1.0));
    }
    return block_profile(alpha).value(eps, t);
}

std::vector<double> level_crossings(double eps, double level, double alpha) {
    std::vector<double> roots;
    if (eps == 0) {
        if (level > 0) roots.push_back(std::pow(level, -1.0 / (alpha + 1.0)));
        return roots;
    }
    const BlockProfile& prof = block_profile(alpha);
    // In unit variables: F^[1](s) = eps^beta * level.
    const double target = std::pow(eps, alpha + 1.0) * level;
    auto g = [&](double s) { return prof.unit(s) - target; };
    const double s_max = std::max(1e4, 1e3 / eps);
    std::vector<double> grid;
    for (int j = 0; j <= 2000; ++j) grid.push_back(0.2 + 0.8 * j / 2000.0);
    for (double s = 1e-6; s < 0.2; s *= 1.01) grid.push_back(s);
    for (double s = 1.0; s < s_max; s *= 1.001) grid.push_back(s);
    grid.push_back(0.0);
    std::sort(grid.begin(), grid.end());
    double prev = g(grid[0]);
    for (std::size_t j = 1; j < grid.size(); ++j) {
        const double cur = g(grid[j]);
        if ((prev < 0) != (cur < 0)) {
            double lo = grid[j - 1], hi = grid[j];
            const bool rising = prev < 0;
            for (int it = 0; it < 200 && hi - lo > 4e-16 * hi; ++it) {
                const double mid = 0.5 * (lo + hi);
                ((g(mid) < 0) == rising ? lo : hi) = mid;
            }
            roots.push_back(eps * 0.5 * (lo + hi));
        }
        prev = cur;
    }
    return roots;
}

double J0(double p, double alpha, const QuadratureBudget& budget) {
    return J_eps_theta(0.0, 0.0, p, alpha, budget);
}

double J_eps_theta(double eps, double theta, double p, double alpha,
                   const QuadratureBudget& budget) {
    require_exponent(p, alpha);
    if (eps < 0 || theta < 0)
        throw Error(ErrorCode::InvalidArgument, "eps and theta must be non-negative");
    const Complex rot = std::polar(1.0, theta);
    const double beta = alpha + 1.0;
    const BlockProfile* prof = eps > 0 ? &block_profile(alpha) : nullptr;
    Integrand h = [&](double t) {
        const double F = prof ? prof->value(eps, t) : std::pow(t, -beta);
        // |1 - zF|^p - 1 without cancellation when F is small.
        const double u = F * F - 2.0 * rot.real() * F;
        return Complex(std::expm1(0.5 * p * std::log1p(u)));
    };
    // Breakpoints: the kernel singularity, the unit crossings (zeros of 1-F
    // when theta = 0) and the edge of the block's support.
    std::vector<double> pts{0.0};
    for (double r : level_crossings(eps, 1.0, alpha)) pts.push_back(r);
    if (eps > 0) pts.push_back(0.5 * eps);
    // The integrand is even in t.
    return 2.0 * integrate_to_infinity(h, 0.0, pts, functional_budget(budget)).value.real();
}

double J0_slope_limit(double alpha) {
    return 2.0 * kPi / std::tan(kPi / (alpha + 1.0));
}

} // namespace rieszlab

namespace rieszlab {

double block_bound_constant(double eps, double alpha, std::span<const double> t_samples) {
    if (!(eps > 0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
    const double beta = alpha + 1.0;
    double c = 0;
    for (double t : t_samples) {
        const double scale = std::max(std::pow(eps, beta), std::pow(std::abs(t), beta));
        c = std::max(c, std::abs(block_F(eps, t, alpha)) * scale);
    }
    return c;
}

double far_field_constant(double eps, double alpha, std::span<const double> u_samples) {
    const double beta = alpha + 1.0;
    double c = 0;
    for (double u : u_samples) {
        if (std::abs(u) <= 3 * eps) throw Error(ErrorCode::InvalidArgument, "sample inside 3 eps");
        c = std::max(c, std::abs(block_F(eps, u, alpha)) * std::pow(std::abs(u), beta));
    }
    return c;
}

} // namespace rieszlab
