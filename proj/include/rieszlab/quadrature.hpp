#pragma once

#include <functional>
#include <span>

#include "rieszlab/numeric.hpp"

namespace rieszlab {

struct QuadratureBudget {
    double abs_tol = 1e-9;
    double rel_tol = 1e-9;
    int max_subdivisions = 20000;
    // Split radius for integrals over unbounded ranges; beyond it the
    // integrand is mapped onto (0,1] by x = R/u.
    double truncation_radius = 8.0;

    void validate() const;
};

struct QuadratureResult {
    Complex value;
    double error = 0.0;
    long evaluations = 0;
};

using Integrand = std::function<Complex(double)>;

// Adaptive Gauss-Kronrod (7/15) on regular panels. Every listed point gets a
// geometrically graded mesh (ratio 1/2) on both sides, with the innermost
// remainder extrapolated from the ratio of consecutive graded pieces.
QuadratureResult integrate_singular(const Integrand& f, double a, double b,
                                    std::span<const double> singular_points,
                                    const QuadratureBudget& budget);

// Integral over [a, +inf), a > 0 not required.
QuadratureResult integrate_to_infinity(const Integrand& f, double a,
                                       std::span<const double> singular_points,
                                       const QuadratureBudget& budget);

// Integral over (-inf, b].
QuadratureResult integrate_from_minus_infinity(const Integrand& f, double b,
                                               std::span<const double> singular_points,
                                               const QuadratureBudget& budget);

// Integral over the whole line.
QuadratureResult integrate_line(const Integrand& f, std::span<const double> singular_points,
                                const QuadratureBudget& budget);

} // namespace rieszlab
