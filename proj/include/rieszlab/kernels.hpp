#pragma once

#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "rieszlab/numeric.hpp"
#include "rieszlab/quadrature.hpp"

namespace rieszlab {

enum class KernelKind {
    potential,             // |x|^{alpha-1}
    signed_antiderivative, // sgn(x)|x|^{-alpha}
    inverse,               // |x|^{-beta}, beta = alpha + 1
};

struct KernelSpec {
    KernelKind kind;
    double exponent; // alpha-1, -alpha or -beta respectively

    static KernelSpec potential(double alpha);
    static KernelSpec signed_antiderivative(double alpha);
    static KernelSpec inverse(double alpha);

    void validate() const;
    double operator()(double x) const;
};

struct SmoothDensity {
    std::function<Complex(double)> value;
    std::function<Complex(double)> derivative;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    // Points where the density has fine structure (block centres etc.).
    std::vector<double> breakpoints;

    bool bounded() const { return std::isfinite(lo) && std::isfinite(hi); }
};

// Smooth bump a*phi((x - c)*s) with analytic derivative.
SmoothDensity scaled_finitizator(double centre, double scale, double amplitude = 1.0);

// ∫ f(x) k(t - x) dx, split at x = t.
Complex convolve(const SmoothDensity& f, const KernelSpec& k, double t,
                 const QuadratureBudget& budget);

Complex potential_U(const SmoothDensity& f, double t, double alpha,
                    const QuadratureBudget& budget = {});

// (-1/alpha) ∫ g'(x) sgn(t-x)|t-x|^{-alpha} dx.
Complex operator_W(const SmoothDensity& g, double t, double alpha,
                   const QuadratureBudget& budget = {});

struct CompositionEstimate {
    double median = 0;
    double spread = 0; // (max - min)/|median|
    std::vector<double> ratios;
};

CompositionEstimate composition_constant(const SmoothDensity& g, std::span<const double> samples,
                                         double alpha, const QuadratureBudget& budget = {});

// Value predicted by the Fourier symbols of the two operators.
double composition_constant_fourier(double alpha);

} // namespace rieszlab
