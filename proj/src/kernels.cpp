#include "rieszlab/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "rieszlab/error.hpp"
#include "rieszlab/finitizator.hpp"

namespace rieszlab {

namespace {

void require_alpha(double alpha) {
    if (!(alpha > 0 && alpha < 1))
        throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0,1)");
}

} // namespace

KernelSpec KernelSpec::potential(double alpha) {
    require_alpha(alpha);
    return {KernelKind::potential, alpha - 1.0};
}

KernelSpec KernelSpec::signed_antiderivative(double alpha) {
    require_alpha(alpha);
    return {KernelKind::signed_antiderivative, -alpha};
}

KernelSpec KernelSpec::inverse(double alpha) {
    require_alpha(alpha);
    return {KernelKind::inverse, -(alpha + 1.0)};
}

void KernelSpec::validate() const {
    switch (kind) {
    case KernelKind::potential:
        if (!(exponent > -1 && exponent < 0))
            throw Error(ErrorCode::InvalidArgument, "potential kernel needs 0 < alpha < 1");
        break;
    case KernelKind::signed_antiderivative:
        if (!(exponent > -1 && exponent < 0))
            throw Error(ErrorCode::InvalidArgument, "signed kernel needs 0 < alpha < 1");
        break;
    case KernelKind::inverse:
        if (!(exponent > -2 && exponent < -1))
            throw Error(ErrorCode::InvalidArgument, "inverse kernel needs 1 < beta < 2");
        break;
    }
}

double KernelSpec::operator()(double x) const {
    const double v = std::pow(std::abs(x), exponent);
    if (kind == KernelKind::signed_antiderivative) return x < 0 ? -v : v;
    return v;
}

SmoothDensity scaled_finitizator(double centre, double scale, double amplitude) {
    SmoothDensity d;
    d.value = [=](double x) { return Complex(amplitude * finitizator((x - centre) * scale)); };
    d.derivative = [=](double x) {
        return Complex(amplitude * scale * finitizator_d1((x - centre) * scale));
    };
    d.lo = centre - 0.5 / scale;
    d.hi = centre + 0.5 / scale;
    return d;
}

namespace {

QuadratureResult integrate_density(const Integrand& h, const SmoothDensity& f, double t,
                                   const QuadratureBudget& budget) {
    std::vector<double> pts = f.breakpoints;
    pts.push_back(t);
    if (f.bounded()) {
        if (!(t > f.lo && t < f.hi)) pts.pop_back();
        return integrate_singular(h, f.lo, f.hi, pts, budget);
    }
    if (std::isfinite(f.lo)) {
        if (!(t > f.lo)) pts.pop_back();
        return integrate_to_infinity(h, f.lo, pts, budget);
    }
    if (std::isfinite(f.hi)) {
        if (!(t < f.hi)) pts.pop_back();
        return integrate_from_minus_infinity(h, f.hi, pts, budget);
    }
    return integrate_line(h, pts, budget);
}

} // namespace

Complex convolve(const SmoothDensity& f, const KernelSpec& k, double t,
                 const QuadratureBudget& budget) {
    k.validate();
    Integrand h = [&](double x) { return f.value(x) * k(t - x); };
    return integrate_density(h, f, t, budget).value;
}

Complex potential_U(const SmoothDensity& f, double t, double alpha,
                    const QuadratureBudget& budget) {
    return convolve(f, KernelSpec::potential(alpha), t, budget);
}

Complex operator_W(const SmoothDensity& g, double t, double alpha,
                   const QuadratureBudget& budget) {
    const KernelSpec k = KernelSpec::signed_antiderivative(alpha);
    if (!g.derivative) throw Error(ErrorCode::InvalidArgument, "operator_W needs g'");
    Integrand h = [&](double x) { return g.derivative(x) * k(t - x); };
    return integrate_density(h, g, t, budget).value * (-1.0 / alpha);
}

CompositionEstimate composition_constant(const SmoothDensity& g, std::span<const double> samples,
                                         double alpha, const QuadratureBudget& budget) {
    if (samples.empty()) throw Error(ErrorCode::DegenerateSample, "no sample points");
    QuadratureBudget inner = budget;
    inner.abs_tol = std::min(budget.abs_tol, 1e-12);
    inner.rel_tol = std::min(budget.rel_tol, 1e-12);

    SmoothDensity wg;
    wg.value = [&](double x) { return operator_W(g, x, alpha, inner); };
    wg.breakpoints = {g.lo, g.hi};

    CompositionEstimate out;
    for (double t : samples) {
        const Complex gt = g.value(t);
        if (std::abs(gt) < 1e-8)
            throw Error(ErrorCode::DegenerateSample, "|g(t)| too small at t=" + format_double(t));
        out.ratios.push_back((potential_U(wg, t, alpha, budget) / gt).real());
    }
    std::vector<double> sorted = out.ratios;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t m = sorted.size();
    out.median = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
    out.spread = (sorted.back() - sorted.front()) / std::abs(out.median);
    return out;
}

double composition_constant_fourier(double alpha) {
    require_alpha(alpha);
    return -(2.0 * kPi / alpha) / std::tan(kPi * alpha / 2.0);
}

} // namespace rieszlab
