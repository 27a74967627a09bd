#include "rieszlab/block_profile.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "rieszlab/error.hpp"
#include "rieszlab/finitizator.hpp"
#include "rieszlab/kernels.hpp"

namespace rieszlab {

namespace {

QuadratureBudget table_budget() {
    QuadratureBudget b;
    b.abs_tol = 1e-13;
    b.rel_tol = 1e-13;
    b.max_subdivisions = 100000;
    return b;
}

double signed_convolution(double alpha, double s, double (*density)(double),
                          const QuadratureBudget& budget) {
    const KernelSpec k = KernelSpec::signed_antiderivative(alpha);
    Integrand h = [&](double x) { return Complex(density(x) * k(s - x)); };
    std::vector<double> pts{-0.5, 0.5};
    if (std::abs(s) < 0.5) pts.push_back(s);
    return -integrate_singular(h, -0.5, 0.5, pts, budget).value.real() / alpha;
}

} // namespace

double unit_block_direct(double alpha, double s, const QuadratureBudget& budget) {
    return signed_convolution(alpha, s, finitizator_d1, budget);
}

double unit_block_derivative_direct(double alpha, double s, const QuadratureBudget& budget) {
    return signed_convolution(alpha, s, finitizator_d2, budget);
}

BlockProfile::BlockProfile(double alpha) : alpha_(alpha) {
    if (!(alpha > 0 && alpha < 1)) throw Error(ErrorCode::InvalidArgument, "alpha out of (0,1)");
    const QuadratureBudget budget = table_budget();

    inner_log_step_ = std::log(kBandLo / kMinArg) / (kInnerNodes - 1);
    band_step_ = (kBandHi - kBandLo) / (kBandNodes - 1);
    outer_log_step_ = std::log(kMaxArg / kBandHi) / (kOuterNodes - 1);
    nodes_.push_back(0.0);
    for (int j = 0; j + 1 < kInnerNodes; ++j)
        nodes_.push_back(kMinArg * std::exp(j * inner_log_step_));
    for (int j = 0; j + 1 < kBandNodes; ++j) nodes_.push_back(kBandLo + j * band_step_);
    for (int j = 0; j < kOuterNodes; ++j) nodes_.push_back(kBandHi * std::exp(j * outer_log_step_));
    const std::size_t count = nodes_.size();
    values_.resize(count);
    slopes_.resize(count);
    for (std::size_t j = 0; j < count; ++j) {
        values_[j] = unit_block_direct(alpha, nodes_[j], budget);
        slopes_[j] = j == 0 ? 0.0 : unit_block_derivative_direct(alpha, nodes_[j], budget);
    }

    const double ends[] = {-0.5, 0.5};
    for (int k = 0; k <= 4; ++k) {
        Integrand h = [k](double x) { return Complex(std::pow(x, 2 * k) * finitizator(x)); };
        moments_.push_back(integrate_singular(h, -0.5, 0.5, ends, budget).value.real());
    }
    // |s-x|^{-beta} = s^{-beta} sum_j (beta)_j/j! (x/s)^j; odd moments vanish.
    const double beta = alpha + 1.0;
    double rising = 1.0, fact = 1.0;
    for (int j = 0; j <= 8; ++j) {
        if (j > 0) {
            rising *= beta + j - 1;
            fact *= j;
        }
        if (j % 2 == 0) far_coeff_.push_back(rising / fact * moments_[j / 2]);
    }
}

double BlockProfile::far_field(double s) const {
    const double inv2 = 1.0 / (s * s);
    double acc = 0.0;
    for (auto it = far_coeff_.rbegin(); it != far_coeff_.rend(); ++it) acc = acc * inv2 + *it;
    return acc * std::pow(s, -beta());
}

std::size_t BlockProfile::segment(double s) const {
    double guess;
    if (s < kMinArg)
        return 0;
    else if (s < kBandLo)
        guess = 1 + std::log(s / kMinArg) / inner_log_step_;
    else if (s < kBandHi)
        guess = kInnerNodes + (s - kBandLo) / band_step_;
    else
        guess = kInnerNodes + kBandNodes - 1 + std::log(s / kBandHi) / outer_log_step_;
    std::size_t j = static_cast<std::size_t>(guess);
    if (j + 2 > nodes_.size()) j = nodes_.size() - 2;
    while (j > 0 && s < nodes_[j]) --j;
    while (j + 2 < nodes_.size() && s >= nodes_[j + 1]) ++j;
    return j;
}

double BlockProfile::unit(double s) const {
    s = std::abs(s);
    if (s >= kMaxArg) return far_field(s);
    const std::size_t j = segment(s);
    const double x0 = nodes_[j], h = nodes_[j + 1] - x0;
    const double u = (s - x0) / h;
    const double u2 = u * u, u3 = u2 * u;
    const double h00 = 2 * u3 - 3 * u2 + 1, h10 = u3 - 2 * u2 + u;
    const double h01 = -2 * u3 + 3 * u2, h11 = u3 - u2;
    return h00 * values_[j] + h10 * h * slopes_[j] + h01 * values_[j + 1] +
           h11 * h * slopes_[j + 1];
}

double BlockProfile::unit_derivative(double s) const {
    const double sign = s < 0 ? -1.0 : 1.0;
    s = std::abs(s);
    if (s >= kMaxArg) {
        const double h = s * 1e-4;
        return sign * (far_field(s + h) - far_field(s - h)) / (2 * h);
    }
    const std::size_t j = segment(s);
    const double x0 = nodes_[j], h = nodes_[j + 1] - x0;
    const double u = (s - x0) / h;
    const double u2 = u * u;
    const double d00 = 6 * u2 - 6 * u, d10 = 3 * u2 - 4 * u + 1;
    const double d01 = -6 * u2 + 6 * u, d11 = 3 * u2 - 2 * u;
    return sign * (d00 * values_[j] / h + d10 * slopes_[j] + d01 * values_[j + 1] / h +
                   d11 * slopes_[j + 1]);
}

double BlockProfile::value(double eps, double t) const {
    if (eps < 0) throw Error(ErrorCode::InvalidArgument, "eps must be non-negative");
    if (eps == 0) {
        if (t == 0) throw Error(ErrorCode::PoleAtZero, "F^[0] at t=0");
        return std::pow(std::abs(t), -beta());
    }
    return std::pow(eps, -beta()) * unit(t / eps);
}

const BlockProfile& block_profile(double alpha) {
    static std::mutex mu;
    static std::map<double, std::unique_ptr<BlockProfile>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[alpha];
    if (!slot) slot = std::make_unique<BlockProfile>(alpha);
    return *slot;
}

} // namespace rieszlab
