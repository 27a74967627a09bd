#pragma once

#include <vector>

#include "rieszlab/quadrature.hpp"

namespace rieszlab {

// Tabulated F^[1] = W_alpha phi for one alpha. F^[eps](t) = eps^{-beta} F^[1](t/eps),
// so a single table serves every eps.
class BlockProfile {
public:
    // Abscissae: log-spaced on [kMinArg, kBandLo], uniform on the band
    // [kBandLo, kBandHi] where F^[1] has its boundary layer, log-spaced again
    // up to kMaxArg. Beyond kMaxArg a moment expansion is used.
    static constexpr double kMinArg = 1e-6;
    static constexpr double kBandLo = 0.2;
    static constexpr double kBandHi = 1.0;
    static constexpr double kMaxArg = 1e4;
    static constexpr int kInnerNodes = 1024;
    static constexpr int kBandNodes = 3201;
    static constexpr int kOuterNodes = 2048;

    explicit BlockProfile(double alpha);

    double alpha() const { return alpha_; }
    double beta() const { return alpha_ + 1.0; }

    // F^[1](s) and its derivative; even in s.
    double unit(double s) const;
    double unit_derivative(double s) const;

    // F^[eps](t); eps = 0 gives |t|^{-beta} (PoleAtZero at t = 0).
    double value(double eps, double t) const;

    // ∫ x^{2k} phi(x) dx, k = 0..4.
    const std::vector<double>& even_moments() const { return moments_; }

private:
    double far_field(double s) const;
    std::size_t segment(double s) const;

    double alpha_;
    double inner_log_step_, band_step_, outer_log_step_;
    std::vector<double> nodes_, values_, slopes_;
    std::vector<double> moments_, far_coeff_;
};

// Cached profile per alpha; built once, read-only afterwards.
const BlockProfile& block_profile(double alpha);

// F^[1](s) and its derivative by direct quadrature of the operator (no table).
double unit_block_direct(double alpha, double s, const QuadratureBudget& budget = {});
double unit_block_derivative_direct(double alpha, double s, const QuadratureBudget& budget = {});

} // namespace rieszlab
