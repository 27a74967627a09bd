#pragma once

#include <span>
#include <vector>

#include "rieszlab/quadrature.hpp"

namespace rieszlab {

// F^[eps](t) from the cached profile; eps = 0 is |t|^{-beta}.
double block_F(double eps, double t, double alpha);

// Positive t where F^[eps](t) = level, ascending.
std::vector<double> level_crossings(double eps, double level, double alpha);

// ∫ (|1 - |t|^{-beta}|^p - 1) dt over the line.
double J0(double p, double alpha, const QuadratureBudget& budget = {});

// ∫ (|1 - e^{i theta} F^[eps](t)|^p - 1) dt over the line.
double J_eps_theta(double eps, double theta, double p, double alpha,
                   const QuadratureBudget& budget = {});

// 2 pi cot(pi / beta), the small-p slope of J0.
double J0_slope_limit(double alpha);

// max over samples of |F^[eps](t)| / min(eps^{-beta}, |t|^{-beta}).
double block_bound_constant(double eps, double alpha, std::span<const double> t_samples);
// max over samples |u| > 3 eps of |F^[eps](u)| |u|^beta, u in units of lambda|Q|.
double far_field_constant(double eps, double alpha, std::span<const double> u_samples);

} // namespace rieszlab
