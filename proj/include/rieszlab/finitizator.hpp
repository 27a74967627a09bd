#pragma once

namespace rieszlab {

// phi(t) = exp(-1/(1-4t^2))/Z on |t| < 1/2, zero elsewhere; ∫phi = 1.
inline constexpr double kFinitizatorMass = 0.22199690808403966;

double finitizator(double t);
double finitizator_d1(double t);
double finitizator_d2(double t);

} // namespace rieszlab
