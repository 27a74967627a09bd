#include "rieszlab/finitizator.hpp"

#include <cmath>

namespace rieszlab {

double finitizator(double t) {
    const double u = 1.0 - 4.0 * t * t;
    if (!(u > 0)) return 0.0;
    return std::exp(-1.0 / u) / kFinitizatorMass;
}

double finitizator_d1(double t) {
    const double u = 1.0 - 4.0 * t * t;
    if (!(u > 0)) return 0.0;
    return finitizator(t) * (-8.0 * t / (u * u));
}

double finitizator_d2(double t) {
    const double u = 1.0 - 4.0 * t * t;
    if (!(u > 0)) return 0.0;
    const double u2 = u * u;
    return finitizator(t) * (64.0 * t * t / (u2 * u2) - 8.0 / u2 - 128.0 * t * t / (u2 * u));
}

} // namespace rieszlab
