#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>

namespace rieszlab {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Neumaier variant of Kahan summation; order of additions is the caller's.
template <typename Value>
struct CompensatedSum {
    Value sum{};
    Value carry{};

    CompensatedSum& operator+=(Value x) {
        Value t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            carry += (sum - t) + x;
        else
            carry += (x - t) + sum;
        sum = t;
        return *this;
    }
    Value value() const { return sum + carry; }
};

struct ComplexSum {
    CompensatedSum<double> re, im;
    ComplexSum& operator+=(Complex z) {
        re += z.real();
        im += z.imag();
        return *this;
    }
    Complex value() const { return {re.value(), im.value()}; }
};

// Shortest decimal form that round-trips to the same double.
std::string format_double(double x);
double parse_double(std::string_view s);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

inline constexpr const char* kLibraryVersion = "rieszlab 1.0.0";

} // namespace rieszlab
