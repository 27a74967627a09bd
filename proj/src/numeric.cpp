#include "rieszlab/numeric.hpp"

#include <charconv>
#include <cstdio>

#include "rieszlab/error.hpp"

namespace rieszlab {

const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegenerateSample: return "DegenerateSample";
    case ErrorCode::PoleAtZero: return "PoleAtZero";
    case ErrorCode::InvalidExponent: return "InvalidExponent";
    case ErrorCode::NoNegativeJ: return "NoNegativeJ";
    case ErrorCode::EtaTooLarge: return "EtaTooLarge";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::GridMisaligned: return "GridMisaligned";
    case ErrorCode::LevelNotBuilt: return "LevelNotBuilt";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::MalformedState: return "MalformedState";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::EmptyE: return "EmptyE";
    case ErrorCode::DivisionGuard: return "DivisionGuard";
    }
    return "Unknown";
}

std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw Error(ErrorCode::ConfigError, "not a number: '" + std::string(s) + "'");
    return v;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

} // namespace rieszlab
