#pragma once

#include <cstdint>
#include <vector>

namespace rieszlab {

class Grid;

struct MeanCheck {
    int i, k;
    double mean, expected, std_error; // mean of xi'_i^(k) vs tau^k
    double centered_z;                // (mean - tau^k) / std_error
};

struct FourthMoment {
    int k;
    double moment;   // E (sum_i xi_i^(k))^4
    double envelope; // kFourthMomentConstant * n^2 k^2 tau^k
    double ratio;    // moment / (n^2 k^2 tau^k)
};

struct PairCheck {
    int i;
    double joint, product, std_error; // k = 1, levels i and i+1
};

struct MonteCarloReport {
    int n = 0;
    long samples = 0;
    std::uint64_t seed = 0;
    double measure_estimate = 0, std_error = 0; // |{D_n >= n/2}|
    double measured_constant = 0;               // max_k of FourthMoment::ratio
    double bound = 0;                           // sum_k C k^2 tau^{k/2} / (n^2 2^k)
    std::vector<MeanCheck> means;
    std::vector<FourthMoment> moments;
    std::vector<PairCheck> pairs;
    std::vector<long> D_histogram; // D_histogram[d] = #samples with D_n = d
    int max_window_depth = 0;      // k truncation of the exact window test
};

// Constant of the fourth-moment envelope for sums of k-dependent centred
// indicators (2 * 4!).
inline constexpr double kFourthMomentConstant = 48.0;
inline constexpr int kMomentDepth = 6;

// Uniform points of I drawn digit by digit on the base-D mesh, one seeded
// generator per sample, so the result does not depend on threads.
MonteCarloReport montecarlo_En(const Grid& grid, int n, long samples, std::uint64_t seed,
                               int threads = 1);

} // namespace rieszlab
