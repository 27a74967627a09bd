#include "rieszlab/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "rieszlab/error.hpp"
#include "rieszlab/partition.hpp"

namespace rieszlab {

namespace {

using i128 = __int128;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct Windows {
    int depth;
    std::vector<i128> lo, width; // index k
};

Windows make_windows(long D, long T) {
    Windows w;
    i128 span = 1, width = 1;
    w.lo.push_back(0);
    w.width.push_back(1);
    for (w.depth = 0; span < (static_cast<i128>(1) << 118);) {
        span *= D;
        width *= D / T;
        w.lo.push_back((span - width) / 2);
        w.width.push_back(width);
        ++w.depth;
    }
    return w;
}

// Integer tallies; merged by addition so the schedule does not matter.
struct Tally {
    long hits = 0;
    std::vector<long> D_hist;
    std::vector<std::vector<long>> sum_hist; // [k][s]
    long mean_counts[2][2] = {{0, 0}, {0, 0}};
    std::vector<long> pair_joint, pair_first, pair_second;

    Tally(int n, int pairs)
        : sum_hist(kMomentDepth, std::vector<long>(n + 1, 0)), pair_joint(pairs, 0),
          pair_first(pairs, 0), pair_second(pairs, 0) {}

    void merge(const Tally& o) {
        hits += o.hits;
        if (D_hist.size() < o.D_hist.size()) D_hist.resize(o.D_hist.size(), 0);
        for (std::size_t d = 0; d < o.D_hist.size(); ++d) D_hist[d] += o.D_hist[d];
        for (std::size_t k = 0; k < sum_hist.size(); ++k)
            for (std::size_t s = 0; s < sum_hist[k].size(); ++s) sum_hist[k][s] += o.sum_hist[k][s];
        for (int i = 0; i < 2; ++i)
            for (int k = 0; k < 2; ++k) mean_counts[i][k] += o.mean_counts[i][k];
        for (std::size_t j = 0; j < pair_joint.size(); ++j) {
            pair_joint[j] += o.pair_joint[j];
            pair_first[j] += o.pair_first[j];
            pair_second[j] += o.pair_second[j];
        }
    }
};

void run_range(const Grid& grid, const Windows& win, int n, std::uint64_t seed, long begin,
               long end, Tally& tally) {
    const std::uint64_t D = static_cast<std::uint64_t>(grid.D());
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % D;
    const int pairs = static_cast<int>(tally.pair_joint.size());
    std::vector<int> digits;
    std::vector<int> central_depth(n + 1);
    for (long s = begin; s < end; ++s) {
        std::mt19937_64 rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(s))));
        digits.assign(1, 0); // digits[j] for j >= 1
        auto digit = [&](int j) {
            while (static_cast<int>(digits.size()) <= j) {
                std::uint64_t x;
                do x = rng();
                while (x >= limit);
                digits.push_back(static_cast<int>(x % D));
            }
            return digits[j];
        };
        int total = 0;
        for (int l = 1; l <= n; ++l) {
            // Deepest k with the point in the central tau^k part of its
            // level-l cell; windows are nested.
            i128 v = 0;
            int k = 0;
            while (k < win.depth) {
                v = v * static_cast<i128>(D) + digit(l + k + 1);
                // v: position among the D^{k+1} cells of depth k+1.
                if (v < win.lo[k + 1] || v >= win.lo[k + 1] + win.width[k + 1]) break;
                ++k;
            }
            central_depth[l] = k;
            total += k;
        }
        if (static_cast<int>(tally.D_hist.size()) <= total) tally.D_hist.resize(total + 1, 0);
        ++tally.D_hist[total];
        if (2 * total >= n) ++tally.hits;
        for (int k = 1; k <= kMomentDepth; ++k) {
            int sum = 0;
            for (int i = 1; i <= n; ++i) sum += central_depth[i] >= k;
            ++tally.sum_hist[k - 1][sum];
        }
        for (int i = 1; i <= std::min(n, 2); ++i)
            for (int k = 1; k <= 2; ++k) tally.mean_counts[i - 1][k - 1] += central_depth[i] >= k;
        for (int j = 0; j < pairs; ++j) {
            const bool a = central_depth[j + 1] >= 1, b = central_depth[j + 2] >= 1;
            tally.pair_first[j] += a;
            tally.pair_second[j] += b;
            tally.pair_joint[j] += a && b;
        }
    }
}

} // namespace

MonteCarloReport montecarlo_En(const Grid& grid, int n, long samples, std::uint64_t seed,
                               int threads) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be >= 1");
    if (samples < 1) throw Error(ErrorCode::InvalidArgument, "samples must be >= 1");
    const Windows win = make_windows(grid.D(), grid.T());
    const int pairs = std::max(0, std::min(3, n - 1));
    threads = std::max(1, threads);

    std::vector<Tally> parts(threads, Tally(n, pairs));
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
        const long begin = samples * t / threads, end = samples * (t + 1) / threads;
        if (threads == 1)
            run_range(grid, win, n, seed, begin, end, parts[t]);
        else
            pool.emplace_back(run_range, std::cref(grid), std::cref(win), n, seed, begin, end,
                              std::ref(parts[t]));
    }
    for (auto& th : pool) th.join();
    Tally tally(n, pairs);
    for (const auto& p : parts) tally.merge(p);

    MonteCarloReport rep;
    rep.n = n;
    rep.samples = samples;
    rep.seed = seed;
    rep.max_window_depth = win.depth;
    rep.D_histogram = tally.D_hist;
    const double N = static_cast<double>(samples);
    const double tau = 1.0 / grid.T();
    rep.measure_estimate = tally.hits / N;
    rep.std_error = std::sqrt(rep.measure_estimate * (1 - rep.measure_estimate) / N);

    for (int i = 1; i <= std::min(n, 2); ++i)
        for (int k = 1; k <= 2; ++k) {
            const double m = tally.mean_counts[i - 1][k - 1] / N;
            const double expected = std::pow(tau, k);
            const double se = std::sqrt(expected * (1 - expected) / N);
            rep.means.push_back({i, k, m, expected, se, (m - expected) / se});
        }

    for (int k = 1; k <= kMomentDepth; ++k) {
        const double tk = std::pow(tau, k);
        double m4 = 0;
        for (int s = 0; s <= n; ++s) {
            const double c = s - n * tk;
            m4 += tally.sum_hist[k - 1][s] * c * c * c * c;
        }
        m4 /= N;
        const double scale = static_cast<double>(n) * n * k * k * tk;
        rep.moments.push_back({k, m4, kFourthMomentConstant * scale, m4 / scale});
        rep.measured_constant = std::max(rep.measured_constant, m4 / scale);
    }
    for (int k = 1; k <= kMomentDepth; ++k)
        rep.bound += rep.measured_constant * k * k * std::pow(tau, 0.5 * k) /
                     (static_cast<double>(n) * n * std::ldexp(1.0, k));

    for (int j = 0; j < pairs; ++j) {
        const double a = tally.pair_first[j] / N, b = tally.pair_second[j] / N;
        const double joint = tally.pair_joint[j] / N;
        rep.pairs.push_back({j + 1, joint, a * b, std::sqrt(joint * (1 - joint) / N)});
    }
    return rep;
}

} // namespace rieszlab
