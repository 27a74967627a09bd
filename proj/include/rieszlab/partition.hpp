#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <vector>

namespace rieszlab {

struct ParamSet;

// Mesh level m has D^m closed-open cells of length delta^m; level 0 is I.
struct IntervalId {
    int level = 0;
    std::int64_t index = 0;
    auto operator<=>(const IntervalId&) const = default;
};

struct IntervalGeometry {
    double left, center, length;
};

// Exact integer arithmetic on the nested meshes for delta = 1/D, tau = 1/T.
class Grid {
public:
    // Needs D % T == 0 and D - D/T even, so every central window has
    // integer end points on the child mesh (GridMisaligned otherwise).
    Grid(long delta_inv, long tau_inv);
    static Grid from(const ParamSet& params);

    long D() const { return D_; }
    long T() const { return T_; }

    // D^level; IndexOutOfRange when it does not fit in 62 bits.
    std::int64_t cells(int level) const;
    int max_level() const { return max_level_; }

    void check(IntervalId q) const;
    IntervalGeometry geometry(IntervalId q) const;
    IntervalId ancestor(IntervalId q, int level) const;
    bool contains(IntervalId outer, IntervalId inner) const;
    // Cell of the given level containing t in [-1/2, 1/2).
    IntervalId locate(double t, int level) const;

    // Is cell (level >= q.level + k) inside the concentric part of q of
    // relative length tau^k?
    bool in_central(IntervalId q, int k, IntervalId cell) const;

    // Same for a real point and an arbitrary relative length a, provided a|Q|
    // and its offset land on some finer mesh.
    bool in_central_part(double t, IntervalId q, double a) const;

private:
    long D_, T_;
    int max_level_;
};

// Corrected intervals, by level; events are never removed.
class DelayLedger {
public:
    void record(IntervalId q);
    bool corrected(IntervalId q) const;
    std::size_t size() const;
    const std::vector<std::int64_t>& level(int m) const;
    int levels() const { return static_cast<int>(by_level_.size()); }

private:
    std::vector<std::vector<std::int64_t>> by_level_; // sorted
};

struct SelectionLevel {
    int level = 0;
    std::vector<std::int64_t> G, good, delayed;          // sorted indices
    std::vector<std::int64_t> dropped_G1, dropped_G2;    // sorted indices

    bool in_G(std::int64_t i) const;
    bool is_good(std::int64_t i) const;
    bool is_delayed(std::int64_t i) const;
};

struct DelaySplit {
    std::vector<std::int64_t> good, delayed;
};

// Q is delayed iff it lies in the central tau^j part of an ancestor corrected
// j levels above it.
DelaySplit delay_split(const Grid& grid, int level, const std::vector<std::int64_t>& candidates,
                       const DelayLedger& ledger);

// Number of ancestors of q at levels 1..q.level-1 that were delayed.
int delayed_ancestors(const Grid& grid, IntervalId q, const std::vector<SelectionLevel>& levels);

struct SelectionRule {
    // Returns M_Q(f_n) for a candidate; compared against threshold.
    std::function<double(IntervalId)> M_Q;
    double threshold = 0; // K_n eta^n
};

// Level m: children of G_{m-1} passing (G1) M_Q <= threshold and
// (G2) 2*delayed_ancestors <= m, split into good and delayed.
// levels holds 0..m-1. Level 0 is {I}.
SelectionLevel select_G(const Grid& grid, int m, const std::vector<SelectionLevel>& levels,
                        const DelayLedger& ledger, const SelectionRule& rule);

SelectionLevel root_level();

struct DCounts {
    std::vector<int> per_k; // per_k[k-1] = D_n^k
    int total = 0;
};

// D_n^k(cell) = #{l = 1..n : cell in the central tau^k part of its level-l
// ancestor}, for every k with l + k <= cell.level.
DCounts D_counters(const Grid& grid, IntervalId cell, int n);
// Real t, represented on the finest mesh the grid supports.
DCounts D_counters(const Grid& grid, double t, int n);

// Lengths in units of the level-L mesh, exact.
std::int64_t length_units(const Grid& grid, std::size_t count, int level, int L);

} // namespace rieszlab
