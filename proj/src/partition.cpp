#include "rieszlab/partition.hpp"

#include <algorithm>
#include <cmath>

#include "rieszlab/error.hpp"
#include "rieszlab/params.hpp"

namespace rieszlab {

namespace {

bool sorted_contains(const std::vector<std::int64_t>& v, std::int64_t x) {
    return std::binary_search(v.begin(), v.end(), x);
}

std::int64_t ipow(std::int64_t b, int e) {
    std::int64_t r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

} // namespace

Grid::Grid(long delta_inv, long tau_inv) : D_(delta_inv), T_(tau_inv) {
    if (D_ < 2 || T_ < 2 || D_ % T_ != 0)
        throw Error(ErrorCode::InvalidParams, "need 1/delta, 1/tau and tau/delta integers");
    if ((D_ - D_ / T_) % 2 != 0)
        throw Error(ErrorCode::GridMisaligned,
                    "1/delta - tau/delta must be even for centred windows on the mesh");
    max_level_ = 0;
    for (__int128 c = 1; c * D_ < (static_cast<__int128>(1) << 62); c *= D_) ++max_level_;
}

Grid Grid::from(const ParamSet& params) { return Grid(params.delta_inv, params.tau_inv); }

std::int64_t Grid::cells(int level) const {
    if (level < 0 || level > max_level_)
        throw Error(ErrorCode::IndexOutOfRange, "mesh level " + std::to_string(level) + " too fine");
    return ipow(D_, level);
}

void Grid::check(IntervalId q) const {
    if (q.index < 0 || q.index >= cells(q.level))
        throw Error(ErrorCode::IndexOutOfRange, "index " + std::to_string(q.index) +
                                                    " outside level " + std::to_string(q.level));
}

IntervalGeometry Grid::geometry(IntervalId q) const {
    check(q);
    const double n = static_cast<double>(cells(q.level));
    const double length = 1.0 / n;
    return {-0.5 + q.index / n, -0.5 + (q.index + 0.5) / n, length};
}

IntervalId Grid::ancestor(IntervalId q, int level) const {
    if (level > q.level) throw Error(ErrorCode::IndexOutOfRange, "ancestor below the interval");
    return {level, q.index / cells(q.level - level)};
}

bool Grid::contains(IntervalId outer, IntervalId inner) const {
    return inner.level >= outer.level && ancestor(inner, outer.level) == outer;
}

IntervalId Grid::locate(double t, int level) const {
    if (!(t >= -0.5 && t < 0.5)) throw Error(ErrorCode::IndexOutOfRange, "t outside I");
    const std::int64_t n = cells(level);
    auto i = static_cast<std::int64_t>(std::floor((t + 0.5) * static_cast<double>(n)));
    return {level, std::clamp<std::int64_t>(i, 0, n - 1)};
}

bool Grid::in_central(IntervalId q, int k, IntervalId cell) const {
    if (cell.level < q.level + k)
        throw Error(ErrorCode::GridMisaligned, "cell coarser than the central window");
    const IntervalId a = ancestor(cell, q.level + k);
    const std::int64_t span = cells(k);
    const std::int64_t pos = a.index - q.index * span;
    if (pos < 0 || pos >= span) return false;
    const std::int64_t width = ipow(D_ / T_, k);
    const std::int64_t lo = (span - width) / 2;
    return pos >= lo && pos < lo + width;
}

bool Grid::in_central_part(double t, IntervalId q, double a) const {
    check(q);
    if (!(a > 0 && a <= 1)) throw Error(ErrorCode::InvalidArgument, "a must lie in (0,1]");
    for (int j = 0; q.level + j <= max_level_; ++j) {
        const double span = static_cast<double>(cells(j));
        const double width = a * span;
        if (width != std::round(width)) continue;
        const auto w = static_cast<std::int64_t>(width);
        const auto s = static_cast<std::int64_t>(span);
        if ((s - w) % 2 != 0) continue;
        const IntervalId cell = locate(t, q.level + j);
        const std::int64_t pos = cell.index - q.index * s;
        const std::int64_t lo = (s - w) / 2;
        return pos >= lo && pos < lo + w;
    }
    throw Error(ErrorCode::GridMisaligned, "central part of relative length " + format_double(a) +
                                               " does not land on the mesh");
}

void DelayLedger::record(IntervalId q) {
    if (q.level >= static_cast<int>(by_level_.size())) by_level_.resize(q.level + 1);
    auto& v = by_level_[q.level];
    auto it = std::lower_bound(v.begin(), v.end(), q.index);
    if (it == v.end() || *it != q.index) v.insert(it, q.index);
}

bool DelayLedger::corrected(IntervalId q) const {
    return q.level < static_cast<int>(by_level_.size()) && sorted_contains(by_level_[q.level], q.index);
}

std::size_t DelayLedger::size() const {
    std::size_t n = 0;
    for (const auto& v : by_level_) n += v.size();
    return n;
}

const std::vector<std::int64_t>& DelayLedger::level(int m) const {
    static const std::vector<std::int64_t> empty;
    return m < static_cast<int>(by_level_.size()) ? by_level_[m] : empty;
}

bool SelectionLevel::in_G(std::int64_t i) const { return sorted_contains(G, i); }
bool SelectionLevel::is_good(std::int64_t i) const { return sorted_contains(good, i); }
bool SelectionLevel::is_delayed(std::int64_t i) const { return sorted_contains(delayed, i); }

DelaySplit delay_split(const Grid& grid, int level, const std::vector<std::int64_t>& candidates,
                       const DelayLedger& ledger) {
    DelaySplit out;
    for (std::int64_t idx : candidates) {
        const IntervalId q{level, idx};
        bool delayed = false;
        for (int j = 1; j < level && !delayed; ++j) {
            const IntervalId a = grid.ancestor(q, level - j);
            delayed = ledger.corrected(a) && grid.in_central(a, j, q);
        }
        (delayed ? out.delayed : out.good).push_back(idx);
    }
    return out;
}

int delayed_ancestors(const Grid& grid, IntervalId q, const std::vector<SelectionLevel>& levels) {
    int count = 0;
    for (int l = 1; l < q.level; ++l)
        if (levels.at(l).is_delayed(grid.ancestor(q, l).index)) ++count;
    return count;
}

SelectionLevel root_level() {
    SelectionLevel s;
    s.level = 0;
    s.G = {0};
    s.good = {0};
    return s;
}

SelectionLevel select_G(const Grid& grid, int m, const std::vector<SelectionLevel>& levels,
                        const DelayLedger& ledger, const SelectionRule& rule) {
    if (m < 1 || static_cast<int>(levels.size()) < m)
        throw Error(ErrorCode::LevelNotBuilt, "select_G needs levels 0.." + std::to_string(m - 1));
    SelectionLevel out;
    out.level = m;
    const std::int64_t D = grid.D();
    for (std::int64_t parent : levels[m - 1].G) {
        for (std::int64_t c = 0; c < D; ++c) {
            const IntervalId q{m, parent * D + c};
            if (rule.M_Q && !(rule.M_Q(q) <= rule.threshold)) {
                out.dropped_G1.push_back(q.index);
                continue;
            }
            if (2 * delayed_ancestors(grid, q, levels) > m) {
                out.dropped_G2.push_back(q.index);
                continue;
            }
            out.G.push_back(q.index);
        }
    }
    DelaySplit split = delay_split(grid, m, out.G, ledger);
    out.good = std::move(split.good);
    out.delayed = std::move(split.delayed);
    return out;
}

DCounts D_counters(const Grid& grid, IntervalId cell, int n) {
    grid.check(cell);
    DCounts out;
    for (int l = 1; l <= n; ++l) {
        const IntervalId q = grid.ancestor(cell, std::min(l, cell.level));
        // Central windows are nested in k: stop at the first miss.
        for (int k = 1; l + k <= cell.level; ++k) {
            if (!grid.in_central(q, k, cell)) break;
            if (static_cast<int>(out.per_k.size()) < k) out.per_k.resize(k, 0);
            ++out.per_k[k - 1];
            ++out.total;
        }
    }
    return out;
}

DCounts D_counters(const Grid& grid, double t, int n) {
    if (n > grid.max_level()) throw Error(ErrorCode::IndexOutOfRange, "n beyond the finest mesh");
    return D_counters(grid, grid.locate(t, grid.max_level()), n);
}

std::int64_t length_units(const Grid& grid, std::size_t count, int level, int L) {
    if (level > L) throw Error(ErrorCode::InvalidArgument, "unit level coarser than the length");
    return static_cast<std::int64_t>(count) * grid.cells(L - level);
}

} // namespace rieszlab
