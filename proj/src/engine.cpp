#include "rieszlab/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "rieszlab/block_profile.hpp"
#include "rieszlab/error.hpp"
#include "rieszlab/finitizator.hpp"
#include "rieszlab/functionals.hpp"

namespace rieszlab {

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const int count = static_cast<int>(std::min<std::size_t>(threads, n));
    for (int t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

ConstructionState::ConstructionState(RunConfig config, ParamSet params)
    : config_(std::move(config)), params_(std::move(params)), grid_(Grid::from(params_)),
      profile_(&block_profile(params_.alpha)), rot_(std::polar(1.0, params_.theta)) {
    levels_.push_back(root_level());
    blocks_.emplace_back();
    sums_.emplace_back();
}

const std::vector<BlockTerm>& ConstructionState::blocks(int m) const {
    if (m < 0 || m >= static_cast<int>(blocks_.size()))
        throw Error(ErrorCode::LevelNotBuilt, "no blocks at level " + std::to_string(m));
    return blocks_[m];
}

std::size_t ConstructionState::block_count() const {
    std::size_t n = 0;
    for (const auto& b : blocks_) n += b.size();
    return n;
}

double ConstructionState::supp_sum() const {
    CompensatedSum<double> s;
    for (int m = 1; m < static_cast<int>(blocks_.size()); ++m)
        s += blocks_[m].size() * params_.eps(m) * params_.lambda / grid_.cells(m);
    return s.value();
}

void ConstructionState::append_level(SelectionLevel sel, std::vector<BlockTerm> blocks) {
    const int m = built();
    if (sel.level != m) throw Error(ErrorCode::MalformedState, "selection level out of order");
    for (const auto& b : blocks) {
        if (b.Q.level != m || !sel.is_good(b.Q.index))
            throw Error(ErrorCode::MalformedState, "block outside the good set");
        ledger_.record(b.Q);
    }
    levels_.push_back(std::move(sel));
    blocks_.push_back(std::move(blocks));
    index_level(m);
}

void ConstructionState::index_level(int m) {
    LevelSum L;
    L.eps = params_.eps(m);
    L.length = 1.0 / grid_.cells(m);
    L.unit_scale = 1.0 / (params_.lambda * L.length * L.eps);
    L.pref = std::pow(L.eps, -params_.beta) * rot_;
    for (const auto& b : blocks_[m]) {
        L.centres.push_back(grid_.geometry(b.Q).center);
        L.amps.push_back(b.amplitude);
    }
    if (!std::is_sorted(L.centres.begin(), L.centres.end()))
        throw Error(ErrorCode::MalformedState, "blocks not in index order");
    if (static_cast<int>(sums_.size()) <= m) sums_.resize(m + 1);
    sums_[m] = std::move(L);
}

Complex ConstructionState::f1(double t) const { return profile_->unit(t - 1.0); }

Complex ConstructionState::g1(double t) const { return finitizator(t - 1.0); }

Complex ConstructionState::level_sum(int m, double t) const {
    const LevelSum& L = sums_.at(m);
    ComplexSum acc;
    for (std::size_t i = 0; i < L.centres.size(); ++i)
        acc += L.amps[i] * profile_->unit((t - L.centres[i]) * L.unit_scale);
    return L.pref * acc.value();
}

Complex ConstructionState::tail_T(int m, double t) const {
    if (m < 1 || m >= built()) throw Error(ErrorCode::LevelNotBuilt, "tail_T level");
    const LevelSum& L = sums_[m];
    std::int64_t own = -1;
    if (t >= -0.5 && t < 0.5) own = grid_.locate(t, m).index;
    ComplexSum acc;
    for (std::size_t i = 0; i < L.centres.size(); ++i) {
        if (blocks_[m][i].Q.index == own) continue;
        acc += L.amps[i] * profile_->unit((t - L.centres[i]) * L.unit_scale);
    }
    return L.pref * acc.value();
}

Complex ConstructionState::block_term(const BlockTerm& b, double t) const {
    const double len = 1.0 / grid_.cells(b.Q.level);
    const double c = grid_.geometry(b.Q).center;
    return b.amplitude * rot_ * profile_->value(b.eps, (t - c) / (params_.lambda * len));
}

Complex ConstructionState::block_density(const BlockTerm& b, double t) const {
    const double len = 1.0 / grid_.cells(b.Q.level);
    const double c = grid_.geometry(b.Q).center;
    const double x = (t - c) / (params_.lambda * len);
    return std::pow(params_.lambda * len, params_.alpha) * b.amplitude * rot_ *
           (finitizator(x / b.eps) / b.eps);
}

Complex ConstructionState::eval_f(int n, double t) const {
    if (n < 1 || n > built())
        throw Error(ErrorCode::LevelNotBuilt, "f_" + std::to_string(n) + " not built");
    Complex f = f1(t);
    for (int m = 1; m < n; ++m) f -= level_sum(m, t);
    return f;
}

Complex ConstructionState::eval_g(int n, double t) const {
    if (n < 1 || n > built())
        throw Error(ErrorCode::LevelNotBuilt, "g_" + std::to_string(n) + " not built");
    Complex g = g1(t);
    for (int m = 1; m < n; ++m) {
        const LevelSum& L = sums_[m];
        const double half = 0.5 * L.eps * params_.lambda * L.length;
        auto lo = std::lower_bound(L.centres.begin(), L.centres.end(), t - half);
        ComplexSum r;
        for (auto it = lo; it != L.centres.end() && *it <= t + half; ++it)
            r += block_density(blocks_[m][it - L.centres.begin()], t);
        g -= r.value();
    }
    return g;
}

std::vector<double> ConstructionState::breakpoints(int n, double a, double b) const {
    std::vector<double> pts;
    for (int m = 1; m < std::min(n, built()); ++m) {
        const LevelSum& L = sums_[m];
        std::vector<double> offsets{0.0, 0.5 * L.eps * params_.lambda * L.length};
        // Crossings of F = 1, where |1 - e^{i theta} F| dips.
        for (double r : level_crossings(L.eps, 1.0, params_.alpha))
            offsets.push_back(r * params_.lambda * L.length);
        const double reach = *std::max_element(offsets.begin(), offsets.end());
        auto lo = std::lower_bound(L.centres.begin(), L.centres.end(), a - reach);
        for (auto it = lo; it != L.centres.end() && *it <= b + reach; ++it)
            for (double o : offsets)
                for (double x : {*it - o, *it + o})
                    if (x >= a && x <= b) pts.push_back(x);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

Complex eval_f(const ConstructionState& s, int n, double t) { return s.eval_f(n, t); }
Complex eval_g(const ConstructionState& s, int n, double t) { return s.eval_g(n, t); }
Complex tail_T(const ConstructionState& s, int m, double t) { return s.tail_T(m, t); }

double block_F_embedded(const ConstructionState& s, IntervalId Q, double eps, double t) {
    const auto geo = s.grid().geometry(Q);
    return block_F(eps, (t - geo.center) / (geo.length * s.params().lambda), s.params().alpha);
}

double Lp_integral(const Evaluator& h, double a, double b, double p,
                   std::span<const double> breakpoints, const QuadratureBudget& budget) {
    if (!(p > 0)) throw Error(ErrorCode::InvalidExponent, "p must be positive");
    Integrand g = [&](double t) { return Complex(std::pow(std::abs(h(t)), p)); };
    return integrate_singular(g, a, b, breakpoints, budget).value.real();
}

double M_Q_norm(const Evaluator& h, double a, double b, double p,
                std::span<const double> breakpoints, const QuadratureBudget& budget) {
    return std::pow(Lp_integral(h, a, b, p, breakpoints, budget) / (b - a), 1.0 / p);
}

double oscillation(const Evaluator& h, double a, double b, int nodes) {
    if (nodes < 2) throw Error(ErrorCode::InvalidArgument, "oscillation needs >= 2 nodes");
    std::vector<Complex> v(nodes);
    for (int i = 0; i < nodes; ++i) v[i] = h(a + (b - a) * i / (nodes - 1));
    double osc = 0;
    for (int i = 0; i < nodes; ++i)
        for (int j = i + 1; j < nodes; ++j) osc = std::max(osc, std::abs(v[i] - v[j]));
    return osc;
}

void build_level(ConstructionState& s, const EngineOptions& opt) {
    const int m = s.built();
    const int n = m; // the level-m blocks correct f_n
    const ParamSet& ps = s.params();
    const Grid& grid = s.grid();
    const std::int64_t D = grid.D();

    // (G1) norms for every child of the previous selection, in parallel.
    const auto& parents = s.levels()[m - 1].G;
    std::vector<std::int64_t> children;
    for (std::int64_t q : parents)
        for (std::int64_t c = 0; c < D; ++c) children.push_back(q * D + c);
    std::vector<double> mq(children.size());
    auto f_n = [&](double t) { return s.eval_f(n, t); };
    parallel_for(children.size(), opt.threads, [&](std::size_t i) {
        const auto geo = grid.geometry({m, children[i]});
        const double a = geo.left, b = geo.left + geo.length;
        const auto bps = s.breakpoints(n, a, b);
        mq[i] = M_Q_norm(f_n, a, b, ps.p, bps, opt.selection);
    });
    SelectionRule rule;
    rule.threshold = ps.K(n) * std::pow(ps.eta, n);
    rule.M_Q = [&](IntervalId q) {
        auto it = std::lower_bound(children.begin(), children.end(), q.index);
        return mq[it - children.begin()];
    };
    SelectionLevel sel = select_G(grid, m, s.levels(), s.ledger(), rule);

    const double added = sel.good.size() * ps.eps(n) * ps.lambda / grid.cells(m);
    if (s.supp_sum() + added >= 0.25)
        throw Error(ErrorCode::BudgetExceeded,
                    "support budget reaches 1/4 at level " + std::to_string(m));

    std::vector<BlockTerm> blocks(sel.good.size());
    parallel_for(blocks.size(), opt.threads, [&](std::size_t i) {
        BlockTerm& b = blocks[i];
        b.Q = {m, sel.good[i]};
        b.eps = ps.eps(n);
        const auto geo = grid.geometry(b.Q);
        b.amplitude = s.eval_f(n, geo.center);
        const double osc = oscillation(f_n, geo.left, geo.left + geo.length, opt.osc_nodes);
        b.osc_ratio = osc / std::abs(b.amplitude);
        b.osc_holds = osc <= ps.kappa * std::abs(b.amplitude);
    });
    s.append_level(std::move(sel), std::move(blocks));
}

std::vector<LevelMetrics> compute_metrics(const ConstructionState& s, const EngineOptions& opt) {
    const ParamSet& ps = s.params();
    const Grid& grid = s.grid();
    const int L = s.built() - 1;
    std::vector<LevelMetrics> rows;
    std::int64_t drop1 = 0, drop2 = 0;
    for (int n = 1; n <= s.built(); ++n) {
        const SelectionLevel& sel = s.levels()[n - 1];
        LevelMetrics r;
        r.n = n;
        r.G = sel.G.size();
        r.Gg = sel.good.size();
        r.Gd = sel.delayed.size();
        r.V_units = length_units(grid, sel.G.size(), n - 1, L);
        r.V_len = static_cast<double>(sel.G.size()) / grid.cells(n - 1);
        drop1 += length_units(grid, sel.dropped_G1.size(), n - 1, L);
        drop2 += length_units(grid, sel.dropped_G2.size(), n - 1, L);
        r.drop_G1_units = drop1;
        r.drop_G2_units = drop2;

        auto f_n = [&](double t) { return s.eval_f(n, t); };
        std::vector<double> parts(sel.G.size());
        parallel_for(parts.size(), opt.threads, [&](std::size_t i) {
            const auto geo = grid.geometry({n - 1, sel.G[i]});
            const double a = geo.left, b = geo.left + geo.length;
            parts[i] = Lp_integral(f_n, a, b, ps.p, s.breakpoints(n, a, b), opt.tight);
        });
        CompensatedSum<double> lp;
        for (double v : parts) lp += v;
        r.Lp_int = lp.value();

        const int N = opt.sup_samples;
        std::vector<double> sup_f(N, 0.0), sup_d(N, 0.0);
        parallel_for(N, opt.threads, [&](std::size_t j) {
            const double t = -0.5 + (j + 0.5) / N;
            const Complex fn = s.eval_f(n, t);
            if (sel.in_G(grid.locate(t, n - 1).index)) sup_f[j] = std::abs(fn);
            if (n > 1) sup_d[j] = std::abs(fn - s.eval_f(n - 1, t));
        });
        r.sup_f = *std::max_element(sup_f.begin(), sup_f.end());
        r.sup_diff = *std::max_element(sup_d.begin(), sup_d.end());

        CompensatedSum<double> supp;
        for (int m = 1; m < n; ++m)
            supp += s.blocks(m).size() * ps.eps(m) * ps.lambda / grid.cells(m);
        r.supp_sum = supp.value();
        if (n > 1) {
            const double len = 1.0 / grid.cells(n - 1);
            const double eps = ps.eps(n - 1);
            for (const auto& b : s.blocks(n - 1))
                r.sup_r = std::max(r.sup_r, std::pow(ps.lambda * len, ps.alpha) *
                                                std::abs(b.amplitude) * finitizator(0.0) / eps);
        }
        rows.push_back(r);
    }
    return rows;
}

ConstructionState run_construction(const RunConfig& cfg, const ParamSet& params,
                                   const EngineOptions& opt) {
    params.validate();
    ConstructionState s(cfg, params);
    while (s.built() < params.n_max) build_level(s, opt);
    s.set_metrics(compute_metrics(s, opt));
    return s;
}

} // namespace rieszlab
