#pragma once

#include <functional>
#include <vector>

#include "rieszlab/numeric.hpp"
#include "rieszlab/params.hpp"
#include "rieszlab/partition.hpp"
#include "rieszlab/quadrature.hpp"

namespace rieszlab {

class BlockProfile;

// One summand of the correction made at mesh level `level` (= step n):
// density side (lambda|Q|)^alpha * amplitude * e^{i theta} * phi_eps((t-c_Q)/(lambda|Q|)),
// potential side amplitude * e^{i theta} * F^[eps]((t-c_Q)/(lambda|Q|)).
struct BlockTerm {
    IntervalId Q;
    Complex amplitude; // f_n(c_Q), frozen at build time
    double eps = 0;    // eps_n
    bool osc_holds = false;
    double osc_ratio = 0; // osc_Q f_n / |f_n(c_Q)|
};

// Row n describes f_n on V_n, the union of the mesh level n-1 selection.
struct LevelMetrics {
    int n = 0;
    double V_len = 0;
    std::int64_t V_units = 0; // in cells of the finest selection level
    double Lp_int = 0;        // ∫_{V_n} |f_n|^p
    double sup_f = 0;         // sampled sup_{V_n} |f_n|
    double sup_diff = 0;      // sampled sup |f_n - f_{n-1}|
    double supp_sum = 0;      // sum_{m<n} |supp r_m|
    double sup_r = 0;         // sup |r_{n-1}|
    std::size_t G = 0, Gg = 0, Gd = 0;
    std::int64_t drop_G1_units = 0, drop_G2_units = 0; // cumulative
};

struct EngineOptions {
    int threads = 1;
    int osc_nodes = 33;
    int sup_samples = 4096;
    // Integrals of |f|^p that enter metrics and checks.
    QuadratureBudget tight = [] {
        QuadratureBudget b;
        b.abs_tol = 1e-13;
        b.rel_tol = 1e-12;
        b.max_subdivisions = 200000;
        return b;
    }();
    // M_Q for the (G1) test, compared against a loose threshold.
    QuadratureBudget selection = [] {
        QuadratureBudget b;
        b.abs_tol = 1e-10;
        b.rel_tol = 1e-6;
        return b;
    }();
};

class ConstructionState {
public:
    ConstructionState(RunConfig config, ParamSet params);

    const RunConfig& config() const { return config_; }
    const ParamSet& params() const { return params_; }
    const Grid& grid() const { return grid_; }
    // Selection at mesh levels 0..built()-1; f_1..f_built() are defined.
    const std::vector<SelectionLevel>& levels() const { return levels_; }
    const std::vector<BlockTerm>& blocks(int m) const;
    const DelayLedger& ledger() const { return ledger_; }
    const std::vector<LevelMetrics>& metrics() const { return metrics_; }
    int built() const { return static_cast<int>(levels_.size()); }
    std::size_t block_count() const;
    double supp_sum() const;

    Complex f1(double t) const;
    Complex g1(double t) const;
    Complex eval_f(int n, double t) const;
    Complex eval_g(int n, double t) const;
    // Potential-side sum of the blocks made at mesh level m.
    Complex level_sum(int m, double t) const;
    // Same sum without the block whose interval contains t.
    Complex tail_T(int m, double t) const;
    // Own block of Q (mesh level m) at t, amplitude e^{i theta} F_Q included.
    Complex block_term(const BlockTerm& b, double t) const;
    // Density-side value of one block.
    Complex block_density(const BlockTerm& b, double t) const;
    // Block centres (and core edges) of levels < n inside [a, b].
    std::vector<double> breakpoints(int n, double a, double b) const;

    // Used by build_level and state loading.
    void append_level(SelectionLevel sel, std::vector<BlockTerm> blocks);
    void set_metrics(std::vector<LevelMetrics> m) { metrics_ = std::move(m); }

private:
    struct LevelSum {
        double eps = 0, unit_scale = 0, length = 0;
        Complex pref;
        std::vector<double> centres;
        std::vector<Complex> amps;
    };
    void index_level(int m);

    RunConfig config_;
    ParamSet params_;
    Grid grid_;
    const BlockProfile* profile_;
    Complex rot_;
    std::vector<double> crossings_unit_; // F^[1] crossings of its boundary layer
    std::vector<SelectionLevel> levels_;
    std::vector<std::vector<BlockTerm>> blocks_;
    std::vector<LevelSum> sums_;
    DelayLedger ledger_;
    std::vector<LevelMetrics> metrics_;
};

Complex eval_f(const ConstructionState& s, int n, double t);
Complex eval_g(const ConstructionState& s, int n, double t);
Complex tail_T(const ConstructionState& s, int m, double t);

double block_F_embedded(const ConstructionState& s, IntervalId Q, double eps, double t);

using Evaluator = std::function<Complex(double)>;

// ((1/|Q|) ∫_Q |h|^p)^{1/p}
double M_Q_norm(const Evaluator& h, double a, double b, double p, std::span<const double> breakpoints,
                const QuadratureBudget& budget = {});
// ∫_a^b |h|^p
double Lp_integral(const Evaluator& h, double a, double b, double p,
                   std::span<const double> breakpoints, const QuadratureBudget& budget = {});
// Largest pairwise distance of the values on a uniform node set.
double oscillation(const Evaluator& h, double a, double b, int nodes);

// Selects mesh level built(), records the (osc) flags and amplitudes, appends
// the blocks and ledger events. BudgetExceeded if sum |supp r| would reach 1/4.
void build_level(ConstructionState& s, const EngineOptions& opt = {});

// Builds f_1..f_{n_max} and records the per-level metrics.
ConstructionState run_construction(const RunConfig& cfg, const ParamSet& params,
                                   const EngineOptions& opt = {});
std::vector<LevelMetrics> compute_metrics(const ConstructionState& s, const EngineOptions& opt = {});

// Deterministic parallel loop over [0, n); results are written by index.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

} // namespace rieszlab
