#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rieszlab/engine.hpp"
#include "rieszlab/kernels.hpp"

namespace rieszlab {

enum class CheckStatus { holds, fails, vacuous };

const char* to_string(CheckStatus s);

struct VerificationReport {
    std::string check_name;
    std::string anchor; // the inequality or identity being measured
    CheckStatus status = CheckStatus::holds;
    double margin = 0;    // bound minus measured, >= 0 when it holds
    double tolerance = 0; // slack allowed on top of the bound
    nlohmann::ordered_json context = nlohmann::ordered_json::object();

    bool holds() const { return status == CheckStatus::holds; }
};

struct HolderFit {
    double exponent = 0; // +inf when every sampled modulus is 0
    double intercept = 0;
    std::vector<double> scales_used; // strictly decreasing
    std::vector<double> moduli;
    double residual = 0; // rms of the log-log fit
};

struct VerifyOptions {
    int threads = 1;
    int tail_samples = 257;
    int point2_nodes = 65;
    int dual_kernel_samples = 16;
    int holder_pairs = 4096;
    std::vector<double> holder_scales{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
    // Integrals of |f|^p differences; abs_tol is rescaled per interval.
    QuadratureBudget tight = [] {
        QuadratureBudget b;
        b.abs_tol = 1e-15;
        b.rel_tol = 1e-9;
        b.max_subdivisions = 200000;
        return b;
    }();
};

// Stored amplitudes equal f_m(c_Q) recomputed from the state, bitwise, and
// f_{m+1} = f_m - (level m block sum) at sampled points.
VerificationReport check_exact_representation(const ConstructionState& s, const VerifyOptions& o = {});
// sum |supp r_k| <= lambda sum eps_k < 1/4.
VerificationReport check_support_budget(const ConstructionState& s);
// Nesting, good/delayed split, (G2) and |V_n| = 1 - drops in integer units.
VerificationReport check_accounting(const ConstructionState& s);
// Delayed levels of a point's chain never exceed D_n(t).
VerificationReport check_injectivity(const ConstructionState& s, const VerifyOptions& o = {});
// g_n = g_1 outside I.
VerificationReport check_outside_I(const ConstructionState& s, const VerifyOptions& o = {});

// Point 1, point 2 lower, point 2 upper for one corrected interval; all three
// vacuous when its (osc) flag is false.
std::vector<VerificationReport> check_block_correction(const ConstructionState& s, const BlockTerm& b,
                                             const VerifyOptions& o = {});
// The three checks aggregated over every corrected interval, plus the peak
// bound |1 - e^{i theta} F^[eps](0)| >= theta/2 at every level.
std::vector<VerificationReport> check_block_correction_all(const ConstructionState& s, const VerifyOptions& o = {});

// Per-level integrals and ratios against eta, then per-interval factors: X on
// corrected intervals with the (osc) flag, Y on delayed intervals.
std::vector<VerificationReport> check_decay(const ConstructionState& s, const VerifyOptions& o = {});

std::vector<VerificationReport> check_tails(const ConstructionState& s, const std::vector<double>& t_samples,
                                            const VerifyOptions& o = {});
std::vector<double> default_tail_samples(int count);

// omega(s) = sup over sampled pairs |x - y| <= s of |F(x) - F(y)|, then the
// log-log slope. Pairs (x, x+s) run over a generic grid; `features` adds
// pairs (x-s, x) and (x, x+s) at points where F has fine structure.
HolderFit estimate_holder(const std::function<Complex(double)>& F, double a, double b,
                          const std::vector<double>& scales, int pairs_per_scale,
                          const std::vector<double>& features = {});
VerificationReport check_holder_fn(const ConstructionState& s, const VerifyOptions& o = {});

VerificationReport check_vanishing(const ConstructionState& s, const VerifyOptions& o = {});

// Points of E = V minus S on the finest built mesh refined three times, with S
// rounded outward.
std::vector<double> sample_E(const ConstructionState& s, int count);
std::vector<VerificationReport> check_dual_kernel(const ConstructionState& s, const std::vector<double>& t_samples,
                                               const VerifyOptions& o = {});

double potential_holder_coefficient(double alpha);
VerificationReport check_potential_holder(const SmoothDensity& f, double sup_f, double alpha,
                                          const std::vector<double>& t_grid,
                                          const std::vector<double>& h_grid);

// W of one stored density summand against its potential-side block.
VerificationReport check_block_scaling(const ConstructionState& s);

std::vector<VerificationReport> run_verification(const ConstructionState& s, const VerifyOptions& o = {});

nlohmann::ordered_json to_json(const VerificationReport& r);
std::string summary_table(const std::vector<VerificationReport>& reports);

} // namespace rieszlab
