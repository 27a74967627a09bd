#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rieszlab/quadrature.hpp"

namespace rieszlab {

// Plain key=value run configuration. Absent optionals are derived.
struct RunConfig {
    double alpha = 0.5;
    std::optional<double> p, theta, B, eps0, lambda, kappa;
    double delta = 0.125;
    double tau = 0.25;
    int n_max = 4;
    std::optional<double> eps_c, K0;
    std::uint64_t seed = 1;
    long samples = 100000;
    double theta_max = 0.5;
    QuadratureBudget budget;

    bool operator==(const RunConfig&) const;
};

RunConfig parse_config(const std::string& text);
std::string serialize_config(const RunConfig& cfg);
RunConfig load_config(const std::string& path);

// Integer n with 1/n == x exactly, or 0.
long exact_reciprocal(double x);

struct ParamSet {
    double alpha = 0, beta = 0;
    double p = 0, theta = 0, B = 0, eps0 = 0;
    double lambda = 0, gamma = 0;
    double kappa = 0;          // value in use
    double kappa_faithful = 0; // min((|B| lambda/2)^{1/p}, theta/8)
    bool kappa_overridden = false;
    double delta = 0, tau = 0;
    long delta_inv = 0, tau_inv = 0;
    double c_tail = 0, c_prime = 0; // far-field comb constant and C' proxy
    double X = 0, Y = 0, eta = 0, eta_prime = 0;
    double eps_c = 0, K0 = 0;
    double f1_mass = 0; // ∫_I |f_1|^p
    int n_max = 0;
    double theta_max = 0.5;

    double eps(int n) const { return eps_c / ((n + 1.0) * (n + 1.0)); }
    double K(int n) const { return K0 * n * n; }

    struct Check {
        std::string name;
        bool holds;
    };
    std::vector<Check> checks() const;
    // Throws InvalidParams naming the first failed invariant.
    void validate() const;
};

struct ScanRow {
    double x, y, value;
};

struct DerivationReport {
    std::vector<ScanRow> p_scan;      // (p, 0, J0(p))
    std::vector<ScanRow> eps0_scan;   // (eps, 0, J(eps,0))
    std::vector<ScanRow> theta_scan;  // (theta, 0, max over the box)
    std::vector<ScanRow> J_table;     // (eps, theta, J)
    std::vector<ScanRow> lambda_scan; // (lambda, eta, X)
};

struct Derivation {
    ParamSet params;
    DerivationReport report;
};

// Fixes the parameters in order: p, eps0, theta and B, lambda with gamma and
// kappa, delta and tau, eta, the eps and K sequences.
Derivation derive_params(const RunConfig& cfg);

// sup_{|s|<=1/2} sum_{k != 0} |s - k|^{-beta}.
double comb_tail_constant(double beta);

double gamma_of(double B, double lambda, double p);
double kappa_of(double B, double lambda, double p, double theta);

// ∫_I |f_1|^p with f_1(t) = F^[1](t - 1).
double seed_mass(double alpha, double p, const QuadratureBudget& budget = {});

// Writes a ParamSet as config lines with every derived value pinned.
RunConfig pinned_config(const RunConfig& base, const ParamSet& params);

} // namespace rieszlab
