#include "rieszlab/params.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "rieszlab/block_profile.hpp"
#include "rieszlab/error.hpp"
#include "rieszlab/functionals.hpp"

namespace rieszlab {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

template <typename Int>
Int parse_int(const std::string& s) {
    Int v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw Error(ErrorCode::ConfigError, "not an integer: '" + s + "'");
    return v;
}

// "1/N" or a decimal.
double parse_ratio(const std::string& s) {
    const auto slash = s.find('/');
    if (slash == std::string::npos) return parse_double(s);
    const double num = parse_double(trim(std::string_view(s).substr(0, slash)));
    const double den = parse_double(trim(std::string_view(s).substr(slash + 1)));
    if (den == 0) throw Error(ErrorCode::ConfigError, "zero denominator in '" + s + "'");
    return num / den;
}

std::string format_ratio(double x) {
    const long n = exact_reciprocal(x);
    return n > 0 ? "1/" + std::to_string(n) : format_double(x);
}

} // namespace

long exact_reciprocal(double x) {
    if (!(x > 0 && x <= 1)) return 0;
    const double r = std::round(1.0 / x);
    if (r > 1e15 || 1.0 / r != x) return 0;
    return static_cast<long>(r);
}

bool RunConfig::operator==(const RunConfig& o) const {
    return serialize_config(*this) == serialize_config(o);
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    using Setter = std::function<void(const std::string&)>;
    const std::map<std::string, Setter> setters = {
        {"alpha", [&](const std::string& v) { cfg.alpha = parse_double(v); }},
        {"p", [&](const std::string& v) { cfg.p = parse_double(v); }},
        {"theta", [&](const std::string& v) { cfg.theta = parse_double(v); }},
        {"B", [&](const std::string& v) { cfg.B = parse_double(v); }},
        {"eps0", [&](const std::string& v) { cfg.eps0 = parse_double(v); }},
        {"lambda", [&](const std::string& v) { cfg.lambda = parse_double(v); }},
        {"kappa", [&](const std::string& v) { cfg.kappa = parse_double(v); }},
        {"delta", [&](const std::string& v) { cfg.delta = parse_ratio(v); }},
        {"tau", [&](const std::string& v) { cfg.tau = parse_ratio(v); }},
        {"n_max", [&](const std::string& v) { cfg.n_max = parse_int<int>(v); }},
        {"eps_c", [&](const std::string& v) { cfg.eps_c = parse_double(v); }},
        {"K0", [&](const std::string& v) { cfg.K0 = parse_double(v); }},
        {"seed", [&](const std::string& v) { cfg.seed = parse_int<std::uint64_t>(v); }},
        {"samples", [&](const std::string& v) { cfg.samples = parse_int<long>(v); }},
        {"theta_max", [&](const std::string& v) { cfg.theta_max = parse_double(v); }},
        {"abs_tol", [&](const std::string& v) { cfg.budget.abs_tol = parse_double(v); }},
        {"rel_tol", [&](const std::string& v) { cfg.budget.rel_tol = parse_double(v); }},
        {"max_subdivisions",
         [&](const std::string& v) { cfg.budget.max_subdivisions = parse_int<int>(v); }},
        {"truncation_radius",
         [&](const std::string& v) { cfg.budget.truncation_radius = parse_double(v); }},
    };
    std::map<std::string, int> seen;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        auto it = setters.find(key);
        if (it == setters.end())
            throw Error(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (seen[key]++)
            throw Error(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        it->second(value);
    }
    if (cfg.n_max < 1) throw Error(ErrorCode::ConfigError, "n_max must be >= 1");
    if (cfg.samples < 1) throw Error(ErrorCode::ConfigError, "samples must be >= 1");
    try {
        cfg.budget.validate();
    } catch (const Error& e) {
        throw Error(ErrorCode::ConfigError, e.what());
    }
    return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream out;
    auto put = [&](const char* key, const std::string& v) { out << key << " = " << v << '\n'; };
    auto opt = [&](const char* key, const std::optional<double>& v) {
        if (v) put(key, format_double(*v));
    };
    put("alpha", format_double(cfg.alpha));
    opt("p", cfg.p);
    opt("theta", cfg.theta);
    opt("B", cfg.B);
    opt("eps0", cfg.eps0);
    opt("lambda", cfg.lambda);
    opt("kappa", cfg.kappa);
    put("delta", format_ratio(cfg.delta));
    put("tau", format_ratio(cfg.tau));
    put("n_max", std::to_string(cfg.n_max));
    opt("eps_c", cfg.eps_c);
    opt("K0", cfg.K0);
    put("seed", std::to_string(cfg.seed));
    put("samples", std::to_string(cfg.samples));
    put("theta_max", format_double(cfg.theta_max));
    put("abs_tol", format_double(cfg.budget.abs_tol));
    put("rel_tol", format_double(cfg.budget.rel_tol));
    put("max_subdivisions", std::to_string(cfg.budget.max_subdivisions));
    put("truncation_radius", format_double(cfg.budget.truncation_radius));
    return out.str();
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::vector<ParamSet::Check> ParamSet::checks() const {
    const double sum_eps = eps_c * (kPi * kPi / 6.0 - 1.0);
    return {
        {"0 < alpha < 1", alpha > 0 && alpha < 1},
        {"beta = alpha + 1", beta == alpha + 1.0},
        {"0 < p < 1/beta", p > 0 && p < 1.0 / beta},
        {"B < 0", B < 0},
        {"0 < theta <= theta_max", theta > 0 && theta <= theta_max},
        {"eps0 > 0", eps0 > 0},
        {"lambda > 0", lambda > 0},
        {"0 < gamma < 1", gamma > 0 && gamma < 1},
        {"kappa > 0", kappa > 0},
        {"1/delta integer", delta_inv > 1 && 1.0 / delta_inv == delta},
        {"1/tau integer", tau_inv > 1 && 1.0 / tau_inv == tau},
        {"tau/delta integer", delta_inv > 0 && tau_inv > 0 && delta_inv % tau_inv == 0},
        {"0 < eta < 1", eta > 0 && eta < 1},
        {"sum eps_n < 1/4", eps_c > 0 && sum_eps < 0.25},
        {"eps_n <= eps0", eps(1) <= eps0},
        {"K0 > 0", K0 > 0},
        {"n_max >= 1", n_max >= 1},
    };
}

void ParamSet::validate() const {
    for (const auto& c : checks())
        if (!c.holds) throw Error(ErrorCode::InvalidParams, "invariant fails: " + c.name);
}

double comb_tail_constant(double beta) {
    constexpr int kTerms = 2000;
    double best = 0;
    for (int i = 0; i <= 100; ++i) {
        const double s = 0.005 * i;
        CompensatedSum<double> sum;
        for (int k = kTerms; k >= 1; --k) {
            sum += std::pow(k - s, -beta);
            sum += std::pow(k + s, -beta);
        }
        // Remainder by the midpoint integral.
        sum += std::pow(kTerms + 0.5 - s, 1.0 - beta) / (beta - 1.0);
        sum += std::pow(kTerms + 0.5 + s, 1.0 - beta) / (beta - 1.0);
        best = std::max(best, sum.value());
    }
    return best;
}

double gamma_of(double B, double lambda, double p) {
    return std::pow(1.0 + B * lambda / 2.0, 1.0 / p);
}

double kappa_of(double B, double lambda, double p, double theta) {
    return std::min(std::pow(std::abs(B) * lambda / 2.0, 1.0 / p), theta / 8.0);
}

double seed_mass(double alpha, double p, const QuadratureBudget& budget) {
    const BlockProfile& prof = block_profile(alpha);
    Integrand h = [&](double t) { return Complex(std::pow(std::abs(prof.unit(t - 1.0)), p)); };
    const double pts[] = {-0.5, 0.5};
    return integrate_singular(h, -0.5, 0.5, pts, budget).value.real();
}

namespace {

// Negative-J scans. Each fills its report table.
double scan_p(const RunConfig& cfg, DerivationReport& rep) {
    const double alpha = cfg.alpha;
    const double p_max = 1.0 / (alpha + 1.0);
    double best_p = 0, best_J = 0;
    auto consider = [&](double p) {
        const double j = J0(p, alpha, cfg.budget);
        rep.p_scan.push_back({p, 0.0, j});
        if (j < best_J) {
            best_J = j;
            best_p = p;
        }
    };
    for (int i = 1; i <= 25; ++i) {
        const double p = 0.02 * i;
        if (p < p_max) consider(p);
    }
    for (int j = 0; best_p == 0; ++j) {
        const double p = 0.01 * std::ldexp(1.0, -j);
        if (p < 1e-4) break;
        consider(p);
    }
    if (best_p == 0)
        throw Error(ErrorCode::NoNegativeJ,
                    "no p in the scan grid gives J0(p) < 0 for alpha=" + format_double(alpha));
    return best_p;
}

double scan_eps0(const RunConfig& cfg, double p, DerivationReport& rep) {
    const double cap = cfg.eps0.value_or(0.1);
    double eps0 = 0;
    for (int i = 1; 0.01 * i <= cap * (1 + 1e-12); ++i) {
        const double e = 0.01 * i;
        const double j = J_eps_theta(e, 0.0, p, cfg.alpha, cfg.budget);
        rep.eps0_scan.push_back({e, 0.0, j});
        if (!(j < 0)) break;
        eps0 = e;
    }
    if (cfg.eps0 && eps0 > 0 && eps0 < *cfg.eps0) eps0 = std::min(eps0, *cfg.eps0);
    if (eps0 == 0)
        throw Error(ErrorCode::NoNegativeJ, "J(eps,0) >= 0 already at eps=0.01");
    return eps0;
}

std::vector<double> eps_box(double eps0) {
    std::vector<double> box{0.0};
    for (int i = 1; 0.01 * i <= eps0 * (1 + 1e-12); ++i) box.push_back(0.01 * i);
    return box;
}

// Returns (theta, M(theta)).
std::pair<double, double> scan_theta(const RunConfig& cfg, double p, double eps0,
                                     DerivationReport& rep) {
    const std::vector<double> box = eps_box(eps0);
    double running = -INFINITY;
    auto row = [&](double th) {
        for (double e : box) {
            const double j = J_eps_theta(e, th, p, cfg.alpha, cfg.budget);
            rep.J_table.push_back({e, th, j});
            running = std::max(running, j);
        }
    };
    row(0.0);
    double best_theta = 0, best_M = 0, best_score = 0;
    for (int i = 1; 0.01 * i <= cfg.theta_max * (1 + 1e-12); ++i) {
        const double th = 0.01 * i;
        if (cfg.theta && th > *cfg.theta) break;
        row(th);
        rep.theta_scan.push_back({th, 0.0, running});
        if (!(running < 0)) break;
        const double score = -th * running;
        if (score > best_score) {
            best_score = score;
            best_theta = th;
            best_M = running;
        }
    }
    if (cfg.theta) {
        // Cover the configured value itself when it is off-grid.
        row(*cfg.theta);
        if (!(running < 0))
            throw Error(ErrorCode::NoNegativeJ,
                        "J(eps,theta) >= 0 on the box for theta=" + format_double(*cfg.theta));
        return {*cfg.theta, running};
    }
    if (best_theta == 0) throw Error(ErrorCode::NoNegativeJ, "no theta with negative J bound");
    return {best_theta, best_M};
}

struct EtaParts {
    double X, Y, eta;
};

EtaParts eta_of(double B, double lambda, double p, double beta, double c_prime) {
    const double far = std::pow(1.0 + c_prime * std::pow(lambda, beta), p);
    const double X = (1.0 + B * lambda / 2.0) * far;
    return {X, far, std::sqrt(X * far)};
}

} // namespace

Derivation derive_params(const RunConfig& cfg) {
    Derivation out;
    ParamSet& ps = out.params;
    DerivationReport& rep = out.report;
    if (!(cfg.alpha > 0 && cfg.alpha < 1))
        throw Error(ErrorCode::InvalidParams, "alpha must lie in (0,1)");
    ps.alpha = cfg.alpha;
    ps.beta = cfg.alpha + 1.0;
    ps.n_max = cfg.n_max;
    ps.theta_max = cfg.theta_max;

    // Grid constraints first: they are cheap and fatal.
    ps.delta = cfg.delta;
    ps.tau = cfg.tau;
    ps.delta_inv = exact_reciprocal(cfg.delta);
    ps.tau_inv = exact_reciprocal(cfg.tau);
    if (ps.delta_inv < 2 || ps.tau_inv < 2 || ps.delta_inv % ps.tau_inv != 0)
        throw Error(ErrorCode::InvalidParams,
                    "need 1/delta, 1/tau and tau/delta integers (delta=" +
                        format_ratio(cfg.delta) + ", tau=" + format_ratio(cfg.tau) + ")");

    if (cfg.p) {
        ps.p = *cfg.p;
        if (!(ps.p > 0 && ps.p < 1.0 / ps.beta))
            throw Error(ErrorCode::InvalidParams, "p outside (0, 1/beta)");
        rep.p_scan.push_back({ps.p, 0.0, J0(ps.p, ps.alpha, cfg.budget)});
    } else {
        ps.p = scan_p(cfg, rep);
    }

    ps.eps0 = scan_eps0(cfg, ps.p, rep);
    const auto [theta, M] = scan_theta(cfg, ps.p, ps.eps0, rep);
    ps.theta = theta;
    ps.B = cfg.B.value_or(M / 2.0);

    ps.c_tail = comb_tail_constant(ps.beta);
    ps.c_prime = 2.0 * ps.c_tail / ps.theta;
    if (cfg.lambda) {
        ps.lambda = *cfg.lambda;
    } else {
        // Largest lambda on a 1-2-5 grid with sqrt(XY) < 1.
        for (int dec = -1; dec >= -15 && ps.lambda == 0; --dec) {
            for (double m : {5.0, 2.0, 1.0}) {
                // Division by an exact power of ten keeps the grid values shortest-decimal.
                const double lam = m / std::pow(10.0, -dec);
                const EtaParts e = eta_of(ps.B, lam, ps.p, ps.beta, ps.c_prime);
                rep.lambda_scan.push_back({lam, e.eta, e.X});
                if (e.eta < 1) {
                    ps.lambda = lam;
                    break;
                }
            }
        }
        if (ps.lambda == 0) throw Error(ErrorCode::EtaTooLarge, "no lambda down to 1e-15 gives eta < 1");
    }
    const EtaParts e = eta_of(ps.B, ps.lambda, ps.p, ps.beta, ps.c_prime);
    ps.X = e.X;
    ps.Y = e.Y;
    ps.eta = e.eta;
    if (!(ps.eta < 1))
        throw Error(ErrorCode::EtaTooLarge,
                    "sqrt(XY)=" + format_double(ps.eta) + " >= 1 at lambda=" + format_double(ps.lambda));
    ps.eta_prime = std::sqrt(ps.eta);
    ps.gamma = gamma_of(ps.B, ps.lambda, ps.p);
    ps.kappa_faithful = kappa_of(ps.B, ps.lambda, ps.p, ps.theta);
    ps.kappa_overridden = cfg.kappa.has_value();
    ps.kappa = cfg.kappa.value_or(ps.kappa_faithful);

    ps.eps_c = cfg.eps_c.value_or(0.2 / (kPi * kPi / 6.0 - 1.0));
    ps.f1_mass = seed_mass(ps.alpha, ps.p, cfg.budget);
    ps.K0 = cfg.K0.value_or(16.0 * ps.f1_mass * kPi * kPi / 6.0);
    ps.validate();
    return out;
}

RunConfig pinned_config(const RunConfig& base, const ParamSet& ps) {
    RunConfig cfg = base;
    cfg.p = ps.p;
    cfg.theta = ps.theta;
    cfg.B = ps.B;
    cfg.eps0 = ps.eps0;
    cfg.lambda = ps.lambda;
    if (ps.kappa_overridden) cfg.kappa = ps.kappa;
    cfg.eps_c = ps.eps_c;
    cfg.K0 = ps.K0;
    return cfg;
}

} // namespace rieszlab
