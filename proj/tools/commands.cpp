#include "commands.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "rieszlab/engine.hpp"
#include "rieszlab/error.hpp"
#include "rieszlab/kernels.hpp"
#include "rieszlab/montecarlo.hpp"
#include "rieszlab/params.hpp"
#include "rieszlab/partition.hpp"
#include "rieszlab/state_io.hpp"
#include "rieszlab/verify.hpp"

namespace rieszlab::cli {

using json = nlohmann::ordered_json;

namespace {

bool is_param_error(ErrorCode c) {
    return c == ErrorCode::NoNegativeJ || c == ErrorCode::EtaTooLarge || c == ErrorCode::InvalidParams ||
           c == ErrorCode::GridMisaligned || c == ErrorCode::ConfigError;
}

// Derivation plus the grid, so misalignment is reported as a parameter error.
Derivation derive_checked(const RunConfig& cfg) {
    Derivation d = derive_params(cfg);
    Grid::from(d.params);
    return d;
}

void print_scan(std::ostream& out, const char* title, const char* cols, const std::vector<ScanRow>& rows,
                bool two_d) {
    out << "# " << title << "\n" << cols << "\n";
    for (const auto& r : rows) {
        out << format_double(r.x);
        if (two_d) out << ' ' << format_double(r.y);
        out << ' ' << format_double(r.value) << "\n";
    }
}

json report_json(const MonteCarloReport& r) {
    json j;
    j["n"] = r.n;
    j["samples"] = r.samples;
    j["seed"] = r.seed;
    j["measure_estimate"] = r.measure_estimate;
    j["std_error"] = r.std_error;
    j["measured_constant"] = r.measured_constant;
    j["bound"] = r.bound;
    j["max_window_depth"] = r.max_window_depth;
    json means = json::array();
    for (const auto& m : r.means)
        means.push_back({{"i", m.i}, {"k", m.k}, {"mean", m.mean}, {"expected", m.expected},
                         {"std_error", m.std_error}, {"centered_z", m.centered_z}});
    j["means"] = means;
    json moments = json::array();
    for (const auto& m : r.moments)
        moments.push_back({{"k", m.k}, {"moment", m.moment}, {"envelope", m.envelope}, {"ratio", m.ratio}});
    j["moments"] = moments;
    json pairs = json::array();
    for (const auto& p : r.pairs)
        pairs.push_back({{"i", p.i}, {"joint", p.joint}, {"product", p.product}, {"std_error", p.std_error}});
    j["pairs"] = pairs;
    j["D_histogram"] = r.D_histogram;
    return j;
}

} // namespace

int cmd_params(const std::string& config_path, Streams io) {
    try {
        const RunConfig cfg = load_config(config_path);
        const Derivation d = derive_checked(cfg);
        const ParamSet& ps = d.params;
        std::ostream& out = io.out;
        out << "# " << kLibraryVersion << " config_hash=" << config_hash(cfg) << "\n";
        out << "alpha = " << format_double(ps.alpha) << "\n";
        out << "beta = " << format_double(ps.beta) << "\n";
        out << "p = " << format_double(ps.p) << "\n";
        out << "eps0 = " << format_double(ps.eps0) << "\n";
        out << "theta = " << format_double(ps.theta) << "\n";
        out << "B = " << format_double(ps.B) << "\n";
        out << "lambda = " << format_double(ps.lambda) << "\n";
        out << "gamma = " << format_double(ps.gamma) << "\n";
        out << "kappa = " << format_double(ps.kappa) << (ps.kappa_overridden ? " (override)" : "") << "\n";
        out << "kappa_faithful = " << format_double(ps.kappa_faithful) << "\n";
        out << "delta = 1/" << ps.delta_inv << "\n";
        out << "tau = 1/" << ps.tau_inv << "\n";
        out << "c_tail = " << format_double(ps.c_tail) << "\n";
        out << "c_prime = " << format_double(ps.c_prime) << "\n";
        out << "X = " << format_double(ps.X) << "\n";
        out << "Y = " << format_double(ps.Y) << "\n";
        out << "eta = " << format_double(ps.eta) << "\n";
        out << "eta_prime = " << format_double(ps.eta_prime) << "\n";
        out << "eps_c = " << format_double(ps.eps_c) << "\n";
        out << "K0 = " << format_double(ps.K0) << "\n";
        out << "f1_mass = " << format_double(ps.f1_mass) << "\n";
        out << "n_max = " << ps.n_max << "\n";
        for (int n = 1; n <= ps.n_max; ++n)
            out << "eps_" << n << " = " << format_double(ps.eps(n)) << "  K_" << n << " = "
                << format_double(ps.K(n)) << "\n";
        print_scan(out, "p scan", "p J0", d.report.p_scan, false);
        print_scan(out, "eps0 scan", "eps J(eps,0)", d.report.eps0_scan, false);
        print_scan(out, "theta scan", "theta max_box_J", d.report.theta_scan, false);
        print_scan(out, "J table", "eps theta J", d.report.J_table, true);
        print_scan(out, "lambda scan", "lambda eta X", d.report.lambda_scan, true);
        out << "# invariants\n";
        bool all = true;
        for (const auto& c : ps.checks()) {
            out << (c.holds ? "ok   " : "FAIL ") << c.name << "\n";
            all = all && c.holds;
        }
        return all ? kOk : kParams;
    } catch (const Error& e) {
        io.err << "error: " << e.what() << "\n";
        return is_param_error(e.code()) ? kParams : kFailure;
    }
}

int cmd_build(const BuildArgs& a, Streams io) {
    try {
        const RunConfig cfg = load_config(a.config_path);
        const Derivation d = derive_checked(cfg);
        EngineOptions opt;
        opt.threads = a.threads;
        ConstructionState s(cfg, d.params);
        try {
            while (s.built() < d.params.n_max) build_level(s, opt);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::BudgetExceeded) throw;
            io.err << "error: " << e.what() << " (levels built: " << s.built() << ")\n";
            return kBudget;
        }
        s.set_metrics(compute_metrics(s, opt));
        save_state(s, a.state_path);
        write_atomic(a.metrics_path.empty() ? a.state_path + ".csv" : a.metrics_path, metrics_csv(s));
        io.out << "built " << s.built() << " levels, " << s.block_count() << " blocks, supp sum "
               << format_double(s.supp_sum()) << "\n";
        return kOk;
    } catch (const Error& e) {
        io.err << "error: " << e.what() << "\n";
        return is_param_error(e.code()) ? kParams : kFailure;
    }
}

int cmd_eval(const EvalArgs& a, Streams io) {
    ConstructionState s = [&] {
        try {
            return load_state(a.state_path);
        } catch (const Error& e) {
            throw Error(ErrorCode::MalformedState, e.what());
        }
    }();
    const int n = a.n == 0 ? s.built() : a.n;
    if (n < 1 || n > s.built())
        throw Error(ErrorCode::LevelNotBuilt, "level " + std::to_string(n) + " of " + std::to_string(s.built()));
    if (a.points < 2 || !(a.to > a.from)) throw Error(ErrorCode::InvalidArgument, "empty evaluation grid");

    const double alpha = s.params().alpha;
    const double c = composition_constant_fourier(alpha);
    SmoothDensity fn;
    fn.value = [&](double x) { return s.eval_f(n, x); };
    fn.breakpoints = s.breakpoints(n, -0.5, 0.5);
    fn.breakpoints.push_back(0.5);
    fn.breakpoints.push_back(1.5);
    QuadratureBudget qb;
    qb.abs_tol = 1e-9;
    qb.rel_tol = 1e-8;
    qb.max_subdivisions = 400000;

    std::ostringstream csv;
    csv << "# config_hash=" << config_hash(s.config()) << "\n";
    csv << "# library=" << kLibraryVersion << "\n";
    csv << "# n=" << n << " composition_constant=" << format_double(c)
        << " (U_alpha f_n tends to c * g_n)\n";
    csv << "t,re_f,im_f,re_g,im_g,re_Uf,im_Uf\n";
    for (int i = 0; i < a.points; ++i) {
        const double t = a.from + (a.to - a.from) * i / (a.points - 1);
        const Complex f = s.eval_f(n, t), g = s.eval_g(n, t);
        csv << format_double(t) << ',' << format_double(f.real()) << ',' << format_double(f.imag()) << ','
            << format_double(g.real()) << ',' << format_double(g.imag()) << ',';
        if (a.decimation > 0 && i % a.decimation == 0) {
            const Complex u = potential_U(fn, t, alpha, qb);
            csv << format_double(u.real()) << ',' << format_double(u.imag());
        } else {
            csv << ',';
        }
        csv << '\n';
    }
    if (a.csv_path.empty() || a.csv_path == "-")
        io.out << csv.str();
    else
        write_atomic(a.csv_path, csv.str());
    return kOk;
}

int cmd_verify(const VerifyArgs& a, Streams io) {
    ConstructionState s = load_state(a.state_path);
    VerifyOptions o;
    o.threads = a.threads;
    const auto reports = run_verification(s, o);
    json doc;
    doc["library"] = kLibraryVersion;
    doc["config_hash"] = config_hash(s.config());
    json arr = json::array();
    int holds = 0, fails = 0, vacuous = 0;
    std::vector<std::string> failed;
    for (const auto& r : reports) {
        arr.push_back(to_json(r));
        switch (r.status) {
        case CheckStatus::holds: ++holds; break;
        case CheckStatus::vacuous: ++vacuous; break;
        case CheckStatus::fails:
            ++fails;
            failed.push_back(r.check_name);
            break;
        }
    }
    doc["reports"] = arr;
    doc["summary"] = {{"holds", holds}, {"fails", fails}, {"vacuous", vacuous}, {"failed", failed}};
    const std::string text = doc.dump(1) + "\n";
    if (a.json_path.empty() || a.json_path == "-")
        io.out << text;
    else
        write_atomic(a.json_path, text);
    io.err << summary_table(reports);
    if (fails > 0) {
        io.err << "failed checks:";
        for (const auto& f : failed) io.err << ' ' << f;
        io.err << "\n";
        return kVerify;
    }
    return kOk;
}

int cmd_montecarlo(const MonteCarloArgs& a, Streams io) {
    try {
        const RunConfig cfg = load_config(a.config_path);
        const long D = exact_reciprocal(cfg.delta), T = exact_reciprocal(cfg.tau);
        if (D < 2 || T < 2) throw Error(ErrorCode::InvalidParams, "need 1/delta and 1/tau integers");
        const Grid grid(D, T);
        const long samples = a.samples > 0 ? a.samples : cfg.samples;
        if (a.ns.empty()) throw Error(ErrorCode::InvalidArgument, "no --n given");
        json doc;
        doc["library"] = kLibraryVersion;
        doc["config_hash"] = config_hash(cfg);
        json runs = json::array();
        std::vector<MonteCarloReport> reps;
        for (int n : a.ns) {
            reps.push_back(montecarlo_En(grid, n, samples, cfg.seed, a.threads));
            runs.push_back(report_json(reps.back()));
            io.out << "n=" << n << " |E_n|=" << format_double(reps.back().measure_estimate) << " +- "
                   << format_double(reps.back().std_error) << " bound=" << format_double(reps.back().bound)
                   << "\n";
        }
        doc["runs"] = runs;
        json ratios = json::array();
        for (std::size_t i = 1; i < reps.size(); ++i) {
            const double n0 = reps[0].n, n1 = reps[i].n;
            const double measured = reps[i].measure_estimate > 0
                                        ? reps[0].measure_estimate / reps[i].measure_estimate
                                        : std::numeric_limits<double>::infinity();
            const double predicted = (n1 / n0) * (n1 / n0);
            ratios.push_back({{"n0", reps[0].n}, {"n1", reps[i].n}, {"measured", measured}, {"inverse_square", predicted}});
            io.out << "ratio n=" << reps[0].n << "/n=" << reps[i].n << ": " << format_double(measured)
                   << " vs (n1/n0)^2 = " << format_double(predicted) << "\n";
        }
        doc["ratios"] = ratios;
        const std::string text = doc.dump(1) + "\n";
        if (a.json_path.empty() || a.json_path == "-")
            io.out << text;
        else
            write_atomic(a.json_path, text);
        return kOk;
    } catch (const Error& e) {
        io.err << "error: " << e.what() << "\n";
        return is_param_error(e.code()) ? kParams : kFailure;
    }
}

} // namespace rieszlab::cli
