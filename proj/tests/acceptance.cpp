// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "commands.hpp"
#include "rieszlab/block_profile.hpp"
#include "rieszlab/error.hpp"
#include "rieszlab/finitizator.hpp"
#include "rieszlab/functionals.hpp"
#include "rieszlab/kernels.hpp"
#include "rieszlab/montecarlo.hpp"
#include "rieszlab/params.hpp"
#include "rieszlab/partition.hpp"
#include "rieszlab/state_io.hpp"
#include "rieszlab/verify.hpp"

using namespace rieszlab;
using json = nlohmann::json;

namespace {

int failures = 0;

struct Line {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void criterion(int id, const std::string& name, const std::function<void(Line&)>& body) {
    Line line;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(line);
    } catch (const std::exception& e) {
        line.pass = false;
        line.detail << " [exception: " << e.what() << "]";
    }
    if (!line.pass) ++failures;
    std::cout << (line.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << name << "):" << line.detail.str()
              << " time=" << std::round(seconds_since(t0) * 10) / 10 << "s" << std::endl;
}

std::string g(double x) {
    std::ostringstream s;
    s.precision(6);
    s << x;
    return s.str();
}

const json& report(const json& doc, const std::string& name) {
    for (const auto& r : doc["reports"])
        if (r["check"] == name) return r;
    throw Error(ErrorCode::InvalidArgument, "no report named " + name);
}

} // namespace

int main() {
    const double alpha = 0.5;
    const auto dir = std::filesystem::temp_directory_path() / "rieszlab_acceptance";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const std::string config_path = (dir / "reference.cfg").string();
    {
        std::ofstream(config_path) << "alpha = 0.5\ndelta = 1/8\ntau = 1/4\nn_max = 4\nkappa = 5e-3\nseed = 1\n"
                                      "samples = 100000\n";
    }
    std::ostringstream sink;
    cli::Streams quiet{sink, sink};

    criterion(1, "small-p slope of J0", [&](Line& l) {
        const auto t0 = std::chrono::steady_clock::now();
        const double j01 = J0(0.1, alpha);
        const double slope = J0(1e-3, alpha) / 1e-3;
        const double target = -2 * kPi / std::sqrt(3.0);
        const double rel = std::abs(slope / target - 1);
        const double t = seconds_since(t0);
        l.detail << " J0(0.1)=" << g(j01) << " J0(1e-3)/1e-3=" << g(slope) << " target=" << g(target)
                 << " rel=" << g(rel);
        l.require(j01 < 0, "J0(0.1) < 0");
        l.require(rel < 0.02, "relative error < 2%");
        l.require(std::abs(J0_slope_limit(alpha) - target) < 1e-12, "slope limit formula");
        l.require(t < 10, "runtime < 10 s");
    });

    Derivation derivation;
    criterion(2, "B < 0 on the admissible box", [&](Line& l) {
        const auto t0 = std::chrono::steady_clock::now();
        derivation = derive_params(load_config(config_path));
        const ParamSet& ps = derivation.params;
        double worst = -INFINITY;
        int cells = 0, spec_cells = 0;
        for (const auto& r : derivation.report.J_table) {
            if (r.x > ps.eps0 * (1 + 1e-12) || r.y > ps.theta * (1 + 1e-12)) continue;
            worst = std::max(worst, r.value);
            ++cells;
            if (r.x >= 0.02 - 1e-12 && r.y <= 0.2 + 1e-12) ++spec_cells;
        }
        double gap_1e3 = 0;
        bool monotone = true;
        for (int i = 2; i <= 10; ++i) {
            const double eps = 0.01 * i;
            const double j0 = J_eps_theta(eps, 0.0, ps.p, alpha);
            double prev = INFINITY;
            for (double th : {1e-1, 1e-2, 1e-3}) {
                const double gap = std::abs(J_eps_theta(eps, th, ps.p, alpha) - j0);
                monotone = monotone && gap < prev;
                prev = gap;
            }
            gap_1e3 = std::max(gap_1e3, prev);
        }
        l.detail << " p=" << g(ps.p) << " theta=" << g(ps.theta) << " eps0=" << g(ps.eps0) << " B=" << g(ps.B)
                 << " max J on box=" << g(worst) << " (" << cells << " cells, " << spec_cells
                 << " in eps>=0.02, theta<=0.2) gap at theta=1e-3: " << g(gap_1e3);
        l.require(ps.B < 0, "B < 0");
        l.require(worst < ps.B, "J < B on the box");
        l.require(spec_cells >= 9 * 21, "box covers eps 0.02..0.1, theta 0..0.2");
        l.require(monotone, "gap decreases as theta -> 0");
        l.require(gap_1e3 < 1e-2, "gap < 1e-2");
        l.require(seconds_since(t0) < 120, "runtime < 2 min");
    });

    criterion(3, "operator identities", [&](Line& l) {
        const SmoothDensity phi = scaled_finitizator(0.0, 1.0);
        double scaling = 0;
        for (double lam : {2.0, 4.0}) {
            const SmoothDensity scaled = scaled_finitizator(0.0, lam);
            for (int i = 0; i < 50; ++i) {
                const double t = -0.9 + 1.8 * (i + 0.5) / 50;
                const Complex lhs = operator_W(scaled, t, alpha);
                const Complex rhs = std::pow(lam, alpha) * operator_W(phi, lam * t, alpha);
                scaling = std::max(scaling, std::abs(lhs - rhs));
            }
        }
        std::vector<double> samples;
        for (int i = 0; i < 20; ++i) samples.push_back(-0.4 + 0.8 * (i + 0.5) / 20);
        const auto comp = composition_constant(phi, samples, alpha);
        double outside = 0;
        for (double t : {-3.0, -1.1, -0.61, 0.6, 0.75, 1.4, 5.0})
            outside = std::max(outside, std::abs(operator_W(phi, t, alpha) -
                                                 convolve(phi, KernelSpec::inverse(alpha), t, {})));
        l.detail << " scaling residual=" << g(scaling) << " composition median=" << g(comp.median)
                 << " (Fourier " << g(composition_constant_fourier(alpha)) << ") spread=" << g(comp.spread)
                 << " outside-support residual=" << g(outside);
        l.require(scaling < 1e-6, "scaling residual < 1e-6");
        l.require(comp.spread < 1e-3, "composition spread < 1e-3");
        l.require(outside < 1e-6, "outside-support residual < 1e-6");
    });

    criterion(4, "building-block envelope constants", [&](Line& l) {
        std::vector<double> ts;
        for (int i = 0; i < 1000; ++i) ts.push_back(std::pow(10.0, -4.0 + 5.0 * i / 999));
        std::vector<double> near;
        for (double eps : {0.02, 0.05, 0.1, 0.2}) near.push_back(block_bound_constant(eps, alpha, ts));
        std::vector<double> far;
        const double eps = 0.1;
        for (int dec = 0; dec < 5; ++dec) {
            std::vector<double> us;
            for (int i = 0; i < 100; ++i) us.push_back(3 * eps * std::pow(10.0, dec + (i + 0.5) / 100));
            far.push_back(far_field_constant(eps, alpha, us));
        }
        // The table behind both scans against direct quadrature of W phi_eps.
        double oracle = 0;
        for (double t : {0.003, 0.04, 0.09, 0.5, 3.0}) {
            const SmoothDensity d = scaled_finitizator(0.0, 1.0 / eps, 1.0 / eps);
            const double w = operator_W(d, t, alpha).real();
            oracle = std::max(oracle, std::abs(w - block_F(eps, t, alpha)) / std::max(1.0, std::abs(w)));
        }
        auto spread = [](const std::vector<double>& v) {
            return *std::max_element(v.begin(), v.end()) / *std::min_element(v.begin(), v.end());
        };
        l.detail << " C(eps) over eps 0.02..0.2: [";
        for (double c : near) l.detail << ' ' << g(c);
        l.detail << " ] spread=" << g(spread(near)) << "; far-field C per decade of |t-c|/(3 eps lambda|Q|): [";
        for (double c : far) l.detail << ' ' << g(c);
        l.detail << " ] spread=" << g(spread(far)) << " table vs W quadrature=" << g(oracle);
        for (double c : near) l.require(std::isfinite(c) && c > 0, "finite near constant");
        for (double c : far) l.require(std::isfinite(c) && c > 0, "finite far constant");
        l.require(spread(near) <= 2, "near constants within a factor 2");
        l.require(spread(far) <= 2, "far constants within a factor 2");
        l.require(oracle < 1e-6, "table agrees with quadrature");
    });

    criterion(5, "bad-set measure by Monte-Carlo", [&](Line& l) {
        const auto t0 = std::chrono::steady_clock::now();
        const Grid grid(8, 4);
        const auto r64 = montecarlo_En(grid, 64, 100000, 1);
        const auto r4 = montecarlo_En(grid, 4, 100000, 1);
        double max_z = 0;
        for (const auto& m : r64.means) max_z = std::max(max_z, std::abs(m.centered_z));
        bool below = true;
        for (const auto& m : r64.moments) below = below && m.moment <= m.envelope;
        const double ratio = r4.measure_estimate / r64.measure_estimate;
        l.detail << " max|z|=" << g(max_z) << " |E_64|=" << g(r64.measure_estimate) << " bound="
                 << g(r64.bound) << " measured C=" << g(r64.measured_constant) << " |E_4|/|E_64|=" << g(ratio)
                 << " vs 256";
        l.require(max_z <= 3, "centred means within 3 standard errors");
        l.require(below, "fourth moments below the envelope");
        l.require(r64.measure_estimate <= r64.bound, "|E_n| <= bound");
        l.require(ratio >= 256.0 / 3 && ratio <= 256.0 * 3, "n=4 vs n=64 ratio within a factor 3 of 256");
        l.require(seconds_since(t0) < 120, "runtime < 2 min");
    });

    // Reference construction, twice, and the verification report, twice.
    const std::string state1 = (dir / "s1.json").string(), state2 = (dir / "s2.json").string();
    const std::string rep1 = (dir / "r1.json").string(), rep2 = (dir / "r2.json").string();
    double build_seconds = 0;
    int build_code = -1;
    {
        const auto t0 = std::chrono::steady_clock::now();
        build_code = cli::cmd_build({config_path, state1, "", 1}, quiet);
        build_seconds = seconds_since(t0);
    }
    int verify_code = -1;
    json doc;
    if (build_code == cli::kOk) {
        verify_code = cli::cmd_verify({state1, rep1, 1}, quiet);
        doc = json::parse(read_file(rep1));
    }

    criterion(6, "reference construction", [&](Line& l) {
        l.require(build_code == cli::kOk, "build exit code 0");
        if (build_code != cli::kOk) return;
        const auto s = load_state(state1);
        const auto& lv = report(doc, "decay.levels");
        const auto& good = report(doc, "decay.factor_good");
        std::vector<double> lp = lv["context"]["Lp"].get<std::vector<double>>();
        bool decreasing = true;
        for (std::size_t i = 1; i < lp.size(); ++i) decreasing = decreasing && lp[i] < lp[i - 1];
        l.detail << " blocks=" << s.block_count() << " Lp=[";
        for (double v : lp) l.detail << ' ' << std::setprecision(12) << v;
        l.detail << std::setprecision(6) << " ] X-1=" << g(s.params().X - 1) << " max factor-1 on "
                 << good["context"]["intervals"] << " flagged intervals=" << good["context"]["max_factor_minus_1"]
                 << " supp sum=" << g(s.supp_sum()) << " lambda sum eps=" << report(doc, "support_budget")["context"]["lambda_sum_eps_all"]
                 << " verify exit=" << verify_code;
        l.require(lp.size() == 4 && decreasing, "integral strictly decreasing over 4 levels");
        l.require(lv["status"] == "holds", "decay.levels holds");
        l.require(good["status"] == "holds" && s.params().X < 1, "flagged factors <= X < 1");
        l.require(report(doc, "support_budget")["status"] == "holds", "support budget");
        l.require(report(doc, "accounting")["status"] == "holds", "accounting identity");
        l.require(build_seconds < 600, "runtime < 10 min");
    });

    criterion(7, "Holder exponents", [&](Line& l) {
        const std::vector<double> scales{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
        const auto sq = estimate_holder([](double t) { return Complex(std::sqrt(std::abs(t))); }, -1, 1, scales,
                                        4096, {0.0});
        const auto lin = estimate_holder([](double t) { return Complex(t); }, -1, 1, scales, 4096);
        l.detail << " |t|^1/2 -> " << g(sq.exponent) << ", t -> " << g(lin.exponent);
        l.require(std::abs(sq.exponent - 0.5) <= 0.05, "|t|^1/2 within 0.05");
        l.require(std::abs(lin.exponent - 1.0) <= 0.05, "t within 0.05");
        if (doc.is_null()) {
            l.require(false, "reference state");
            return;
        }
        const auto& h = report(doc, "holder.f_last")["context"];
        const double e = h["exponent"].get<double>(), res = h["residual"].get<double>();
        l.detail << ", f_4 -> " << g(e) << " (residual " << g(res) << ", generic grid " << g(h["generic_exponent"].get<double>())
                 << ")";
        l.require(e > 0, "f_n exponent > 0");
        l.require(res < 0.1, "fit residual < 0.1");
    });

    criterion(8, "potential Holder bound", [&](Line& l) {
        const SmoothDensity phi = scaled_finitizator(0.0, 1.0);
        std::vector<double> ts;
        for (int j = 0; j <= 40; ++j) ts.push_back(-1.0 + 0.05 * j);
        const auto r = check_potential_holder(phi, finitizator(0.0), alpha, ts, {1e-1, 1e-2, 1e-3});
        l.detail << " coefficient=" << g(potential_holder_coefficient(alpha)) << " effective=[";
        for (const auto& row : r.context["per_h"]) l.detail << ' ' << g(row["effective_coefficient"].get<double>());
        l.detail << " ]";
        l.require(std::abs(potential_holder_coefficient(alpha) - (4 * (1 + std::sqrt(2.0)) + 2)) < 1e-12,
                  "coefficient");
        l.require(r.holds(), "modulus below the bound");
    });

    criterion(9, "dual-kernel mechanics on E", [&](Line& l) {
        if (doc.is_null()) {
            l.require(false, "reference state");
            return;
        }
        const auto& dist = report(doc, "dual_kernel.distance");
        const auto& dec = report(doc, "dual_kernel.decreasing");
        const auto& maj = report(doc, "dual_kernel.majorant");
        const auto sums = maj["context"]["partial_sums"].get<std::vector<double>>();
        bool finite = !sums.empty();
        for (double v : sums) finite = finite && std::isfinite(v);
        l.detail << " samples=" << dist["context"]["samples"] << " min integer slack="
                 << dist["context"]["min_integer_slack"] << " not decreasing=" << dec["context"]["not_decreasing"]
                 << " majorant partial sums=[";
        for (double v : sums) l.detail << ' ' << g(v);
        l.detail << " ]";
        l.require(dist["status"] == "holds", "distance >= eps_n delta^{n+1}");
        l.require(dec["status"] == "holds", "decreasing in n");
        l.require(finite, "finite majorant partial sums");
    });

    criterion(10, "determinism across thread counts", [&](Line& l) {
        l.require(build_code == cli::kOk, "first build");
        if (build_code != cli::kOk) return;
        l.require(cli::cmd_build({config_path, state2, "", 2}, quiet) == cli::kOk, "second build");
        l.require(cli::cmd_verify({state2, rep2, 2}, quiet) == verify_code, "second verify");
        const bool same_state = read_file(state1) == read_file(state2);
        const bool same_csv = read_file(state1 + ".csv") == read_file(state2 + ".csv");
        const bool same_report = read_file(rep1) == read_file(rep2);
        l.detail << " state " << (same_state ? "identical" : "differs") << ", metrics "
                 << (same_csv ? "identical" : "differs") << ", report " << (same_report ? "identical" : "differs")
                 << " (threads 1 vs 2)";
        l.require(same_state && same_csv && same_report, "byte-identical outputs");
    });

    std::filesystem::remove_all(dir);
    std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail") << std::endl;
    return failures == 0 ? 0 : 1;
}
