#include "rieszlab/state_io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rieszlab/error.hpp"

namespace rieszlab {

using json = nlohmann::ordered_json;

std::string config_hash(const RunConfig& cfg) { return hex64(fnv1a64(serialize_config(cfg))); }

json params_to_json(const ParamSet& ps) {
    return {
        {"alpha", ps.alpha},       {"beta", ps.beta},
        {"p", ps.p},               {"theta", ps.theta},
        {"B", ps.B},               {"eps0", ps.eps0},
        {"lambda", ps.lambda},     {"gamma", ps.gamma},
        {"kappa", ps.kappa},       {"kappa_faithful", ps.kappa_faithful},
        {"kappa_overridden", ps.kappa_overridden},
        {"delta", ps.delta},       {"tau", ps.tau},
        {"delta_inv", ps.delta_inv}, {"tau_inv", ps.tau_inv},
        {"c_tail", ps.c_tail},     {"c_prime", ps.c_prime},
        {"X", ps.X},               {"Y", ps.Y},
        {"eta", ps.eta},           {"eta_prime", ps.eta_prime},
        {"eps_c", ps.eps_c},       {"K0", ps.K0},
        {"f1_mass", ps.f1_mass},   {"n_max", ps.n_max},
        {"theta_max", ps.theta_max},
    };
}

ParamSet params_from_json(const json& j) {
    ParamSet ps;
    ps.alpha = j.at("alpha").get<double>();
    ps.beta = j.at("beta").get<double>();
    ps.p = j.at("p").get<double>();
    ps.theta = j.at("theta").get<double>();
    ps.B = j.at("B").get<double>();
    ps.eps0 = j.at("eps0").get<double>();
    ps.lambda = j.at("lambda").get<double>();
    ps.gamma = j.at("gamma").get<double>();
    ps.kappa = j.at("kappa").get<double>();
    ps.kappa_faithful = j.at("kappa_faithful").get<double>();
    ps.kappa_overridden = j.at("kappa_overridden").get<bool>();
    ps.delta = j.at("delta").get<double>();
    ps.tau = j.at("tau").get<double>();
    ps.delta_inv = j.at("delta_inv").get<long>();
    ps.tau_inv = j.at("tau_inv").get<long>();
    ps.c_tail = j.at("c_tail").get<double>();
    ps.c_prime = j.at("c_prime").get<double>();
    ps.X = j.at("X").get<double>();
    ps.Y = j.at("Y").get<double>();
    ps.eta = j.at("eta").get<double>();
    ps.eta_prime = j.at("eta_prime").get<double>();
    ps.eps_c = j.at("eps_c").get<double>();
    ps.K0 = j.at("K0").get<double>();
    ps.f1_mass = j.at("f1_mass").get<double>();
    ps.n_max = j.at("n_max").get<int>();
    ps.theta_max = j.at("theta_max").get<double>();
    return ps;
}

namespace {

json metrics_to_json(const LevelMetrics& r) {
    return {
        {"n", r.n},
        {"V_len", r.V_len},
        {"V_units", r.V_units},
        {"Lp_int", r.Lp_int},
        {"sup_f", r.sup_f},
        {"sup_diff", r.sup_diff},
        {"supp_sum", r.supp_sum},
        {"sup_r", r.sup_r},
        {"G", r.G},
        {"Gg", r.Gg},
        {"Gd", r.Gd},
        {"drop_G1_units", r.drop_G1_units},
        {"drop_G2_units", r.drop_G2_units},
    };
}

LevelMetrics metrics_from_json(const json& j) {
    LevelMetrics r;
    r.n = j.at("n").get<int>();
    r.V_len = j.at("V_len").get<double>();
    r.V_units = j.at("V_units").get<std::int64_t>();
    r.Lp_int = j.at("Lp_int").get<double>();
    r.sup_f = j.at("sup_f").get<double>();
    r.sup_diff = j.at("sup_diff").get<double>();
    r.supp_sum = j.at("supp_sum").get<double>();
    r.sup_r = j.at("sup_r").get<double>();
    r.G = j.at("G").get<std::size_t>();
    r.Gg = j.at("Gg").get<std::size_t>();
    r.Gd = j.at("Gd").get<std::size_t>();
    r.drop_G1_units = j.at("drop_G1_units").get<std::int64_t>();
    r.drop_G2_units = j.at("drop_G2_units").get<std::int64_t>();
    return r;
}

std::vector<std::int64_t> indices(const json& j, const char* key) {
    auto v = j.at(key).get<std::vector<std::int64_t>>();
    if (!std::is_sorted(v.begin(), v.end()) || std::adjacent_find(v.begin(), v.end()) != v.end())
        throw Error(ErrorCode::MalformedState, std::string(key) + " is not strictly increasing");
    return v;
}

} // namespace

json state_to_json(const ConstructionState& s) {
    json j;
    j["schema"] = kStateSchema;
    j["library"] = kLibraryVersion;
    j["config_hash"] = config_hash(s.config());
    j["config"] = serialize_config(s.config());
    j["params"] = params_to_json(s.params());
    json levels = json::array();
    for (int m = 0; m < s.built(); ++m) {
        const SelectionLevel& sel = s.levels()[m];
        json L;
        L["level"] = m;
        L["eps"] = m == 0 ? 0.0 : s.params().eps(m);
        L["G"] = sel.G;
        L["good"] = sel.good;
        L["delayed"] = sel.delayed;
        L["dropped_G1"] = sel.dropped_G1;
        L["dropped_G2"] = sel.dropped_G2;
        json blocks = json::array();
        for (const auto& b : s.blocks(m))
            blocks.push_back({{"index", b.Q.index},
                              {"amplitude", {format_double(b.amplitude.real()), format_double(b.amplitude.imag())}},
                              {"osc_ratio", format_double(b.osc_ratio)},
                              {"osc_holds", b.osc_holds}});
        L["blocks"] = blocks;
        levels.push_back(L);
    }
    j["levels"] = levels;
    json ledger = json::array();
    for (int m = 0; m < s.ledger().levels(); ++m)
        for (auto i : s.ledger().level(m)) ledger.push_back({m, i});
    j["ledger"] = ledger;
    json metrics = json::array();
    for (const auto& r : s.metrics()) metrics.push_back(metrics_to_json(r));
    j["metrics"] = metrics;
    return j;
}

ConstructionState state_from_json(const json& j) {
    try {
        if (j.at("schema").get<std::string>() != kStateSchema)
            throw Error(ErrorCode::MalformedState, "unsupported schema");
        const RunConfig cfg = parse_config(j.at("config").get<std::string>());
        if (config_hash(cfg) != j.at("config_hash").get<std::string>())
            throw Error(ErrorCode::MalformedState, "config hash mismatch");
        const ParamSet ps = params_from_json(j.at("params"));
        ps.validate();
        ConstructionState s(cfg, ps);
        const json& levels = j.at("levels");
        if (levels.empty() || levels[0].at("level").get<int>() != 0)
            throw Error(ErrorCode::MalformedState, "missing root level");
        const SelectionLevel root = root_level();
        if (indices(levels[0], "G") != root.G || indices(levels[0], "good") != root.good ||
            !levels[0].at("blocks").empty())
            throw Error(ErrorCode::MalformedState, "root level is not {I}");
        for (std::size_t m = 1; m < levels.size(); ++m) {
            const json& L = levels[m];
            if (L.at("level").get<std::size_t>() != m)
                throw Error(ErrorCode::MalformedState, "levels out of order");
            SelectionLevel sel;
            sel.level = static_cast<int>(m);
            sel.G = indices(L, "G");
            sel.good = indices(L, "good");
            sel.delayed = indices(L, "delayed");
            sel.dropped_G1 = indices(L, "dropped_G1");
            sel.dropped_G2 = indices(L, "dropped_G2");
            for (auto i : sel.G) s.grid().check({sel.level, i});
            std::vector<BlockTerm> blocks;
            for (const json& b : L.at("blocks")) {
                BlockTerm t;
                t.Q = {sel.level, b.at("index").get<std::int64_t>()};
                const auto& a = b.at("amplitude");
                if (!a.is_array() || a.size() != 2)
                    throw Error(ErrorCode::MalformedState, "amplitude must be a [re, im] pair");
                t.amplitude = {parse_double(a[0].get<std::string>()), parse_double(a[1].get<std::string>())};
                t.eps = ps.eps(sel.level);
                t.osc_ratio = parse_double(b.at("osc_ratio").get<std::string>());
                t.osc_holds = b.at("osc_holds").get<bool>();
                blocks.push_back(t);
            }
            s.append_level(std::move(sel), std::move(blocks));
        }
        json ledger = json::array();
        for (int m = 0; m < s.ledger().levels(); ++m)
            for (auto i : s.ledger().level(m)) ledger.push_back({m, i});
        if (ledger != j.at("ledger")) throw Error(ErrorCode::MalformedState, "ledger does not match the blocks");
        std::vector<LevelMetrics> metrics;
        for (const json& r : j.at("metrics")) metrics.push_back(metrics_from_json(r));
        s.set_metrics(std::move(metrics));
        return s;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::MalformedState) throw;
        throw Error(ErrorCode::MalformedState, e.what());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedState, e.what());
    }
}

std::string state_to_string(const ConstructionState& s) { return state_to_json(s).dump(1) + "\n"; }

ConstructionState state_from_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedState, e.what());
    }
    return state_from_json(j);
}

void save_state(const ConstructionState& s, const std::string& path) { write_atomic(path, state_to_string(s)); }

ConstructionState load_state(const std::string& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const Error& e) {
        throw Error(ErrorCode::MalformedState, e.what());
    }
    return state_from_string(text);
}

std::string metrics_csv(const ConstructionState& s) {
    std::ostringstream out;
    out << "# config_hash=" << config_hash(s.config()) << "\n";
    out << "# library=" << kLibraryVersion << "\n";
    out << "n,V_len,Lp_int,sup_diff,supp_sum,G,Gg,Gd\n";
    for (const auto& r : s.metrics())
        out << r.n << ',' << format_double(r.V_len) << ',' << format_double(r.Lp_int) << ','
            << format_double(r.sup_diff) << ',' << format_double(r.supp_sum) << ',' << r.G << ',' << r.Gg
            << ',' << r.Gd << '\n';
    return out.str();
}

void write_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write " + tmp);
        f << content;
        if (!f.flush()) throw Error(ErrorCode::InvalidArgument, "write failed for " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::InvalidArgument, "cannot rename to " + path + ": " + ec.message());
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::InvalidArgument, "cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace rieszlab
