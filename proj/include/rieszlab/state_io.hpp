#pragma once

#include <string>

#include <json.hpp>

#include "rieszlab/engine.hpp"

namespace rieszlab {

inline constexpr const char* kStateSchema = "v1";

// FNV-1a of the serialized config, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

nlohmann::ordered_json params_to_json(const ParamSet& ps);
ParamSet params_from_json(const nlohmann::ordered_json& j);

// State document:
//   schema, library, config_hash, config (key=value text), params,
//   levels[m] = {level, eps, G, good, delayed, dropped_G1, dropped_G2,
//                blocks[{index, amplitude: [re, im] as decimal strings,
//                        osc_ratio (string), osc_holds}]},
//   ledger [[level, index], ...], metrics [...].
// Level 0 is I. Any inconsistency on load raises MalformedState.
nlohmann::ordered_json state_to_json(const ConstructionState& s);
ConstructionState state_from_json(const nlohmann::ordered_json& j);
std::string state_to_string(const ConstructionState& s);
ConstructionState state_from_string(const std::string& text);
void save_state(const ConstructionState& s, const std::string& path);
ConstructionState load_state(const std::string& path);

// n,V_len,Lp_int,sup_diff,supp_sum,G,Gg,Gd with '#' lines for hash and version.
std::string metrics_csv(const ConstructionState& s);

// Temp file in the same directory, then rename.
void write_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

} // namespace rieszlab
