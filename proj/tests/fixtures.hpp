#pragma once

#include <map>
#include <string>

#include "rieszlab/engine.hpp"
#include "rieszlab/params.hpp"

namespace fixture {

inline rieszlab::RunConfig reference_config(int n_max) {
    return rieszlab::parse_config("alpha = 0.5\ndelta = 1/8\ntau = 1/4\nkappa = 5e-3\nn_max = " +
                                  std::to_string(n_max) + "\n");
}

// Derivation is the slow part; it is shared by every n_max.
inline const rieszlab::ParamSet& reference_params(int n_max) {
    static std::map<int, rieszlab::ParamSet> cache;
    auto it = cache.find(n_max);
    if (it == cache.end()) {
        static const rieszlab::ParamSet base = rieszlab::derive_params(reference_config(4)).params;
        rieszlab::ParamSet ps = base;
        ps.n_max = n_max;
        it = cache.emplace(n_max, ps).first;
    }
    return it->second;
}

inline const rieszlab::ConstructionState& reference_state(int n_max) {
    static std::map<int, rieszlab::ConstructionState> cache;
    auto it = cache.find(n_max);
    if (it == cache.end())
        it = cache.emplace(n_max, rieszlab::run_construction(reference_config(n_max), reference_params(n_max)))
                 .first;
    return it->second;
}

} // namespace fixture
