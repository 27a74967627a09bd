#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "fixtures.hpp"
#include "rieszlab/error.hpp"
#include "rieszlab/state_io.hpp"

using namespace rieszlab;

namespace {

ErrorCode load_error(const std::string& text) {
    try {
        state_from_string(text);
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::DivisionGuard; // sentinel: nothing thrown
}

} // namespace

TEST_CASE("state round-trip is byte-identical") {
    const auto& s = fixture::reference_state(3);
    const std::string text = state_to_string(s);
    const auto back = state_from_string(text);
    CHECK(state_to_string(back) == text);
    CHECK(metrics_csv(back) == metrics_csv(s));
    for (double t : {-0.3, 0.01, 0.44, 0.9})
        CHECK(back.eval_f(3, t) == s.eval_f(3, t));
}

TEST_CASE("state files are written atomically") {
    const auto& s = fixture::reference_state(2);
    const auto dir = std::filesystem::temp_directory_path() / "rieszlab_state_io_test";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "state.json").string();
    save_state(s, path);
    CHECK(!std::filesystem::exists(path + ".tmp"));
    CHECK(state_to_string(load_state(path)) == state_to_string(s));
    std::filesystem::remove_all(dir);
}

TEST_CASE("malformed states are rejected") {
    const auto& s = fixture::reference_state(2);
    CHECK(load_error("not json") == ErrorCode::MalformedState);
    CHECK(load_error("{}") == ErrorCode::MalformedState);

    auto j = state_to_json(s);
    j["schema"] = "v0";
    CHECK(load_error(j.dump()) == ErrorCode::MalformedState);

    j = state_to_json(s);
    j["config_hash"] = "0000000000000000";
    CHECK(load_error(j.dump()) == ErrorCode::MalformedState);

    j = state_to_json(s);
    j["ledger"].erase(0);
    CHECK(load_error(j.dump()) == ErrorCode::MalformedState);

    j = state_to_json(s);
    j["levels"][1]["blocks"][0]["index"] = 99;
    CHECK(load_error(j.dump()) == ErrorCode::MalformedState);

    j = state_to_json(s);
    j["levels"][1]["G"] = {3, 1};
    CHECK(load_error(j.dump()) == ErrorCode::MalformedState);

    j = state_to_json(s);
    j["levels"][1]["blocks"][0]["amplitude"] = {"1"};
    CHECK(load_error(j.dump()) == ErrorCode::MalformedState);

    CHECK(load_error(state_to_string(s)) == ErrorCode::DivisionGuard);
}

TEST_CASE("metrics CSV layout") {
    const auto& s = fixture::reference_state(3);
    const std::string csv = metrics_csv(s);
    CHECK(csv.rfind("# config_hash=" + config_hash(s.config()) + "\n# library=rieszlab 1.0.0\n", 0) == 0);
    CHECK(csv.find("\nn,V_len,Lp_int,sup_diff,supp_sum,G,Gg,Gd\n") != std::string::npos);
    CHECK(csv.find("\n1,1,") != std::string::npos);
    CHECK(csv.find("\n2,1,") != std::string::npos);
    CHECK(csv.find(",64,48,16\n") != std::string::npos);
    CHECK(config_hash(s.config()).size() == 16);
}
