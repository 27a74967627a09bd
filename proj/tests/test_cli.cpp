#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "commands.hpp"
#include "fixtures.hpp"
#include "rieszlab/error.hpp"
#include "rieszlab/finitizator.hpp"
#include "rieszlab/state_io.hpp"

using namespace rieszlab;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() : path(std::filesystem::temp_directory_path() / "rieszlab_cli_test") {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name, const std::string& content = "") const {
        const auto p = (path / name).string();
        if (!content.empty()) std::ofstream(p) << content;
        return p;
    }
};

struct Captured {
    std::ostringstream out, err;
    cli::Streams io() { return {out, err}; }
};

} // namespace

TEST_CASE("params exit codes") {
    TempDir d;
    Captured c;
    CHECK(cli::cmd_params(d.file("mis.cfg", "alpha = 0.5\ndelta = 1/3\ntau = 1/4\n"), c.io()) == cli::kParams);
    CHECK(c.err.str().find("tau/delta") != std::string::npos);
    CHECK(cli::cmd_params(d.file("unk.cfg", "alpha = 0.5\nwhatever = 1\n"), c.io()) == cli::kParams);
    CHECK(cli::cmd_params(d.file("missing.cfg"), c.io()) == cli::kParams);
    Captured ok;
    CHECK(cli::cmd_params(d.file("ref.cfg", "alpha = 0.5\ndelta = 1/8\ntau = 1/4\nkappa = 5e-3\n"), ok.io()) ==
          cli::kOk);
    CHECK(ok.out.str().find("B = -0.10366") != std::string::npos);
}

TEST_CASE("build, eval and verify on a one-level run") {
    TempDir d;
    Captured c;
    cli::BuildArgs b;
    b.config_path = d.file("one.cfg", "alpha = 0.5\ndelta = 1/8\ntau = 1/4\nkappa = 5e-3\nn_max = 1\n");
    b.state_path = d.file("one.json");
    REQUIRE(cli::cmd_build(b, c.io()) == cli::kOk);
    std::ifstream csv(b.state_path + ".csv");
    std::string line;
    int rows = 0;
    while (std::getline(csv, line))
        if (!line.empty() && line[0] != '#' && line[0] != 'n') ++rows;
    CHECK(rows == 1);

    cli::EvalArgs e;
    e.state_path = b.state_path;
    e.csv_path = d.file("eval.csv");
    e.from = 0.6;
    e.to = 1.4;
    e.points = 5;
    e.decimation = 0;
    REQUIRE(cli::cmd_eval(e, c.io()) == cli::kOk);
    std::ifstream ev(e.csv_path);
    int checked = 0;
    while (std::getline(ev, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 't') continue;
        std::istringstream row(line);
        std::string t, ref, imf, reg;
        std::getline(row, t, ',');
        std::getline(row, ref, ',');
        std::getline(row, imf, ',');
        std::getline(row, reg, ',');
        CHECK(parse_double(reg) == finitizator(parse_double(t) - 1.0));
        ++checked;
    }
    CHECK(checked == 5);

    cli::VerifyArgs v;
    v.state_path = b.state_path;
    v.json_path = d.file("rep.json");
    CHECK(cli::cmd_verify(v, c.io()) == cli::kOk);
}

TEST_CASE("verify rejects malformed and tampered states") {
    TempDir d;
    Captured c;
    cli::VerifyArgs v;
    v.state_path = d.file("bad.json", "{\"schema\": \"v1\"}");
    try {
        cli::cmd_verify(v, c.io());
        FAIL("expected MalformedState");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MalformedState);
    }

    auto j = state_to_json(fixture::reference_state(2));
    j["levels"][1]["blocks"][0]["amplitude"] = {"0", "0"};
    v.state_path = d.file("tampered.json", j.dump());
    v.json_path = d.file("rep.json");
    CHECK(cli::cmd_verify(v, c.io()) == cli::kVerify);
    CHECK(c.err.str().find("exact_representation") != std::string::npos);
}

TEST_CASE("montecarlo output is seeded") {
    TempDir d;
    Captured c;
    cli::MonteCarloArgs m;
    m.config_path = d.file("mc.cfg", "delta = 1/8\ntau = 1/4\nseed = 7\n");
    m.ns = {4, 16};
    m.samples = 2000;
    m.json_path = d.file("a.json");
    REQUIRE(cli::cmd_montecarlo(m, c.io()) == cli::kOk);
    m.json_path = d.file("b.json");
    m.threads = 2;
    REQUIRE(cli::cmd_montecarlo(m, c.io()) == cli::kOk);
    CHECK(read_file(d.file("a.json")) == read_file(d.file("b.json")));
    const auto doc = nlohmann::json::parse(read_file(d.file("a.json")));
    CHECK(doc["runs"].size() == 2);
    CHECK(doc["ratios"][0]["inverse_square"] == 16.0);
}
