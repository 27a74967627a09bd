#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rieszlab::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1, // anything outside the contract below
    kParams = 2,
    kBudget = 3,
    kState = 4,
    kVerify = 5,
};

struct Streams {
    std::ostream& out;
    std::ostream& err;
};

int cmd_params(const std::string& config_path, Streams io);

struct BuildArgs {
    std::string config_path, state_path, metrics_path; // metrics defaults to <state>.csv
    int threads = 1;
};
int cmd_build(const BuildArgs& a, Streams io);

struct EvalArgs {
    std::string state_path, csv_path;
    int n = 0; // 0 means the last built level
    double from = -0.75, to = 1.75;
    int points = 201;
    int decimation = 10; // U_alpha f_n on every decimation-th row, 0 disables
};
int cmd_eval(const EvalArgs& a, Streams io);

struct VerifyArgs {
    std::string state_path, json_path;
    int threads = 1;
};
int cmd_verify(const VerifyArgs& a, Streams io);

struct MonteCarloArgs {
    std::string config_path, json_path;
    std::vector<int> ns;
    long samples = 0; // 0 means the config value
    int threads = 1;
};
int cmd_montecarlo(const MonteCarloArgs& a, Streams io);

} // namespace rieszlab::cli
