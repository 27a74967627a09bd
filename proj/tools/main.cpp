#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "rieszlab/error.hpp"

using namespace rieszlab;

int main(int argc, char** argv) {
    CLI::App app{"Riesz potential correction laboratory"};
    app.require_subcommand(1);
    cli::Streams io{std::cout, std::cerr};

    std::string params_config;
    auto* params = app.add_subcommand("params", "derive and print the parameter set");
    params->add_option("config", params_config, "key=value config file")->required();

    cli::BuildArgs build_args;
    auto* build = app.add_subcommand("build", "run the construction and write the state");
    build->add_option("--config", build_args.config_path)->required();
    build->add_option("--out", build_args.state_path, "state JSON")->required();
    build->add_option("--metrics", build_args.metrics_path, "metrics CSV (default <out>.csv)");
    build->add_option("--threads", build_args.threads)->check(CLI::PositiveNumber);

    cli::EvalArgs eval_args;
    auto* eval = app.add_subcommand("eval", "sample f_n, g_n and U_alpha f_n");
    eval->add_option("--state", eval_args.state_path)->required();
    eval->add_option("--out", eval_args.csv_path, "CSV path, '-' for stdout");
    eval->add_option("--n", eval_args.n, "level (default: last)");
    eval->add_option("--from", eval_args.from);
    eval->add_option("--to", eval_args.to);
    eval->add_option("--points", eval_args.points);
    eval->add_option("--decimation", eval_args.decimation, "U_alpha f_n every k-th row, 0 disables");

    cli::VerifyArgs verify_args;
    auto* verify = app.add_subcommand("verify", "run the verification suite on a state");
    verify->add_option("--state", verify_args.state_path)->required();
    verify->add_option("--out", verify_args.json_path, "report JSON, '-' for stdout");
    verify->add_option("--threads", verify_args.threads)->check(CLI::PositiveNumber);

    cli::MonteCarloArgs mc_args;
    auto* mc = app.add_subcommand("montecarlo", "estimate the bad-set measure");
    mc->add_option("--config", mc_args.config_path)->required();
    mc->add_option("--n", mc_args.ns, "level, repeatable")->required();
    mc->add_option("--samples", mc_args.samples);
    mc->add_option("--out", mc_args.json_path, "report JSON, '-' for stdout");
    mc->add_option("--threads", mc_args.threads)->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*params) return cli::cmd_params(params_config, io);
        if (*build) return cli::cmd_build(build_args, io);
        if (*eval) return cli::cmd_eval(eval_args, io);
        if (*verify) return cli::cmd_verify(verify_args, io);
        if (*mc) return cli::cmd_montecarlo(mc_args, io);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == ErrorCode::MalformedState ? cli::kState : cli::kFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kFailure;
    }
    return cli::kFailure;
}
