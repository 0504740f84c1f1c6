#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "leadform/commands.hpp"

int main(int argc, char** argv) {
    using namespace leadform;

    CLI::App app{"Decentralized leader-follower formation gain synthesis"};
    app.require_subcommand(1);

    CommandOptions opts;
    std::string scenario, out_dir, policy, matrix;
    double dt = 0.0, horizon = 0.0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--scenario", scenario, "Scenario file (JSON)");
        sub->add_option("--out", out_dir, "Directory for machine-readable outputs");
        sub->add_flag("--json", opts.json, "Print JSON instead of text");
    };

    auto* check = app.add_subcommand("check", "Structural report; exit 0 iff local pole placement applies");
    add_common(check);
    auto* synth = app.add_subcommand("synth", "Synthesize gains and verify spectrum and formation");
    add_common(synth);
    synth->add_option("--policy", policy, "Beta policy: tree-unique | min-norm")->check(CLI::IsMember({"tree-unique", "min-norm"}));
    auto* protocol = app.add_subcommand("protocol", "Run the distributed gain computation and print its trace");
    add_common(protocol);
    auto* simulate = app.add_subcommand("simulate", "Simulate the closed loop; write CSV and SVG");
    add_common(simulate);
    simulate->add_option("--dt", dt, "Integration step")->check(CLI::PositiveNumber);
    simulate->add_option("--horizon", horizon, "Simulated time")->check(CLI::PositiveNumber);
    simulate->add_option("--policy", policy, "Beta policy: tree-unique | min-norm")->check(CLI::IsMember({"tree-unique", "min-norm"}));
    auto* verify = app.add_subcommand("verify", "Cross-check det(sI-A) by matchings against the numeric path");
    add_common(verify);
    verify->add_option("--matrix", matrix, "Matrix file: {\"matrix\": [[...]], \"formation\": [...], \"poles\": [...]}");
    verify->add_option("--random", opts.random_size, "Cross-check a random n x n matrix")->check(CLI::Range(1, 12));
    verify->add_option("--seed", opts.seed, "Seed for --random");
    verify->add_option("--policy", policy, "Beta policy: tree-unique | min-norm")->check(CLI::IsMember({"tree-unique", "min-norm"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitInputError;
    }

    if (!scenario.empty()) opts.scenario = scenario;
    if (!out_dir.empty()) opts.out_dir = out_dir;
    if (!policy.empty()) opts.policy = policy;
    if (!matrix.empty()) opts.matrix = matrix;
    if (dt > 0.0) opts.dt = dt;
    if (horizon > 0.0) opts.horizon = horizon;

    if (check->parsed()) return cmd_check(opts, std::cout, std::cerr);
    if (synth->parsed()) return cmd_synth(opts, std::cout, std::cerr);
    if (protocol->parsed()) return cmd_protocol(opts, std::cout, std::cerr);
    if (simulate->parsed()) return cmd_simulate(opts, std::cout, std::cerr);
    return cmd_verify(opts, std::cout, std::cerr);
}
