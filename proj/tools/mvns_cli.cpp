#include <CLI11.hpp>

#include <iostream>

#include "mvns/app.hpp"

int main(int argc, char** argv) {
    CLI::App cli{"mvns: stochastic Navier-Stokes on moving domains"};
    cli.require_subcommand(1);

    mvns::app::Options opt;
    std::uint64_t seed = 0;
    std::string out;
    int workers = 1;
    std::uint64_t stop_after = 0;

    auto common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", opt.config_path, "configuration file")->required();
        sub->add_option("-s,--seed", seed, "override ensemble.seed");
        sub->add_option("-o,--out", out, "override output.dir");
        sub->add_option("-w,--workers", workers, "override ensemble.workers")->check(CLI::PositiveNumber);
    };

    auto* run = cli.add_subcommand("run", "integrate the configured ensemble");
    common(run);
    run->add_option("--stop-after", stop_after, "stop after this step and leave checkpoints");
    auto* resume = cli.add_subcommand("resume", "continue the ensemble from its checkpoints");
    common(resume);
    auto* validate = cli.add_subcommand("validate", "check a configuration file");
    validate->add_option("-c,--config", opt.config_path, "configuration file")->required();
    auto* audit = cli.add_subcommand("audit", "run a diagnostics audit");
    common(audit);
    std::string which;
    audit->add_option("which", which, "norms | iota | delta | moment")->required();

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = cli.exit(e);
        return rc == 0 ? 0 : mvns::app::kConfigError;
    }

    auto pick = [&](CLI::App* sub) {
        if (sub->count("--seed")) opt.seed = seed;
        if (sub->count("--out")) opt.out_dir = out;
        if (sub->count("--workers")) opt.workers = workers;
    };

    if (*run) {
        pick(run);
        if (run->count("--stop-after")) opt.stop_after = stop_after;
        return mvns::app::run(opt, std::cout);
    }
    if (*resume) {
        pick(resume);
        return mvns::app::resume(opt, std::cout);
    }
    if (*validate) return mvns::app::validate(opt, std::cout);
    pick(audit);
    return mvns::app::audit(opt, which, std::cout);
}
