#include "avgdiff/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "avgdiff/scenario.hpp"

namespace avgdiff {

namespace {

struct CommandArgs {
    std::string config_path;
    std::string out_prefix;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int threads = 1;
};

int run_command(ScenarioConfig::Command command, const CommandArgs& args) {
    std::ifstream in(args.config_path, std::ios::binary);
    if (!in) {
        std::cerr << "cannot read config: " << args.config_path << "\n";
        return kStatusIoError;
    }
    std::ostringstream buf;
    buf << in.rdbuf();

    ScenarioConfig config;
    try {
        config = parse_scenario(buf.str());
    } catch (const ConfigParseError& e) {
        std::cerr << e.what() << "\n";
        return kStatusHypothesis;
    }
    if (config.command != command) {
        std::cerr << "config declares command '" << to_string(config.command)
                  << "' but the CLI invoked '" << to_string(command) << "'\n";
        return kStatusHypothesis;
    }
    if (args.seed_given) config.seed = args.seed;
    if (!args.out_prefix.empty()) config.out = args.out_prefix;

    const int status = run_scenario(config);
    const std::string prefix = config.out.empty() ? to_string(config.command) : config.out;
    std::cout << "wrote " << prefix << ".csv and " << prefix << ".summary.txt (status " << status
              << ")\n";
    return status;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"avgdiff: difference equations under averaging and window-small perturbations"};
    app.require_subcommand(1);

    static const std::vector<std::pair<std::string, ScenarioConfig::Command>> kCommands = {
        {"simulate", ScenarioConfig::Command::Simulate},
        {"snorm", ScenarioConfig::Command::Snorm},
        {"average", ScenarioConfig::Command::Average},
        {"stability", ScenarioConfig::Command::Stability},
        {"theorem1", ScenarioConfig::Command::Theorem1},
        {"theorem2", ScenarioConfig::Command::Theorem2},
        {"theorem3", ScenarioConfig::Command::Theorem3},
        {"genetics", ScenarioConfig::Command::Genetics},
    };

    auto args = std::make_shared<CommandArgs>();
    int exit_status = 0;
    for (const auto& [name, command] : kCommands) {
        CLI::App* sub = app.add_subcommand(name, "run a '" + name + "' scenario config");
        sub->add_option("--config", args->config_path, "scenario config file")->required();
        sub->add_option("--out", args->out_prefix, "output path prefix (overrides the config)");
        sub->add_option("--seed", args->seed, "sampling seed (overrides the config)")
            ->each([args](const std::string&) { args->seed_given = true; });
        sub->add_option("--threads", args->threads,
                        "worker threads for sweep cells (results are identical at any count)");
        sub->callback([&exit_status, args, command] { exit_status = run_command(command, *args); });
    }

    CLI11_PARSE(app, argc, argv);
    return exit_status;
}

}  // namespace avgdiff
