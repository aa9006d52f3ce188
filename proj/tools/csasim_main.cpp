#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "csa/config.hpp"

int main(int argc, char** argv) {
    CLI::App app{
        "csasim: cooperative sequential adsorption simulator and statistical "
        "verification harness"};
    app.require_subcommand(1);

    std::string config_path;
    uint64_t seed_override = 0;
    std::string out_override;
    long replicates_override = 0;
    int threads_override = 0;

    for (const auto& name : csa::known_commands()) {
        auto* sub = app.add_subcommand(name, "");
        sub->add_option("--config", config_path, "path to the JSON run configuration")->required();
        sub->add_option("--seed", seed_override, "override the configured base seed");
        sub->add_option("--out", out_override, "override the configured output directory");
        sub->add_option("--replicates", replicates_override, "override the replicate count");
        sub->add_option("--threads", threads_override, "cap worker parallelism (0 = all cores)");
    }

    CLI11_PARSE(app, argc, argv);
    CLI::App* parsed = app.get_subcommands().front();

    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "error: cannot read config file: " << config_path << "\n";
        return 2;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();

    csa::ParseResult result = csa::parse_config(buffer.str());
    if (!result.ok()) {
        std::cerr << "invalid configuration (" << result.issues.size() << " issue(s)):\n";
        for (const auto& issue : result.issues) {
            std::cerr << "  - [" << issue.where << "] " << issue.message << "\n";
        }
        return 2;
    }
    csa::RunConfig config = *result.config;

    if (parsed->count("--seed") > 0) config.base_seed = seed_override;
    if (parsed->count("--out") > 0) config.output_dir = out_override;
    if (parsed->count("--replicates") > 0) {
        if (replicates_override < 1) {
            std::cerr << "error: --replicates must be >= 1\n";
            return 2;
        }
        config.replicates = replicates_override;
    }
    if (parsed->count("--threads") > 0) {
        config.threads = threads_override;
    } else if (config.threads == 0) {
        if (const char* env = std::getenv("CSA_SIM_THREADS")) {
            config.threads = std::atoi(env);
        }
    }

    return csa::execute(parsed->get_name(), config);
}
