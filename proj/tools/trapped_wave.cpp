#include <string>

#include <CLI11.hpp>

#include "trapwave/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Resonances, resolvent norms and exclusion sets of radial scatterers"};
    app.require_subcommand(1);
    std::string config;
    std::string out;
    const char* names[][2] = {
        {"resonances", "Resonance catalog (catalog.jsonl, summary.json)"},
        {"sweep", "Resolvent-norm sweep with exclusion set and envelope report"},
        {"layer-sweep", "Inverse norms of the combined-field boundary operators"},
        {"exclusion", "Exclusion set (exclusion.json)"},
        {"certify", "Quasimode lower-bound certificates (certificates.json)"},
    };
    for (const auto& n : names) {
        CLI::App* sub = app.add_subcommand(n[0], n[1]);
        sub->add_option("--config", config, "Run configuration (JSON)")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", out, "Output directory")->required();
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        if (rc == 0) return 0;  // --help
        // A missing config file fails validation and counts as a config error.
        return rc == static_cast<int>(CLI::ExitCodes::ValidationError) ? trapwave::kExitConfig
                                                                        : trapwave::kExitUsage;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    return trapwave::run_command(command, config, out);
}
