#include "bandedge/commands.hpp"
#include "bandedge/config.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

using namespace bandedge;

namespace {

struct Options {
    std::string config_path;
    std::string preset;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    std::string format;
    unsigned workers = 0;
};

RunConfig assemble(const Options& opt) {
    nlohmann::json doc = nlohmann::json::object();
    if (!opt.preset.empty()) doc = preset_document(opt.preset);
    if (!opt.config_path.empty()) {
        std::ifstream in(opt.config_path);
        if (!in) throw ConfigError("cannot open config file '" + opt.config_path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        nlohmann::json overlay;
        try {
            overlay = nlohmann::json::parse(ss.str());
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError(std::string("config: malformed JSON: ") + e.what());
        }
        doc = merge_documents(doc, overlay);
    }
    if (opt.preset.empty() && opt.config_path.empty())
        throw ConfigError("give --config PATH and/or --preset NAME");
    RunConfig config = load_config(doc);
    if (opt.seed) {
        if (!config.disorder) throw ConfigError("--seed needs a 'disorder' section");
        config.disorder->seed = *opt.seed;
    }
    return config;
}

OutputFormat parse_format(const std::string& text, OutputFormat fallback) {
    if (text.empty()) return fallback;
    if (text == "csv") return OutputFormat::csv;
    if (text == "json") return OutputFormat::json;
    throw ConfigError("--format must be csv or json");
}

void emit(const Options& opt, const CommandOutput& out) {
    if (opt.out_path.empty()) {
        std::cout << out.data << std::flush;
    } else {
        std::ofstream file(opt.out_path, std::ios::binary);
        if (!file) throw ConfigError("cannot write '" + opt.out_path + "'");
        file << out.data;
    }
    if (!out.summary.empty()) std::cerr << out.summary << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Atoms coupled to photonic-crystal band edges: figure-data commands"};
    app.require_subcommand(1);
    Options opt;

    using Runner = std::function<CommandOutput(const RunConfig&, OutputFormat)>;
    struct Command {
        const char* name;
        const char* help;
        Runner run;
        OutputFormat default_format;
    };
    const std::vector<Command> commands{
        {"bound-state", "Bound-state table over Delta/beta", cmd_bound_state, OutputFormat::csv},
        {"interactions", "|U_0j|/gamma versus separation for each detuning", cmd_interactions, OutputFormat::csv},
        {"design-powerlaw", "Fit a power law with drive-induced exponentials", cmd_design_powerlaw,
         OutputFormat::json},
        {"exchange", "Optimized two-atom excitation exchange", cmd_exchange, OutputFormat::json},
        {"evolve", "Single-excitation transport along a chain", cmd_evolve, OutputFormat::csv},
        {"disorder", "Localization length of a disordered stack",
         [&opt](const RunConfig& c, OutputFormat f) { return cmd_disorder(c, f, opt.workers); }, OutputFormat::json},
        {"config", "Print the merged configuration in canonical form",
         [](const RunConfig& c, OutputFormat) { return CommandOutput{canonical_dump(c), "", 0}; },
         OutputFormat::json},
    };

    std::map<CLI::App*, const Command*> by_app;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "JSON config file (merged over the preset)");
        sub->add_option("--preset", opt.preset, "Bundled preset name")->check(CLI::IsMember(preset_names()));
        sub->add_option("--out", opt.out_path, "Write machine-readable output here instead of stdout");
        sub->add_option("--seed", opt.seed, "RNG seed override");
        sub->add_option("--format", opt.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    };
    for (const auto& c : commands) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        add_common(sub);
        by_app[sub] = &c;
        if (std::string(c.name) == "disorder")
            sub->add_option("--workers", opt.workers, "Monte-Carlo threads (0: hardware concurrency)");
    }
    CLI::App* preset = app.add_subcommand("preset", "Bundled presets");
    preset->require_subcommand(1);
    CLI::App* preset_list = preset->add_subcommand("list", "List preset names");
    preset_list->add_option("--out", opt.out_path, "Write the list here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_code::config;
    }

    try {
        if (preset_list->parsed()) {
            emit(opt, cmd_preset_list());
            return exit_code::ok;
        }
        for (const auto& [sub, command] : by_app) {
            if (!sub->parsed()) continue;
            const RunConfig config = assemble(opt);
            const CommandOutput out = command->run(config, parse_format(opt.format, command->default_format));
            emit(opt, out);
            return out.exit_code;
        }
    } catch (const FitFailure& e) {
        std::cerr << "fit failure: " << e.what() << "\n";
        return exit_code::fit;
    } catch (const InvalidParameter& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_code::config;
    } catch (const NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_code::numeric;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_code::numeric;
    }
    return exit_code::config;
}
