#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "defix/config.hpp"
#include "defix/error.hpp"
#include "defix/pipeline.hpp"

namespace {

struct Args {
    std::string config;
    std::string out;
    std::string frequency;
    std::string predictor;
    bool report = false;
};

void add_common(CLI::App* cmd, Args& args) {
    cmd->add_option("--config", args.config, "INI run configuration")->required()->check(
        CLI::ExistingFile);
    cmd->add_option("--out", args.out, "Output directory (overrides OUTPUT_DIR and the config)");
    cmd->add_option("--frequency", args.frequency, "Analysis frequency")
        ->check(CLI::IsMember({"weekly", "monthly"}));
    cmd->add_flag("--report", args.report, "Also write data_report.jsonl");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DeFi market index construction and return-predictability analysis"};
    app.set_version_flag("--version", std::string(defix::library_version()));
    app.require_subcommand(1);

    Args args;
    const std::pair<const char*, const char*> commands[] = {
        {"build-index", "Build the index; writes index.csv and epochs.json"},
        {"summary", "Summary statistics (t1)"},
        {"correlations", "Correlation matrices (t2, t6)"},
        {"lagged-regressions", "Lagged crypto-return predictors (t3, t4, t5)"},
        {"network", "Network-variable regressions (t7..t13)"},
        {"attention", "Search-attention regressions (t14)"},
        {"valuation", "TVL-to-market ratio panels and log-log fit (t15/t16 or d1/d2, fig2)"},
        {"cumulative", "Cumulative daily returns (fig1)"},
        {"features", "Derived feature export"},
        {"all", "Every artifact"},
    };
    for (const auto& [name, help] : commands) {
        auto* cmd = app.add_subcommand(name, help);
        add_common(cmd, args);
        if (std::string(name) == "lagged-regressions") {
            cmd->add_option("--predictor", args.predictor, "Only one predictor")
                ->check(CLI::IsMember({"btc", "eth", "crix"}));
        }
    }
    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    defix::RunConfig config;
    try {
        config = defix::load_config(args.config);
    } catch (const defix::Error& e) {
        std::cerr << "defix: " << e.what() << '\n';
        return 2;
    }
    if (const char* env = std::getenv("OUTPUT_DIR"); env && *env) config.output_dir = env;
    if (!args.out.empty()) config.output_dir = args.out;

    defix::CommandOptions options;
    if (!args.frequency.empty()) options.frequency = defix::parse_frequency(args.frequency);
    if (!args.predictor.empty()) options.predictor = args.predictor;
    options.report = args.report;

    const auto outcome = defix::run_command(command, config, options);
    for (const auto& f : outcome.failures) {
        std::cerr << "failed";
        if (!f.table_id.empty()) std::cerr << " [" << f.table_id << (f.row.empty() ? "" : "/" + f.row) << "]";
        std::cerr << ": " << f.message << '\n';
    }
    if (outcome.exit_code == 2 && outcome.failures.empty()) {
        std::cerr << "defix: " << outcome.fatal_message << '\n';
    }
    std::cout << outcome.artifacts.size() << " artifacts written to " << config.output_dir.string()
              << '\n';
    return outcome.exit_code;
}
