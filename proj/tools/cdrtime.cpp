// cdrtime: timestamp-error analysis of charging data records against
// ground-truth network events.

#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "cdrtime/pipeline.hpp"

namespace {

struct Flags {
    std::string network;
    std::string cdr;
    std::string errors;
    std::string config;
    std::string out = ".";
    int utc_offset = 0;
    std::size_t min_per_bin = cdrtime::kDefaultMinPerBin;
    std::string charging;
    std::string tech;
    std::uint64_t seed = 42;
    bool heatmap = false;
    bool pooled = false;
    std::size_t max_cells = 0;
    unsigned threads = 0;
};

void add_common(CLI::App* app, Flags& f) {
    app->add_option("--out", f.out, "Output directory")->capture_default_str();
    app->add_option("--utc-offset", f.utc_offset, "Seconds added to UTC to get local time")
        ->capture_default_str();
}

void add_inputs(CLI::App* app, Flags& f) {
    app->add_option("--network", f.network, "Network events (CSV or NDJSON)");
    app->add_option("--cdr", f.cdr, "CDR events (CSV or NDJSON)");
}

void add_errors(CLI::App* app, Flags& f) {
    app->add_option("--errors", f.errors, "Errors CSV from `match` (default <out>/errors.csv)");
}

void add_similarity(CLI::App* app, Flags& f) {
    app->add_option("--min-per-bin", f.min_per_bin, "Events per bin needed to compare two cells")
        ->capture_default_str();
    app->add_option("--charging", f.charging, "Stratum charging type (default Postpaid)")
        ->check(CLI::IsMember({"Prepaid", "Postpaid"}));
    app->add_option("--tech", f.tech, "Stratum technology (default 4G)")
        ->check(CLI::IsMember({"2G", "3G", "4G"}));
    app->add_flag("--pooled", f.pooled, "Compare cells over all strata");
    app->add_flag("--heatmap", f.heatmap, "Also write similarity_heatmap.svg");
    app->add_option("--max-cells", f.max_cells, "Seeded random subsample of cells (0 = all)");
    app->add_option("--seed", f.seed, "Seed for --max-cells")->capture_default_str();
    app->add_option("--threads", f.threads, "Worker threads (0 = all cores)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CDR timestamp error analysis"};
    app.require_subcommand(1);
    Flags f;

    const std::map<CLI::App*, cdrtime::Subcommand> commands = [&] {
        std::map<CLI::App*, cdrtime::Subcommand> m;

        auto* synth = app.add_subcommand("synth", "Generate a synthetic trace with planted delays");
        add_common(synth, f);
        synth->add_option("--seed", f.seed, "Random seed")->capture_default_str();
        synth->add_option("--config", f.config, "Scenario JSON (default: built-in two-group scenario)");
        m[synth] = cdrtime::Subcommand::Synth;

        auto* match = app.add_subcommand("match", "Match CDRs to past network events");
        add_common(match, f);
        add_inputs(match, f);
        m[match] = cdrtime::Subcommand::Match;

        auto* stats = app.add_subcommand("stats", "Per-bin mean and standard deviation");
        add_common(stats, f);
        add_errors(stats, f);
        m[stats] = cdrtime::Subcommand::Stats;

        auto* fit = app.add_subcommand("fit", "exGaussian fits per (charging, tech, bin)");
        add_common(fit, f);
        add_errors(fit, f);
        m[fit] = cdrtime::Subcommand::Fit;

        auto* sim = app.add_subcommand("similarity", "Cell-to-cell correlation index matrix");
        add_common(sim, f);
        add_errors(sim, f);
        add_similarity(sim, f);
        m[sim] = cdrtime::Subcommand::Similarity;

        auto* all = app.add_subcommand("all", "match, stats, fit and similarity in sequence");
        add_common(all, f);
        add_inputs(all, f);
        add_similarity(all, f);
        m[all] = cdrtime::Subcommand::All;
        return m;
    }();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cdrtime::kExitUsage;
    }

    cdrtime::RunConfig config;
    for (const auto& [sub, command] : commands) {
        if (sub->parsed()) config.command = command;
    }
    config.network = f.network;
    config.cdr = f.cdr;
    config.errors = f.errors;
    config.synth_config = f.config;
    config.out = f.out;
    config.utc_offset_seconds = f.utc_offset;
    config.min_per_bin = f.min_per_bin;
    if (!f.charging.empty()) config.charging = cdrtime::parse_charging(f.charging);
    if (!f.tech.empty()) config.tech = cdrtime::parse_tech(f.tech);
    config.pooled = f.pooled;
    config.seed = f.seed;
    config.heatmap = f.heatmap;
    config.max_cells = f.max_cells;
    config.threads = f.threads;

    return cdrtime::run(config, std::cerr);
}
