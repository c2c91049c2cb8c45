#include "cdrtime/pipeline.hpp"

#include <fstream>
#include <ostream>

#include <json.hpp>

#include "cdrtime/exgaussian.hpp"
#include "cdrtime/ingest.hpp"
#include "cdrtime/matching.hpp"
#include "cdrtime/stats.hpp"
#include "cdrtime/synth.hpp"

namespace cdrtime {
namespace {

namespace fs = std::filesystem;

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

void require_file(const fs::path& path, const char* flag) {
    if (path.empty()) throw UsageError(std::string("missing required option ") + flag);
    if (!fs::is_regular_file(path)) throw UsageError("input not found: " + path.string());
}

void prepare_out(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::is_directory(dir)) throw UsageError("cannot create output directory " + dir.string());
}

fs::path errors_path(const RunConfig& config) {
    return config.errors.empty() ? config.out / "errors.csv" : config.errors;
}

void run_synth(const RunConfig& config, std::ostream& log) {
    SynthConfig synth = default_scenario(config.seed);
    if (!config.synth_config.empty()) {
        require_file(config.synth_config, "--config");
        std::ifstream in(config.synth_config);
        const auto j = nlohmann::json::parse(in, nullptr, false);
        if (j.is_discarded()) throw std::runtime_error("synth config is not valid JSON");
        synth = config_from_json(j);
    }
    const auto trace = generate_trace(synth);
    write_trace(trace, synth, config.out);
    log << "synth: " << trace.network.size() << " network events, " << trace.cdr.size()
        << " CDRs, " << trace.cells.size() << " cells\n";
}

std::size_t run_match(const RunConfig& config, std::ostream& log) {
    require_file(config.network, "--network");
    require_file(config.cdr, "--cdr");

    auto net = parse_network_events(config.network, format_from_path(config.network));
    auto cdr = parse_cdr_events(config.cdr, format_from_path(config.cdr));
    {
        auto out = open_output(config.out / "rejects_network.csv");
        write_rejects_csv(out, net.rejects);
    }
    {
        auto out = open_output(config.out / "rejects_cdr.csv");
        write_rejects_csv(out, cdr.rejects);
    }

    const auto dataset =
        build_dataset(std::move(net.events), std::move(cdr.events), config.utc_offset_seconds);
    const auto result = match_backward(dataset);
    {
        auto out = open_output(config.out / "errors.csv");
        write_errors_csv(out, result.records);
    }
    {
        auto out = open_output(config.out / "match_report.json");
        write_match_report_json(out, result.report);
    }
    log << "match: " << result.report.matched_count << " matched, "
        << result.report.unmatched_count << " unmatched, " << net.rejects.size() + cdr.rejects.size()
        << " rejected rows\n";
    return result.records.size();
}

std::vector<ErrorRecord> load_errors(const RunConfig& config) {
    const auto path = errors_path(config);
    require_file(path, "--errors");
    return read_errors_csv(path);
}

void run_stats(const RunConfig& config, std::ostream& log) {
    const auto records = load_errors(config);
    const auto stats = compute_bin_stats(records, config.utc_offset_seconds);
    auto out = open_output(config.out / "bin_stats.csv");
    write_bin_stats_csv(out, stats);
    log << "stats: " << stats.size() << " groups\n";
}

void run_fit(const RunConfig& config, std::ostream& log) {
    const auto records = load_errors(config);
    nlohmann::ordered_json fits = nlohmann::ordered_json::array();
    std::size_t skipped = 0;
    for (const auto& [key, sample] : group_errors(records, config.utc_offset_seconds)) {
        try {
            const auto fit = fit_exgaussian(sample);
            nlohmann::ordered_json j;
            j["charging"] = std::string(to_string(key.charging));
            j["tech"] = std::string(to_string(key.tech));
            j["bin"] = key.bin;
            j["mu"] = fit.params.mu;
            j["sigma"] = fit.params.sigma;
            j["tau"] = fit.params.tau;
            j["loglik"] = fit.log_likelihood;
            j["n"] = fit.n;
            fits.push_back(std::move(j));
        } catch (const FitError& e) {
            ++skipped;
            log << "fit: skipping " << to_string(key.charging) << '/' << to_string(key.tech)
                << " bin " << key.bin << ": " << e.what() << '\n';
        }
    }
    auto out = open_output(config.out / "fit_params.json");
    out << fits.dump(2) << '\n';
    log << "fit: " << fits.size() << " groups fitted, " << skipped << " skipped\n";
}

void run_similarity(const RunConfig& config, std::ostream& log) {
    const auto records = load_errors(config);
    std::optional<Stratum> stratum;
    if (!config.pooled) {
        stratum = Stratum{config.charging.value_or(Charging::Postpaid),
                          config.tech.value_or(Tech::G4)};
    }
    auto profiles = build_profiles(records, config.utc_offset_seconds, stratum);
    if (config.max_cells > 0) {
        profiles = sample_profiles(std::move(profiles), config.max_cells, config.seed);
    }

    const auto matrix = build_matrix(profiles, config.min_per_bin, config.threads);
    const auto order = order_by_row_sum(matrix);
    const auto ordered = matrix.permuted(order);

    for (const auto& [name, value] :
         {std::pair{"similarity_matrix.csv", MatrixValue::Index},
          std::pair{"similarity_chi2.csv", MatrixValue::Chi2},
          std::pair{"similarity_combined_p.csv", MatrixValue::CombinedP}}) {
        auto out = open_output(config.out / name);
        write_matrix_csv(out, ordered, value);
    }

    nlohmann::ordered_json summary;
    if (stratum) {
        summary["stratum"] = {{"charging", std::string(to_string(stratum->charging))},
                              {"tech", std::string(to_string(stratum->tech))}};
    } else {
        summary["stratum"] = "pooled";
    }
    summary["min_per_bin"] = config.min_per_bin;
    summary["cells"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        const auto mean = ordered.row_mean(i);
        summary["cells"].push_back(
            {{"cell_id", ordered.cells()[i]},
             {"row_mean", mean ? nlohmann::ordered_json(*mean) : nlohmann::ordered_json()}});
    }
    const auto split = split_at_largest_gap(ordered);
    summary["experimental_split"] = {{"first_group_size", split.first_group_size},
                                     {"gap", split.gap}};
    {
        auto out = open_output(config.out / "similarity_order.json");
        out << summary.dump(2) << '\n';
    }
    if (config.heatmap) {
        auto out = open_output(config.out / "similarity_heatmap.svg");
        write_heatmap_svg(out, ordered);
    }
    log << "similarity: " << ordered.size() << " cells\n";
}

}  // namespace

int run(const RunConfig& config, std::ostream& log) {
    try {
        if (config.min_per_bin < 2) throw UsageError("--min-per-bin must be at least 2");
        if (config.utc_offset_seconds < kMinUtcOffset || config.utc_offset_seconds > kMaxUtcOffset) {
            throw UsageError("--utc-offset must lie in [-43200, 50400]");
        }
        if (config.pooled && (config.charging || config.tech)) {
            throw UsageError("--pooled cannot be combined with --charging/--tech");
        }
        prepare_out(config.out);

        switch (config.command) {
            case Subcommand::Synth: run_synth(config, log); break;
            case Subcommand::Match: run_match(config, log); break;
            case Subcommand::Stats: run_stats(config, log); break;
            case Subcommand::Fit: run_fit(config, log); break;
            case Subcommand::Similarity: run_similarity(config, log); break;
            case Subcommand::All: {
                if (run_match(config, log) == 0) {
                    log << "error: no error records\n";
                    return kExitProcessing;
                }
                RunConfig next = config;
                next.errors = config.out / "errors.csv";
                run_stats(next, log);
                run_fit(next, log);
                run_similarity(next, log);
                break;
            }
        }
        return kExitOk;
    } catch (const UsageError& e) {
        log << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return kExitProcessing;
    }
}

}  // namespace cdrtime
