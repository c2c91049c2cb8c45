#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "cdrtime/events.hpp"
#include "cdrtime/similarity.hpp"

namespace cdrtime {

enum class Subcommand { Synth, Match, Stats, Fit, Similarity, All };

struct RunConfig {
    Subcommand command = Subcommand::All;
    std::filesystem::path network;
    std::filesystem::path cdr;
    std::filesystem::path errors;         // stats/fit/similarity input; default <out>/errors.csv
    std::filesystem::path synth_config;   // optional JSON scenario for `synth`
    std::filesystem::path out = ".";
    int utc_offset_seconds = 0;
    std::size_t min_per_bin = kDefaultMinPerBin;
    std::optional<Charging> charging;     // stratum; defaults to Postpaid
    std::optional<Tech> tech;             // stratum; defaults to 4G
    bool pooled = false;                  // similarity over all strata
    std::uint64_t seed = 42;
    bool heatmap = false;
    std::size_t max_cells = 0;            // seeded subsample for similarity; 0 keeps all
    unsigned threads = 0;
};

/// Missing inputs or invalid options; mapped to exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitProcessing = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand and writes its artifacts under config.out:
///   synth       network.csv, cdr.csv, parents.csv, manifest.json
///   match       errors.csv, match_report.json, rejects_network.csv, rejects_cdr.csv
///   stats       bin_stats.csv
///   fit         fit_params.json
///   similarity  similarity_matrix.csv, similarity_chi2.csv,
///               similarity_combined_p.csv, similarity_order.json
///               (+ similarity_heatmap.svg with config.heatmap)
///   all         match, stats, fit and similarity in sequence via errors.csv
/// Progress and diagnostics go to `log`. Returns the process exit code.
int run(const RunConfig& config, std::ostream& log);

}  // namespace cdrtime
