#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "cdrtime/events.hpp"
#include "cdrtime/exgaussian.hpp"
#include "cdrtime/random.hpp"
#include "cdrtime/time_bins.hpp"

namespace cdrtime {

using BinLaws = std::array<ExGaussianParams, kBinCount>;

/// Cells sharing a planted CDR delay law per time bin.
///
/// cell_tau_spread > 0 makes the group heterogeneous: cell c of n scales every
/// tau by exp(spread * sqrt(3) * (2 (c + 0.5) / n - 1)), i.e. log-multipliers
/// evenly spaced with standard deviation `spread`.
struct CellGroupSpec {
    std::string group_id;
    std::size_t cell_count = 1;
    BinLaws delay_laws{};
    Tech tech = Tech::G4;
    double charging_mix = 0.5;  // prepaid fraction of subscribers
    double cell_tau_spread = 0.0;
};

struct SynthConfig {
    std::vector<CellGroupSpec> groups;
    std::size_t subscribers = 1;
    int days = 1;
    double events_per_subscriber_day = 10.0;
    std::uint64_t seed = 42;
    int utc_offset_seconds = 0;
    double cdr_probability = 0.8;
    Seconds start_epoch = 1704067200;  // first local midnight is start_epoch - utc_offset

    /// Throws std::invalid_argument on an unusable configuration.
    void validate() const;
};

/// Two groups of ten 4G cells: a homogeneous "generic" group and an "exotic"
/// group whose delays have three times the exponential tail, a later onset
/// and per-cell heterogeneity. 500 subscribers over 5 days.
SynthConfig default_scenario(std::uint64_t seed = 42);

/// Normal(mu, sigma^2) plus an exponential with mean tau.
double sample_exgaussian(const ExGaussianParams& params, Rng& rng);

/// Ground truth for one emitted CDR.
struct ParentLink {
    std::string subscriber_id;
    std::string cell_id;
    std::string group_id;
    Seconds cdr_timestamp = 0;
    Seconds network_timestamp = 0;
    Seconds delay_seconds = 0;
};

struct PlantedCell {
    std::string cell_id;
    std::string group_id;
    Tech tech = Tech::G4;
    BinLaws laws{};
};

struct SynthTrace {
    std::vector<NetworkEvent> network;
    std::vector<CdrEvent> cdr;
    std::vector<ParentLink> parents;  // parallel to cdr
    std::vector<PlantedCell> cells;
};

/// Per subscriber (round-robin over groups, contract drawn from
/// charging_mix): network events follow a homogeneous Poisson process over
/// `days`, each in a uniformly chosen cell of the home group. Each network
/// event emits a CDR with probability cdr_probability, delayed by a draw from
/// the cell's law for the local bin of the network event (clamped at zero,
/// truncated to whole seconds). Same config, same output.
SynthTrace generate_trace(const SynthConfig& config);

nlohmann::ordered_json config_to_json(const SynthConfig& config);
SynthConfig config_from_json(const nlohmann::json& j);

/// Writes network.csv, cdr.csv, parents.csv and manifest.json into `dir`.
void write_trace(const SynthTrace& trace, const SynthConfig& config,
                 const std::filesystem::path& dir);

}  // namespace cdrtime
