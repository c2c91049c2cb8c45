#include "cdrtime/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "cdrtime/csv.hpp"
#include "cdrtime/ingest.hpp"

namespace cdrtime {
namespace {

constexpr double kDay = 86400.0;

std::string padded(std::size_t value, std::size_t width) {
    auto s = std::to_string(value);
    if (s.size() < width) s.insert(0, width - s.size(), '0');
    return s;
}

std::size_t digits(std::size_t n) { return n < 10 ? 1 : 1 + digits(n / 10); }

std::vector<PlantedCell> plant_cells(const SynthConfig& config) {
    std::vector<PlantedCell> cells;
    for (const auto& g : config.groups) {
        const auto width = std::max<std::size_t>(2, digits(g.cell_count - 1));
        for (std::size_t c = 0; c < g.cell_count; ++c) {
            PlantedCell cell{g.group_id + "-" + padded(c, width), g.group_id, g.tech, g.delay_laws};
            if (g.cell_tau_spread > 0.0) {
                const double pos = 2.0 * (static_cast<double>(c) + 0.5) /
                                       static_cast<double>(g.cell_count) -
                                   1.0;
                const double mult = std::exp(g.cell_tau_spread * std::sqrt(3.0) * pos);
                for (auto& law : cell.laws) law.tau *= mult;
            }
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

nlohmann::ordered_json law_to_json(const ExGaussianParams& p) {
    return {{"mu", p.mu}, {"sigma", p.sigma}, {"tau", p.tau}};
}

ExGaussianParams law_from_json(const nlohmann::json& j) {
    return {j.at("mu").get<double>(), j.at("sigma").get<double>(), j.at("tau").get<double>()};
}

}  // namespace

void SynthConfig::validate() const {
    if (groups.empty()) throw std::invalid_argument("synth: at least one cell group required");
    for (const auto& g : groups) {
        if (g.group_id.empty()) throw std::invalid_argument("synth: empty group_id");
        if (g.cell_count < 1) throw std::invalid_argument("synth: group " + g.group_id + " has no cells");
        if (!(g.charging_mix >= 0.0 && g.charging_mix <= 1.0)) {
            throw std::invalid_argument("synth: charging_mix must lie in [0, 1]");
        }
        if (!(g.cell_tau_spread >= 0.0) || !std::isfinite(g.cell_tau_spread)) {
            throw std::invalid_argument("synth: cell_tau_spread must be >= 0");
        }
        for (const auto& law : g.delay_laws) law.validate();
    }
    if (subscribers < 1) throw std::invalid_argument("synth: subscribers must be >= 1");
    if (days < 1) throw std::invalid_argument("synth: days must be >= 1");
    if (!(events_per_subscriber_day > 0.0) || !std::isfinite(events_per_subscriber_day)) {
        throw std::invalid_argument("synth: events_per_subscriber_day must be > 0");
    }
    if (!(cdr_probability >= 0.0 && cdr_probability <= 1.0)) {
        throw std::invalid_argument("synth: cdr_probability must lie in [0, 1]");
    }
    if (utc_offset_seconds < kMinUtcOffset || utc_offset_seconds > kMaxUtcOffset) {
        throw std::invalid_argument("synth: utc offset out of range");
    }
    if (start_epoch - utc_offset_seconds < 0) {
        throw std::invalid_argument("synth: start_epoch too small for the utc offset");
    }
}

SynthConfig default_scenario(std::uint64_t seed) {
    // Mild diurnal shape on the exponential tail, larger at night.
    constexpr std::array<double, kBinCount> kTauShape{1.3, 1.2, 1.0, 0.9, 0.95, 1.0, 1.05};

    CellGroupSpec generic{"generic", 10, {}, Tech::G4, 0.3, 0.0};
    CellGroupSpec exotic{"exotic", 10, {}, Tech::G4, 0.3, 0.7};
    for (std::size_t b = 0; b < kBinCount; ++b) {
        generic.delay_laws[b] = {300.0, 60.0, 100.0 * kTauShape[b]};
        exotic.delay_laws[b] = {900.0, 60.0, 300.0 * kTauShape[b]};
    }

    SynthConfig config;
    config.groups = {generic, exotic};
    config.subscribers = 500;
    config.days = 5;
    config.events_per_subscriber_day = 40.0;
    config.seed = seed;
    return config;
}

double sample_exgaussian(const ExGaussianParams& params, Rng& rng) {
    const double g = rng.normal(params.mu, params.sigma);
    return g + rng.exponential(params.tau);
}

SynthTrace generate_trace(const SynthConfig& config) {
    config.validate();

    SynthTrace trace;
    trace.cells = plant_cells(config);

    // Index of each group's first cell in trace.cells.
    std::vector<std::size_t> group_offset;
    std::size_t offset = 0;
    for (const auto& g : config.groups) {
        group_offset.push_back(offset);
        offset += g.cell_count;
    }

    Rng rng(config.seed);
    const Seconds origin = config.start_epoch - config.utc_offset_seconds;
    const double horizon = kDay * config.days;
    const double mean_gap = kDay / config.events_per_subscriber_day;
    const auto width = std::max<std::size_t>(4, digits(config.subscribers - 1));

    for (std::size_t s = 0; s < config.subscribers; ++s) {
        const std::string subscriber = "S" + padded(s, width);
        const std::size_t gi = s % config.groups.size();
        const auto& group = config.groups[gi];
        const Charging charging =
            rng.bernoulli(group.charging_mix) ? Charging::Prepaid : Charging::Postpaid;

        const std::size_t first_cdr = trace.cdr.size();
        double t = 0.0;
        while (true) {
            t += rng.exponential(mean_gap);
            if (t >= horizon) break;
            const Seconds ts = origin + static_cast<Seconds>(std::floor(t));
            const auto& cell =
                trace.cells[group_offset[gi] + static_cast<std::size_t>(rng.below(group.cell_count))];
            trace.network.push_back({ts, subscriber, cell.cell_id, cell.tech});

            if (!rng.bernoulli(config.cdr_probability)) continue;
            const auto bin = static_cast<std::size_t>(assign_bin(ts, config.utc_offset_seconds));
            const double delay = sample_exgaussian(cell.laws[bin], rng);
            const auto whole = static_cast<Seconds>(std::floor(std::max(0.0, delay)));
            trace.cdr.push_back({ts + whole, subscriber, cell.cell_id, cell.tech, charging});
            trace.parents.push_back({subscriber, cell.cell_id, group.group_id, ts + whole, ts, whole});
        }

        // Delays reorder CDRs; keep each subscriber's CDRs in time order.
        std::vector<std::size_t> idx(trace.cdr.size() - first_cdr);
        std::iota(idx.begin(), idx.end(), first_cdr);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return trace.cdr[a].timestamp < trace.cdr[b].timestamp;
        });
        std::vector<CdrEvent> cdr;
        std::vector<ParentLink> parents;
        for (auto i : idx) {
            cdr.push_back(std::move(trace.cdr[i]));
            parents.push_back(std::move(trace.parents[i]));
        }
        std::move(cdr.begin(), cdr.end(), trace.cdr.begin() + static_cast<std::ptrdiff_t>(first_cdr));
        std::move(parents.begin(), parents.end(),
                  trace.parents.begin() + static_cast<std::ptrdiff_t>(first_cdr));
    }
    return trace;
}

nlohmann::ordered_json config_to_json(const SynthConfig& config) {
    nlohmann::ordered_json j;
    j["seed"] = config.seed;
    j["subscribers"] = config.subscribers;
    j["days"] = config.days;
    j["events_per_subscriber_day"] = config.events_per_subscriber_day;
    j["utc_offset_seconds"] = config.utc_offset_seconds;
    j["cdr_probability"] = config.cdr_probability;
    j["start_epoch"] = config.start_epoch;
    j["groups"] = nlohmann::ordered_json::array();
    for (const auto& g : config.groups) {
        nlohmann::ordered_json gj;
        gj["group_id"] = g.group_id;
        gj["cell_count"] = g.cell_count;
        gj["tech"] = std::string(to_string(g.tech));
        gj["charging_mix"] = g.charging_mix;
        gj["cell_tau_spread"] = g.cell_tau_spread;
        gj["delay_laws"] = nlohmann::ordered_json::array();
        for (const auto& law : g.delay_laws) gj["delay_laws"].push_back(law_to_json(law));
        j["groups"].push_back(gj);
    }
    return j;
}

SynthConfig config_from_json(const nlohmann::json& j) {
    SynthConfig config;
    config.seed = j.value("seed", config.seed);
    config.subscribers = j.value("subscribers", config.subscribers);
    config.days = j.value("days", config.days);
    config.events_per_subscriber_day =
        j.value("events_per_subscriber_day", config.events_per_subscriber_day);
    config.utc_offset_seconds = j.value("utc_offset_seconds", config.utc_offset_seconds);
    config.cdr_probability = j.value("cdr_probability", config.cdr_probability);
    config.start_epoch = j.value("start_epoch", config.start_epoch);
    for (const auto& gj : j.at("groups")) {
        CellGroupSpec g;
        g.group_id = gj.at("group_id").get<std::string>();
        g.cell_count = gj.value("cell_count", g.cell_count);
        const auto tech = parse_tech(gj.value("tech", std::string("4G")));
        if (!tech) throw std::invalid_argument("synth config: unknown tech in group " + g.group_id);
        g.tech = *tech;
        g.charging_mix = gj.value("charging_mix", g.charging_mix);
        g.cell_tau_spread = gj.value("cell_tau_spread", g.cell_tau_spread);
        const auto& laws = gj.at("delay_laws");
        if (laws.is_object()) {
            g.delay_laws.fill(law_from_json(laws));
        } else if (laws.is_array() && laws.size() == kBinCount) {
            for (std::size_t b = 0; b < kBinCount; ++b) g.delay_laws[b] = law_from_json(laws[b]);
        } else {
            throw std::invalid_argument("synth config: delay_laws must be one law or seven");
        }
        config.groups.push_back(std::move(g));
    }
    config.validate();
    return config;
}

void write_trace(const SynthTrace& trace, const SynthConfig& config,
                 const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const auto open = [&](const char* name) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
        return out;
    };
    {
        auto out = open("network.csv");
        write_network_csv(out, trace.network);
    }
    {
        auto out = open("cdr.csv");
        write_cdr_csv(out, trace.cdr);
    }
    {
        auto out = open("parents.csv");
        out << "subscriber_id,cell_id,group_id,cdr_timestamp,network_timestamp,delay_seconds\n";
        for (const auto& p : trace.parents) {
            out << csv::quote(p.subscriber_id) << ',' << csv::quote(p.cell_id) << ','
                << csv::quote(p.group_id) << ',' << p.cdr_timestamp << ',' << p.network_timestamp
                << ',' << p.delay_seconds << '\n';
        }
    }
    {
        nlohmann::ordered_json manifest;
        manifest["seed"] = config.seed;
        manifest["network_path"] = "network.csv";
        manifest["cdr_path"] = "cdr.csv";
        manifest["parent_map_path"] = "parents.csv";
        manifest["config"] = config_to_json(config);
        manifest["planted_laws"] = nlohmann::ordered_json::array();
        for (const auto& cell : trace.cells) {
            nlohmann::ordered_json cj;
            cj["cell_id"] = cell.cell_id;
            cj["group_id"] = cell.group_id;
            cj["tech"] = std::string(to_string(cell.tech));
            cj["laws"] = nlohmann::ordered_json::array();
            for (const auto& law : cell.laws) cj["laws"].push_back(law_to_json(law));
            manifest["planted_laws"].push_back(cj);
        }
        auto out = open("manifest.json");
        out << manifest.dump(2) << '\n';
    }
}

}  // namespace cdrtime
