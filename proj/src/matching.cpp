#include "cdrtime/matching.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "cdrtime/csv.hpp"

namespace cdrtime {
namespace {

constexpr std::string_view kErrorsHeader =
    "cdr_timestamp,error_seconds,cell_id,tech,charging,subscriber_id";

template <typename Event>
bool sorted_by_subscriber_time(const std::vector<Event>& events) {
    return std::is_sorted(events.begin(), events.end(), [](const auto& a, const auto& b) {
        if (a.subscriber_id != b.subscriber_id) return a.subscriber_id < b.subscriber_id;
        return a.timestamp < b.timestamp;
    });
}

Seconds parse_seconds(const std::string& text, std::size_t line_no) {
    Seconds value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw std::runtime_error("errors csv line " + std::to_string(line_no) +
                                 ": invalid integer '" + text + "'");
    }
    return value;
}

}  // namespace

MatchResult match_backward(const EventDataset& dataset) {
    if (!sorted_by_subscriber_time(dataset.network) || !sorted_by_subscriber_time(dataset.cdr)) {
        throw std::invalid_argument("match_backward: dataset is not sorted by (subscriber, time)");
    }

    MatchResult result;
    const auto& net = dataset.network;
    const auto& cdr = dataset.cdr;
    std::size_t ni = 0;
    std::size_t ci = 0;
    std::unordered_map<std::string_view, Seconds> last_seen;

    while (ci < cdr.size()) {
        const std::string& subscriber = cdr[ci].subscriber_id;
        while (ni < net.size() && net[ni].subscriber_id < subscriber) ++ni;
        last_seen.clear();

        for (; ci < cdr.size() && cdr[ci].subscriber_id == subscriber; ++ci) {
            const CdrEvent& e = cdr[ci];
            // Network events at the CDR's own second are eligible (error 0).
            for (; ni < net.size() && net[ni].subscriber_id == subscriber &&
                   net[ni].timestamp <= e.timestamp;
                 ++ni) {
                last_seen[net[ni].cell_id] = net[ni].timestamp;
            }
            const auto hit = last_seen.find(e.cell_id);
            if (hit == last_seen.end()) {
                ++result.report.unmatched_count;
                continue;
            }
            result.records.push_back(ErrorRecord{e.timestamp, e.timestamp - hit->second, e.cell_id,
                                                 e.tech, e.charging, e.subscriber_id});
            ++result.report.matched_count;
            ++result.report.per_cell_counts[e.cell_id];
        }
    }
    return result;
}

void write_errors_csv(std::ostream& out, std::span<const ErrorRecord> records) {
    out << kErrorsHeader << '\n';
    for (const auto& r : records) {
        out << r.cdr_timestamp << ',' << r.error_seconds << ',' << csv::quote(r.cell_id) << ','
            << to_string(r.tech) << ',' << to_string(r.charging) << ','
            << csv::quote(r.subscriber_id) << '\n';
    }
}

void write_match_report_json(std::ostream& out, const MatchReport& report) {
    nlohmann::ordered_json j;
    j["matched_count"] = report.matched_count;
    j["unmatched_count"] = report.unmatched_count;
    j["per_cell_counts"] = nlohmann::ordered_json::object();
    for (const auto& [cell, count] : report.per_cell_counts) {
        j["per_cell_counts"][cell] = count;
    }
    out << j.dump(2) << '\n';
}

std::vector<ErrorRecord> read_errors_csv(std::istream& in) {
    std::vector<ErrorRecord> records;
    std::string raw;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = csv::chomp(raw);
        if (line.empty()) continue;
        if (!header_seen) {
            if (line != kErrorsHeader) {
                throw SchemaError("errors csv: unexpected header '" + std::string(line) + "'");
            }
            header_seen = true;
            continue;
        }
        auto fields = csv::split(line);
        if (!fields || fields->size() != 6) {
            throw std::runtime_error("errors csv line " + std::to_string(line_no) +
                                     ": expected 6 fields");
        }
        auto& f = *fields;
        const auto tech = parse_tech(f[3]);
        const auto charging = parse_charging(f[4]);
        if (!tech || !charging) {
            throw std::runtime_error("errors csv line " + std::to_string(line_no) +
                                     ": unknown tech or charging");
        }
        ErrorRecord r{parse_seconds(f[0], line_no), parse_seconds(f[1], line_no), std::move(f[2]),
                      *tech, *charging, std::move(f[5])};
        if (r.error_seconds < 0) {
            throw std::runtime_error("errors csv line " + std::to_string(line_no) +
                                     ": negative error");
        }
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<ErrorRecord> read_errors_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_errors_csv(in);
}

}  // namespace cdrtime
