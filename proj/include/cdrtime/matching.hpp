#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cdrtime/events.hpp"
#include "cdrtime/ingest.hpp"

namespace cdrtime {

/// One CDR with the delay to its closest past same-subscriber same-cell
/// network event. Tech and charging are the CDR's own attributes.
struct ErrorRecord {
    Seconds cdr_timestamp = 0;
    Seconds error_seconds = 0;
    std::string cell_id;
    Tech tech = Tech::G2;
    Charging charging = Charging::Prepaid;
    std::string subscriber_id;

    bool operator==(const ErrorRecord&) const = default;
};

struct MatchReport {
    std::size_t matched_count = 0;
    std::size_t unmatched_count = 0;
    std::map<std::string, std::size_t> per_cell_counts;  // matched CDRs per cell

    bool operator==(const MatchReport&) const = default;
};

struct MatchResult {
    std::vector<ErrorRecord> records;
    MatchReport report;
};

/// Backward association. For each CDR at time t the matched network event has
/// the largest t' <= t among events of the same subscriber in the same cell.
/// CDRs without such an event are counted as unmatched. Records come out
/// ordered by (subscriber_id, cdr_timestamp).
///
/// Throws std::invalid_argument if the dataset is not sorted as produced by
/// build_dataset().
MatchResult match_backward(const EventDataset& dataset);

void write_errors_csv(std::ostream& out, std::span<const ErrorRecord> records);
void write_match_report_json(std::ostream& out, const MatchReport& report);

/// Reads the errors CSV written by write_errors_csv. Malformed rows are fatal
/// here since the file is a pipeline intermediate, not raw input.
std::vector<ErrorRecord> read_errors_csv(std::istream& in);
std::vector<ErrorRecord> read_errors_csv(const std::filesystem::path& path);

}  // namespace cdrtime
