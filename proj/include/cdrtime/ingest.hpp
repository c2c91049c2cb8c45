#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cdrtime/events.hpp"

namespace cdrtime {

enum class Format { Csv, Ndjson };

/// Picks NDJSON for `.ndjson`/`.jsonl`/`.json` extensions, CSV otherwise.
Format format_from_path(const std::filesystem::path& path);

/// A data row that could not be turned into an event.
struct Reject {
    std::size_t line = 0;  // 1-based line number in the source file
    std::string reason;

    bool operator==(const Reject&) const = default;
};

template <typename Event>
struct ParseResult {
    std::vector<Event> events;
    std::vector<Reject> rejects;
    std::size_t data_rows = 0;  // accepted + rejected; blank lines are not rows
};

inline constexpr int kMinUtcOffset = -43200;
inline constexpr int kMaxUtcOffset = 50400;

/// Both streams sorted by (subscriber_id, timestamp). Build through
/// build_dataset(); the matcher checks the ordering.
struct EventDataset {
    std::vector<NetworkEvent> network;
    std::vector<CdrEvent> cdr;
    int utc_offset_seconds = 0;
};

// Stream variants exist so tests and in-memory callers can skip the file
// system. Schema mismatches throw SchemaError; bad rows become rejects.
ParseResult<NetworkEvent> parse_network_events(std::istream& in, Format format);
ParseResult<CdrEvent> parse_cdr_events(std::istream& in, Format format);
ParseResult<NetworkEvent> parse_network_events(const std::filesystem::path& path, Format format);
ParseResult<CdrEvent> parse_cdr_events(const std::filesystem::path& path, Format format);

/// Stable sort of both streams. Throws std::invalid_argument when the offset
/// is outside [-12h, +14h].
EventDataset build_dataset(std::vector<NetworkEvent> network, std::vector<CdrEvent> cdr,
                           int utc_offset_seconds = 0);

void write_network_csv(std::ostream& out, std::span<const NetworkEvent> events);
void write_cdr_csv(std::ostream& out, std::span<const CdrEvent> events);
void write_rejects_csv(std::ostream& out, std::span<const Reject> rejects);

}  // namespace cdrtime
