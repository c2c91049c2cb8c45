#include "cdrtime/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <variant>

#include <json.hpp>

#include "cdrtime/csv.hpp"

namespace cdrtime {
namespace {

constexpr std::string_view kNetworkHeader = "timestamp,subscriber_id,cell_id,tech";
constexpr std::string_view kCdrHeader = "timestamp,subscriber_id,cell_id,tech,charging";

// Row-level outcome: either an event or the reason it was rejected.
template <typename Event>
using RowResult = std::variant<Event, std::string>;

// Integer seconds, optionally followed by a fractional part that is dropped.
RowResult<Seconds> parse_timestamp(std::string_view text) {
    if (text.empty()) return std::string("missing timestamp");
    if (text.front() == '-') return std::string("negative timestamp");
    const auto dot = text.find('.');
    const std::string_view whole = text.substr(0, dot);
    if (dot != std::string_view::npos) {
        const auto frac = text.substr(dot + 1);
        if (!std::all_of(frac.begin(), frac.end(), [](char c) { return c >= '0' && c <= '9'; })) {
            return std::string("invalid timestamp");
        }
    }
    Seconds value = 0;
    auto [ptr, ec] = std::from_chars(whole.data(), whole.data() + whole.size(), value);
    if (whole.empty() || ec != std::errc{} || ptr != whole.data() + whole.size()) {
        return std::string("invalid timestamp");
    }
    return value;
}

RowResult<Seconds> timestamp_from_json(const nlohmann::json& value) {
    if (value.is_number_integer()) {
        if (value.is_number_unsigned()) {
            const auto u = value.get<std::uint64_t>();
            if (u > static_cast<std::uint64_t>(std::numeric_limits<Seconds>::max())) {
                return std::string("invalid timestamp");
            }
            return static_cast<Seconds>(u);
        }
        const auto v = value.get<std::int64_t>();
        if (v < 0) return std::string("negative timestamp");
        return v;
    }
    if (value.is_number_float()) {
        const double d = value.get<double>();
        if (!std::isfinite(d)) return std::string("invalid timestamp");
        if (d < 0) return std::string("negative timestamp");
        if (d >= 9.2e18) return std::string("invalid timestamp");
        return static_cast<Seconds>(d);
    }
    return std::string("invalid timestamp");
}

// Shared field validation for both event kinds.
struct CommonFields {
    Seconds timestamp;
    std::string subscriber_id;
    std::string cell_id;
    Tech tech;
};

RowResult<CommonFields> validate_common(RowResult<Seconds> ts, std::string subscriber,
                                        std::string cell, std::string_view tech_text) {
    if (auto* reason = std::get_if<std::string>(&ts)) return *reason;
    if (subscriber.empty()) return std::string("empty subscriber_id");
    if (cell.empty()) return std::string("empty cell_id");
    if (tech_text.empty()) return std::string("missing tech");
    const auto tech = parse_tech(tech_text);
    if (!tech) return std::string("unknown tech");
    return CommonFields{std::get<Seconds>(ts), std::move(subscriber), std::move(cell), *tech};
}

RowResult<NetworkEvent> network_from_fields(std::vector<std::string>& f) {
    if (f.size() != 4) {
        return "expected 4 fields, got " + std::to_string(f.size());
    }
    auto common = validate_common(parse_timestamp(f[0]), std::move(f[1]), std::move(f[2]), f[3]);
    if (auto* reason = std::get_if<std::string>(&common)) return *reason;
    auto& c = std::get<CommonFields>(common);
    return NetworkEvent{c.timestamp, std::move(c.subscriber_id), std::move(c.cell_id), c.tech};
}

RowResult<CdrEvent> cdr_from_fields(std::vector<std::string>& f) {
    if (f.size() == 4) return std::string("missing charging");
    if (f.size() != 5) {
        return "expected 5 fields, got " + std::to_string(f.size());
    }
    auto common = validate_common(parse_timestamp(f[0]), std::move(f[1]), std::move(f[2]), f[3]);
    if (auto* reason = std::get_if<std::string>(&common)) return *reason;
    if (f[4].empty()) return std::string("missing charging");
    const auto charging = parse_charging(f[4]);
    if (!charging) return std::string("unknown charging");
    auto& c = std::get<CommonFields>(common);
    return CdrEvent{c.timestamp, std::move(c.subscriber_id), std::move(c.cell_id), c.tech, *charging};
}

// A missing or null member reads as empty so validation reports it as missing.
struct JsonField {
    std::string value;
    bool wrong_type = false;
};

JsonField json_string(const nlohmann::json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return {};
    if (!it->is_string()) return {{}, true};
    return {it->get<std::string>()};
}

template <typename Event>
RowResult<Event> from_json_line(std::string_view line) {
    constexpr bool kIsCdr = std::is_same_v<Event, CdrEvent>;
    const auto obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) return std::string("malformed JSON");

    const auto ts_it = obj.find("timestamp");
    RowResult<Seconds> ts = ts_it == obj.end() ? RowResult<Seconds>(std::string("missing timestamp"))
                                               : timestamp_from_json(*ts_it);

    std::vector<const char*> keys = {"subscriber_id", "cell_id", "tech"};
    if constexpr (kIsCdr) keys.push_back("charging");
    std::vector<std::string> text;
    for (const char* key : keys) {
        auto field = json_string(obj, key);
        if (field.wrong_type) return std::string("invalid ") + key;
        text.push_back(std::move(field.value));
    }

    auto common = validate_common(std::move(ts), std::move(text[0]), std::move(text[1]), text[2]);
    if (auto* reason = std::get_if<std::string>(&common)) return *reason;
    auto& c = std::get<CommonFields>(common);
    if constexpr (kIsCdr) {
        if (text[3].empty()) return std::string("missing charging");
        const auto charging = parse_charging(text[3]);
        if (!charging) return std::string("unknown charging");
        return CdrEvent{c.timestamp, std::move(c.subscriber_id), std::move(c.cell_id), c.tech,
                        *charging};
    } else {
        return NetworkEvent{c.timestamp, std::move(c.subscriber_id), std::move(c.cell_id), c.tech};
    }
}

bool is_blank(std::string_view line) {
    return std::all_of(line.begin(), line.end(),
                       [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

template <typename Event>
ParseResult<Event> parse_stream(std::istream& in, Format format) {
    constexpr bool kIsCdr = std::is_same_v<Event, CdrEvent>;
    const std::string_view expected_header = kIsCdr ? kCdrHeader : kNetworkHeader;

    ParseResult<Event> result;
    std::string raw;
    std::size_t line_no = 0;
    bool header_seen = format == Format::Ndjson;

    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = csv::chomp(raw);
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
        if (is_blank(line)) continue;

        if (!header_seen) {
            if (line != expected_header) {
                throw SchemaError("line " + std::to_string(line_no) + ": expected header '" +
                                  std::string(expected_header) + "', got '" + std::string(line) +
                                  "'");
            }
            header_seen = true;
            continue;
        }

        ++result.data_rows;
        RowResult<Event> row = std::string("malformed row");
        if (format == Format::Ndjson) {
            row = from_json_line<Event>(line);
        } else if (auto fields = csv::split(line)) {
            if constexpr (kIsCdr) {
                row = cdr_from_fields(*fields);
            } else {
                row = network_from_fields(*fields);
            }
        } else {
            row = std::string("unterminated quoted field");
        }

        if (auto* event = std::get_if<Event>(&row)) {
            result.events.push_back(std::move(*event));
        } else {
            result.rejects.push_back({line_no, std::get<std::string>(row)});
        }
    }
    return result;
}

template <typename Event>
ParseResult<Event> parse_file(const std::filesystem::path& path, Format format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return parse_stream<Event>(in, format);
}

}  // namespace

Format format_from_path(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".ndjson" || ext == ".jsonl" || ext == ".json") return Format::Ndjson;
    return Format::Csv;
}

ParseResult<NetworkEvent> parse_network_events(std::istream& in, Format format) {
    return parse_stream<NetworkEvent>(in, format);
}

ParseResult<CdrEvent> parse_cdr_events(std::istream& in, Format format) {
    return parse_stream<CdrEvent>(in, format);
}

ParseResult<NetworkEvent> parse_network_events(const std::filesystem::path& path, Format format) {
    return parse_file<NetworkEvent>(path, format);
}

ParseResult<CdrEvent> parse_cdr_events(const std::filesystem::path& path, Format format) {
    return parse_file<CdrEvent>(path, format);
}

EventDataset build_dataset(std::vector<NetworkEvent> network, std::vector<CdrEvent> cdr,
                           int utc_offset_seconds) {
    if (utc_offset_seconds < kMinUtcOffset || utc_offset_seconds > kMaxUtcOffset) {
        throw std::invalid_argument("utc offset " + std::to_string(utc_offset_seconds) +
                                    " outside [-43200, 50400]");
    }
    const auto by_key = [](const auto& a, const auto& b) {
        if (a.subscriber_id != b.subscriber_id) return a.subscriber_id < b.subscriber_id;
        return a.timestamp < b.timestamp;
    };
    std::stable_sort(network.begin(), network.end(), by_key);
    std::stable_sort(cdr.begin(), cdr.end(), by_key);
    return EventDataset{std::move(network), std::move(cdr), utc_offset_seconds};
}

void write_network_csv(std::ostream& out, std::span<const NetworkEvent> events) {
    out << kNetworkHeader << '\n';
    for (const auto& e : events) {
        out << e.timestamp << ',' << csv::quote(e.subscriber_id) << ',' << csv::quote(e.cell_id)
            << ',' << to_string(e.tech) << '\n';
    }
}

void write_cdr_csv(std::ostream& out, std::span<const CdrEvent> events) {
    out << kCdrHeader << '\n';
    for (const auto& e : events) {
        out << e.timestamp << ',' << csv::quote(e.subscriber_id) << ',' << csv::quote(e.cell_id)
            << ',' << to_string(e.tech) << ',' << to_string(e.charging) << '\n';
    }
}

void write_rejects_csv(std::ostream& out, std::span<const Reject> rejects) {
    out << "line,reason\n";
    for (const auto& r : rejects) {
        out << r.line << ',' << csv::quote(r.reason) << '\n';
    }
}

}  // namespace cdrtime
