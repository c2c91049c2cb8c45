#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cdrtime {

/// Epoch seconds. One-second resolution throughout.
using Seconds = std::int64_t;

enum class Tech : std::uint8_t { G2, G3, G4 };
enum class Charging : std::uint8_t { Prepaid, Postpaid };

std::string_view to_string(Tech tech);
std::string_view to_string(Charging charging);
std::optional<Tech> parse_tech(std::string_view text);
std::optional<Charging> parse_charging(std::string_view text);

/// Ground-truth session event observed at the core network.
struct NetworkEvent {
    Seconds timestamp = 0;
    std::string subscriber_id;
    std::string cell_id;
    Tech tech = Tech::G2;

    bool operator==(const NetworkEvent&) const = default;
};

/// Post-mediation charging record.
struct CdrEvent {
    Seconds timestamp = 0;
    std::string subscriber_id;
    std::string cell_id;
    Tech tech = Tech::G2;
    Charging charging = Charging::Prepaid;

    bool operator==(const CdrEvent&) const = default;
};

/// Thrown when an input file does not carry the expected schema at all.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cdrtime
