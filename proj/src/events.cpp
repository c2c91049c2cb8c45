#include "cdrtime/events.hpp"

namespace cdrtime {

std::string_view to_string(Tech tech) {
    switch (tech) {
        case Tech::G2: return "2G";
        case Tech::G3: return "3G";
        case Tech::G4: return "4G";
    }
    return "?";
}

std::string_view to_string(Charging charging) {
    switch (charging) {
        case Charging::Prepaid: return "Prepaid";
        case Charging::Postpaid: return "Postpaid";
    }
    return "?";
}

std::optional<Tech> parse_tech(std::string_view text) {
    if (text == "2G") return Tech::G2;
    if (text == "3G") return Tech::G3;
    if (text == "4G") return Tech::G4;
    return std::nullopt;
}

std::optional<Charging> parse_charging(std::string_view text) {
    if (text == "Prepaid") return Charging::Prepaid;
    if (text == "Postpaid") return Charging::Postpaid;
    return std::nullopt;
}

}  // namespace cdrtime
