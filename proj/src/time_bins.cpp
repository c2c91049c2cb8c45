#include "cdrtime/time_bins.hpp"

namespace cdrtime {

Seconds local_time_of_day(Seconds timestamp, int utc_offset_seconds) {
    constexpr Seconds kDay = 86400;
    const Seconds r = (timestamp + utc_offset_seconds) % kDay;
    return r < 0 ? r + kDay : r;
}

int assign_bin(Seconds timestamp, int utc_offset_seconds) {
    const auto hour = static_cast<int>(local_time_of_day(timestamp, utc_offset_seconds) / 3600);
    for (const auto& bin : kTimeBins) {
        if (hour < bin.end_hour) return bin.index;
    }
    return kTimeBins.back().index;  // unreachable: hour < 24
}

}  // namespace cdrtime
