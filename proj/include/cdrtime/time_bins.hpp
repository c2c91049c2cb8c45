#pragma once

#include <array>
#include <cstddef>

#include "cdrtime/events.hpp"

namespace cdrtime {

/// Right-open time-of-day interval [start_hour, end_hour).
struct TimeBin {
    int index;
    int start_hour;
    int end_hour;
};

inline constexpr std::size_t kBinCount = 7;

inline constexpr std::array<TimeBin, kBinCount> kTimeBins{{
    {0, 0, 7},
    {1, 7, 9},
    {2, 9, 12},
    {3, 12, 14},
    {4, 14, 17},
    {5, 17, 19},
    {6, 19, 24},
}};

/// Seconds since local midnight, always in [0, 86400).
Seconds local_time_of_day(Seconds timestamp, int utc_offset_seconds);

/// Index into kTimeBins of the bin holding the local time of day.
int assign_bin(Seconds timestamp, int utc_offset_seconds);

}  // namespace cdrtime
