#pragma once

#include <compare>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "cdrtime/events.hpp"
#include "cdrtime/matching.hpp"

namespace cdrtime {

struct GroupKey {
    Charging charging = Charging::Prepaid;
    Tech tech = Tech::G2;
    int bin = 0;

    auto operator<=>(const GroupKey&) const = default;
};

struct BinStats {
    GroupKey key;
    std::size_t count = 0;
    double mean = 0.0;
    std::optional<double> std;  // sample (n-1) deviation; absent for count < 2
};

/// One entry per non-empty (charging, tech, bin) group, ordered by key.
std::vector<BinStats> compute_bin_stats(std::span<const ErrorRecord> records,
                                        int utc_offset_seconds);

/// Error samples per (charging, tech, bin), ordered by key. Shared by the
/// descriptive statistics and the per-group exGaussian fits.
std::vector<std::pair<GroupKey, std::vector<double>>> group_errors(
    std::span<const ErrorRecord> records, int utc_offset_seconds);

/// CSV `charging,tech,bin_start,bin_end,count,mean,std`; std is empty when
/// undefined.
void write_bin_stats_csv(std::ostream& out, std::span<const BinStats> stats);

}  // namespace cdrtime
