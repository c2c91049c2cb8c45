#include "cdrtime/stats.hpp"

#include <cmath>
#include <map>
#include <ostream>

#include "cdrtime/csv.hpp"
#include "cdrtime/time_bins.hpp"

namespace cdrtime {

std::vector<std::pair<GroupKey, std::vector<double>>> group_errors(
    std::span<const ErrorRecord> records, int utc_offset_seconds) {
    std::map<GroupKey, std::vector<double>> groups;
    for (const auto& r : records) {
        const GroupKey key{r.charging, r.tech, assign_bin(r.cdr_timestamp, utc_offset_seconds)};
        groups[key].push_back(static_cast<double>(r.error_seconds));
    }
    return {std::make_move_iterator(groups.begin()), std::make_move_iterator(groups.end())};
}

std::vector<BinStats> compute_bin_stats(std::span<const ErrorRecord> records,
                                        int utc_offset_seconds) {
    std::vector<BinStats> out;
    for (const auto& [key, sample] : group_errors(records, utc_offset_seconds)) {
        // Welford update.
        double mean = 0.0;
        double m2 = 0.0;
        std::size_t n = 0;
        for (double x : sample) {
            ++n;
            const double delta = x - mean;
            mean += delta / static_cast<double>(n);
            m2 += delta * (x - mean);
        }
        BinStats s{key, n, mean, std::nullopt};
        if (n >= 2) s.std = std::sqrt(m2 / static_cast<double>(n - 1));
        out.push_back(s);
    }
    return out;
}

void write_bin_stats_csv(std::ostream& out, std::span<const BinStats> stats) {
    out << "charging,tech,bin_start,bin_end,count,mean,std\n";
    for (const auto& s : stats) {
        const auto& bin = kTimeBins[static_cast<std::size_t>(s.key.bin)];
        out << to_string(s.key.charging) << ',' << to_string(s.key.tech) << ',' << bin.start_hour
            << ',' << bin.end_hour << ',' << s.count << ',' << csv::format_double(s.mean) << ','
            << (s.std ? csv::format_double(*s.std) : std::string()) << '\n';
    }
}

}  // namespace cdrtime
