#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cdrtime/events.hpp"
#include "cdrtime/hypothesis.hpp"
#include "cdrtime/matching.hpp"
#include "cdrtime/time_bins.hpp"

namespace cdrtime {

inline constexpr std::size_t kDefaultMinPerBin = 50;

/// Error samples of one cell split by time-of-day bin, each slot sorted.
struct CellProfile {
    std::string cell_id;
    std::array<std::vector<double>, kBinCount> per_bin;
};

/// Restricts profiles to one (charging, tech) stratum.
struct Stratum {
    Charging charging = Charging::Postpaid;
    Tech tech = Tech::G4;
};

/// One profile per distinct cell surviving the filter, ordered by cell_id.
std::vector<CellProfile> build_profiles(std::span<const ErrorRecord> records,
                                        int utc_offset_seconds,
                                        std::optional<Stratum> filter = std::nullopt);

/// Fisher combination of the per-bin KS p-values over bins where both cells
/// hold at least min_per_bin samples. nullopt when no bin qualifies.
/// Throws std::invalid_argument when min_per_bin < 2.
std::optional<FisherResult> pair_fisher(const CellProfile& a, const CellProfile& b,
                                        std::size_t min_per_bin);

/// The correlation index of a cell pair: pair_fisher(...)->index.
std::optional<double> pair_index(const CellProfile& a, const CellProfile& b,
                                 std::size_t min_per_bin);

/// Symmetric cell-by-cell matrix of Fisher results. Missing entries mark pairs
/// without a single bin holding enough events on both sides.
class SimilarityMatrix {
public:
    SimilarityMatrix() = default;
    SimilarityMatrix(std::vector<std::string> cells, std::size_t min_per_bin);

    std::size_t size() const { return cells_.size(); }
    const std::vector<std::string>& cells() const { return cells_; }
    std::size_t min_per_bin() const { return min_per_bin_; }

    const std::optional<FisherResult>& at(std::size_t i, std::size_t j) const {
        return entries_[i * cells_.size() + j];
    }
    std::optional<double> index(std::size_t i, std::size_t j) const;

    /// Sets both (i, j) and (j, i).
    void set(std::size_t i, std::size_t j, std::optional<FisherResult> value);

    /// Same matrix with rows and columns permuted: new row k is old row order[k].
    SimilarityMatrix permuted(std::span<const std::size_t> order) const;

    /// Mean of the defined off-diagonal indices of row i.
    std::optional<double> row_mean(std::size_t i) const;

    bool operator==(const SimilarityMatrix& other) const;

private:
    std::vector<std::string> cells_;
    std::vector<std::optional<FisherResult>> entries_;
    std::size_t min_per_bin_ = kDefaultMinPerBin;
};

/// Evaluates every pair (including the diagonal). Work is spread over
/// `threads` workers (0 = hardware concurrency); the result does not depend on
/// the thread count. Throws std::domain_error for fewer than two profiles.
SimilarityMatrix build_matrix(std::span<const CellProfile> profiles,
                              std::size_t min_per_bin = kDefaultMinPerBin,
                              unsigned threads = 0);

/// Seriation order: cells ascending by row_mean(); cells without any defined
/// off-diagonal entry go last; ties broken by cell_id.
std::vector<std::size_t> order_by_row_sum(const SimilarityMatrix& matrix);

/// Experimental two-group split of an already ordered matrix at the largest
/// gap between consecutive defined row means. first_group_size counts rows
/// from the top; zero when fewer than two rows have a defined mean.
struct GroupSplit {
    std::size_t first_group_size = 0;
    double gap = 0.0;
};
GroupSplit split_at_largest_gap(const SimilarityMatrix& ordered);

/// Seeded subsample of at most max_cells profiles, keeping cell_id order.
std::vector<CellProfile> sample_profiles(std::vector<CellProfile> profiles, std::size_t max_cells,
                                         std::uint64_t seed);

/// Matrix CSV: corner cell empty, then cell ids across the first row and down
/// the first column; missing entries are empty fields. `value` selects which
/// Fisher quantity to print (index, chi2 or combined_p).
enum class MatrixValue { Index, Chi2, CombinedP };
void write_matrix_csv(std::ostream& out, const SimilarityMatrix& matrix,
                      MatrixValue value = MatrixValue::Index);

/// Heatmap with 10 px cells, blue (low) to red (high) over the 5th-95th
/// percentile of defined indices, white for missing entries.
void write_heatmap_svg(std::ostream& out, const SimilarityMatrix& matrix);

}  // namespace cdrtime
