#include "cdrtime/similarity.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "cdrtime/csv.hpp"
#include "cdrtime/random.hpp"

namespace cdrtime {

std::vector<CellProfile> build_profiles(std::span<const ErrorRecord> records,
                                        int utc_offset_seconds, std::optional<Stratum> filter) {
    std::map<std::string, CellProfile> by_cell;
    for (const auto& r : records) {
        if (filter && (r.charging != filter->charging || r.tech != filter->tech)) continue;
        auto& profile = by_cell[r.cell_id];
        const auto bin = static_cast<std::size_t>(assign_bin(r.cdr_timestamp, utc_offset_seconds));
        profile.per_bin[bin].push_back(static_cast<double>(r.error_seconds));
    }
    std::vector<CellProfile> out;
    out.reserve(by_cell.size());
    for (auto& [cell, profile] : by_cell) {
        profile.cell_id = cell;
        for (auto& slot : profile.per_bin) std::sort(slot.begin(), slot.end());
        out.push_back(std::move(profile));
    }
    return out;
}

std::optional<FisherResult> pair_fisher(const CellProfile& a, const CellProfile& b,
                                        std::size_t min_per_bin) {
    if (min_per_bin < 2) {
        throw std::invalid_argument("min_per_bin must be at least 2");
    }
    std::vector<double> p_values;
    for (std::size_t bin = 0; bin < kBinCount; ++bin) {
        const auto& sa = a.per_bin[bin];
        const auto& sb = b.per_bin[bin];
        if (sa.size() < min_per_bin || sb.size() < min_per_bin) continue;
        p_values.push_back(ks_two_sample(sa, sb).p_value);
    }
    if (p_values.empty()) return std::nullopt;
    return fisher_combine(p_values);
}

std::optional<double> pair_index(const CellProfile& a, const CellProfile& b,
                                 std::size_t min_per_bin) {
    const auto fisher = pair_fisher(a, b, min_per_bin);
    if (!fisher) return std::nullopt;
    return fisher->index;
}

SimilarityMatrix::SimilarityMatrix(std::vector<std::string> cells, std::size_t min_per_bin)
    : cells_(std::move(cells)),
      entries_(cells_.size() * cells_.size()),
      min_per_bin_(min_per_bin) {}

std::optional<double> SimilarityMatrix::index(std::size_t i, std::size_t j) const {
    const auto& e = at(i, j);
    if (!e) return std::nullopt;
    return e->index;
}

void SimilarityMatrix::set(std::size_t i, std::size_t j, std::optional<FisherResult> value) {
    entries_[i * cells_.size() + j] = value;
    entries_[j * cells_.size() + i] = value;
}

SimilarityMatrix SimilarityMatrix::permuted(std::span<const std::size_t> order) const {
    if (order.size() != size()) {
        throw std::invalid_argument("permutation size does not match matrix");
    }
    std::vector<std::string> cells;
    cells.reserve(order.size());
    for (auto k : order) cells.push_back(cells_.at(k));
    SimilarityMatrix out(std::move(cells), min_per_bin_);
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (std::size_t j = i; j < order.size(); ++j) out.set(i, j, at(order[i], order[j]));
    }
    return out;
}

std::optional<double> SimilarityMatrix::row_mean(std::size_t i) const {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t j = 0; j < size(); ++j) {
        if (j == i) continue;
        if (const auto v = index(i, j)) {
            sum += *v;
            ++count;
        }
    }
    if (count == 0) return std::nullopt;
    return sum / static_cast<double>(count);
}

bool SimilarityMatrix::operator==(const SimilarityMatrix& other) const {
    return cells_ == other.cells_ && entries_ == other.entries_ &&
           min_per_bin_ == other.min_per_bin_;
}

SimilarityMatrix build_matrix(std::span<const CellProfile> profiles, std::size_t min_per_bin,
                              unsigned threads) {
    if (profiles.size() < 2) {
        throw std::domain_error("similarity matrix needs at least 2 cells, got " +
                                std::to_string(profiles.size()));
    }
    if (min_per_bin < 2) {
        throw std::invalid_argument("min_per_bin must be at least 2");
    }
    std::vector<std::string> cells;
    for (const auto& p : profiles) cells.push_back(p.cell_id);
    SimilarityMatrix matrix(std::move(cells), min_per_bin);

    const std::size_t n = profiles.size();
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(n * (n + 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) pairs.emplace_back(i, j);
    }
    std::vector<std::optional<FisherResult>> results(pairs.size());

    // Each worker writes disjoint slots; assembly below is sequential.
    std::atomic<std::size_t> cursor{0};
    const auto work = [&] {
        for (std::size_t k = cursor++; k < pairs.size(); k = cursor++) {
            const auto [i, j] = pairs[k];
            results[k] = pair_fisher(profiles[i], profiles[j], min_per_bin);
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, pairs.size()));
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
    }

    for (std::size_t k = 0; k < pairs.size(); ++k) {
        matrix.set(pairs[k].first, pairs[k].second, results[k]);
    }
    return matrix;
}

std::vector<std::size_t> order_by_row_sum(const SimilarityMatrix& matrix) {
    std::vector<std::optional<double>> means(matrix.size());
    for (std::size_t i = 0; i < matrix.size(); ++i) means[i] = matrix.row_mean(i);

    std::vector<std::size_t> order(matrix.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ma = means[a];
        const auto& mb = means[b];
        if (ma.has_value() != mb.has_value()) return ma.has_value();
        if (ma && *ma != *mb) return *ma < *mb;
        return matrix.cells()[a] < matrix.cells()[b];
    });
    return order;
}

GroupSplit split_at_largest_gap(const SimilarityMatrix& ordered) {
    std::vector<double> means;
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        const auto m = ordered.row_mean(i);
        if (!m) break;
        means.push_back(*m);
    }
    GroupSplit split;
    for (std::size_t i = 1; i < means.size(); ++i) {
        const double gap = means[i] - means[i - 1];
        if (gap > split.gap) {
            split.gap = gap;
            split.first_group_size = i;
        }
    }
    return split;
}

std::vector<CellProfile> sample_profiles(std::vector<CellProfile> profiles, std::size_t max_cells,
                                         std::uint64_t seed) {
    if (profiles.size() <= max_cells) return profiles;
    Rng rng(seed);
    std::vector<std::size_t> idx(profiles.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    // Partial Fisher-Yates: the first max_cells slots become the sample.
    for (std::size_t i = 0; i < max_cells; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(idx.size() - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(max_cells);
    std::sort(idx.begin(), idx.end());
    std::vector<CellProfile> out;
    out.reserve(max_cells);
    for (auto i : idx) out.push_back(std::move(profiles[i]));
    return out;
}

void write_matrix_csv(std::ostream& out, const SimilarityMatrix& matrix, MatrixValue value) {
    std::vector<std::string> row{""};
    for (const auto& c : matrix.cells()) row.push_back(c);
    out << csv::join(row) << '\n';
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        out << csv::quote(matrix.cells()[i]);
        for (std::size_t j = 0; j < matrix.size(); ++j) {
            out << ',';
            const auto& e = matrix.at(i, j);
            if (!e) continue;
            switch (value) {
                case MatrixValue::Index: out << csv::format_double(e->index); break;
                case MatrixValue::Chi2: out << csv::format_double(e->chi2); break;
                case MatrixValue::CombinedP: out << csv::format_double(e->combined_p); break;
            }
        }
        out << '\n';
    }
}

namespace {

// Linear-interpolated percentile of a sorted sample, q in [0, 1].
double percentile(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::string xml_escape(std::string_view text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

}  // namespace

void write_heatmap_svg(std::ostream& out, const SimilarityMatrix& matrix) {
    constexpr int kCell = 10;
    const auto n = static_cast<int>(matrix.size());

    std::vector<double> defined;
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        for (std::size_t j = 0; j < matrix.size(); ++j) {
            if (const auto v = matrix.index(i, j)) defined.push_back(*v);
        }
    }
    std::sort(defined.begin(), defined.end());
    const double lo = defined.empty() ? 0.0 : percentile(defined, 0.05);
    const double hi = defined.empty() ? 1.0 : percentile(defined, 0.95);

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << n * kCell << "\" height=\""
        << n * kCell << "\" viewBox=\"0 0 " << n * kCell << ' ' << n * kCell << "\">\n";
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const auto v = matrix.index(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            int r = 255, g = 255, b = 255;
            if (v) {
                const double t = hi > lo ? std::clamp((*v - lo) / (hi - lo), 0.0, 1.0) : 0.5;
                r = static_cast<int>(std::lround(255.0 * t));
                g = 0;
                b = 255 - r;
            }
            out << "<rect x=\"" << j * kCell << "\" y=\"" << i * kCell << "\" width=\"" << kCell
                << "\" height=\"" << kCell << "\" fill=\"rgb(" << r << ',' << g << ',' << b
                << ")\"><title>" << xml_escape(matrix.cells()[static_cast<std::size_t>(i)]) << " / "
                << xml_escape(matrix.cells()[static_cast<std::size_t>(j)]) << "</title></rect>\n";
        }
    }
    out << "</svg>\n";
}

}  // namespace cdrtime
