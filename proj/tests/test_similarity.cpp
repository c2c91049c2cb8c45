#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <sstream>

#include "cdrtime/random.hpp"
#include "cdrtime/similarity.hpp"
#include "cdrtime/synth.hpp"

using namespace cdrtime;
using Catch::Matchers::WithinAbs;

namespace {

CellProfile planted(const std::string& id, const ExGaussianParams& law, std::size_t per_bin,
                    Rng& rng, std::size_t bins = kBinCount) {
    CellProfile p{id, {}};
    for (std::size_t b = 0; b < bins; ++b) {
        for (std::size_t i = 0; i < per_bin; ++i) p.per_bin[b].push_back(sample_exgaussian(law, rng));
        std::sort(p.per_bin[b].begin(), p.per_bin[b].end());
    }
    return p;
}

FisherResult fr(double index) { return {index, 2, 0.5, index}; }

SimilarityMatrix from_means(const std::vector<std::string>& cells,
                            const std::vector<std::vector<std::optional<double>>>& m) {
    SimilarityMatrix out(cells, 50);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        for (std::size_t j = i; j < cells.size(); ++j) {
            out.set(i, j, m[i][j] ? std::optional(fr(*m[i][j])) : std::nullopt);
        }
    }
    return out;
}

}  // namespace

TEST_CASE("Profiles split samples by bin and honor the stratum filter", "[similarity]") {
    const Seconds ten_am = 10 * 3600;
    const std::vector<ErrorRecord> records{
        {ten_am, 5, "B", Tech::G4, Charging::Postpaid, "S1"},
        {ten_am + 60, 3, "B", Tech::G4, Charging::Postpaid, "S1"},
        {ten_am, 9, "A", Tech::G3, Charging::Postpaid, "S1"},
        {ten_am, 7, "A", Tech::G4, Charging::Prepaid, "S2"},
    };
    const auto all = build_profiles(records, 0);
    REQUIRE(all.size() == 2);
    CHECK(all[0].cell_id == "A");
    CHECK(all[1].cell_id == "B");
    CHECK(all[1].per_bin[2] == std::vector<double>{3, 5});
    for (std::size_t b = 0; b < kBinCount; ++b) {
        if (b != 2) CHECK(all[1].per_bin[b].empty());
    }

    const auto filtered = build_profiles(records, 0, Stratum{Charging::Postpaid, Tech::G4});
    REQUIRE(filtered.size() == 1);
    CHECK(filtered[0].cell_id == "B");

    CHECK(build_profiles(std::vector<ErrorRecord>{}, 0).empty());
}

TEST_CASE("Pair index basics", "[similarity]") {
    Rng rng(1);
    const auto a = planted("A", {300, 60, 100}, 80, rng, 3);
    const auto self = pair_fisher(a, a, 50);
    REQUIRE(self);
    CHECK(self->dof == 6);
    CHECK_THAT(self->index, WithinAbs(0.0, 1e-9));
    CHECK_THAT(*pair_index(a, a, 50), WithinAbs(0.0, 1e-9));

    const CellProfile empty{"E", {}};
    CHECK_FALSE(pair_index(empty, empty, 50));
    CHECK_FALSE(pair_index(a, empty, 50));
    // Threshold above the available counts leaves no valid bin.
    CHECK_FALSE(pair_index(a, a, 81));
    CHECK_THROWS_AS(pair_index(a, a, 1), std::invalid_argument);
}

TEST_CASE("Same-law pairs score below tau-x3 pairs in at least 99 of 100 trials",
          "[similarity]") {
    const ExGaussianParams base{300, 60, 100};
    const ExGaussianParams wide{300, 60, 300};
    int wins = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(1000 + seed);
        const auto a = planted("a", base, 500, rng);
        const auto b = planted("b", base, 500, rng);
        const auto c = planted("c", base, 500, rng);
        const auto d = planted("d", wide, 500, rng);
        if (*pair_index(a, b, 50) < *pair_index(c, d, 50)) ++wins;
    }
    CHECK(wins >= 99);
}

TEST_CASE("Matrix marks data-poor cells as missing", "[similarity]") {
    Rng rng(2);
    const std::vector<CellProfile> profiles{planted("A", {300, 60, 100}, 60, rng),
                                            planted("B", {300, 60, 100}, 60, rng),
                                            planted("C", {300, 60, 100}, 10, rng)};
    const auto m = build_matrix(profiles, 50, 1);
    REQUIRE(m.size() == 3);
    CHECK(m.at(0, 1));
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK_FALSE(m.at(2, j));
        CHECK_FALSE(m.at(j, 2));
    }
    const auto order = order_by_row_sum(m);
    CHECK(order.back() == 2);

    CHECK_THROWS_AS(build_matrix(std::vector<CellProfile>{profiles[0]}, 50), std::domain_error);
}

TEST_CASE("Two identical cells give an off-diagonal near zero", "[similarity]") {
    Rng rng(3);
    const auto a = planted("A", {300, 60, 100}, 100, rng);
    auto b = a;
    b.cell_id = "B";
    const auto m = build_matrix(std::vector<CellProfile>{a, b}, 50);
    REQUIRE(m.index(0, 1));
    CHECK_THAT(*m.index(0, 1), WithinAbs(0.0, 1e-9));
    CHECK(m.at(0, 1) == m.at(1, 0));
}

TEST_CASE("Property: threaded build matches a sequential pairwise loop exactly", "[similarity][property]") {
    Rng rng(4);
    std::vector<CellProfile> profiles;
    for (int c = 0; c < 100; ++c) {
        const double tau = c % 2 ? 100.0 : 250.0;
        char id[8];
        std::snprintf(id, sizeof id, "C%03d", c);
        profiles.push_back(planted(id, {300, 60, tau}, 40 + rng.below(40), rng));
    }
    const auto threaded = build_matrix(profiles, 50, 4);
    const auto single = build_matrix(profiles, 50, 1);
    CHECK(threaded == single);
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        for (std::size_t j = 0; j < profiles.size(); ++j) {
            REQUIRE(threaded.at(i, j) == pair_fisher(profiles[i], profiles[j], 50));
            REQUIRE(threaded.at(i, j) == threaded.at(j, i));
        }
    }
}

TEST_CASE("Property: diagonal is the row minimum on complete matrices", "[similarity][property]") {
    Rng rng(5);
    std::vector<CellProfile> profiles;
    for (int c = 0; c < 12; ++c) {
        profiles.push_back(planted("C" + std::to_string(c), {300, 60, 100.0 + 30.0 * c}, 80, rng));
    }
    const auto m = build_matrix(profiles, 50, 2);
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = 0; j < m.size(); ++j) {
            REQUIRE(m.index(j, i));
            REQUIRE(*m.index(i, i) <= *m.index(i, j) + 1e-6);
        }
    }

    // Complete matrix: row-mean order equals row-sum order.
    const auto order = order_by_row_sum(m);
    std::vector<std::pair<double, std::size_t>> sums;
    for (std::size_t i = 0; i < m.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m.size(); ++j) {
            if (j != i) s += *m.index(i, j);
        }
        sums.emplace_back(s, i);
    }
    std::sort(sums.begin(), sums.end());
    for (std::size_t k = 0; k < order.size(); ++k) CHECK(order[k] == sums[k].second);
}

TEST_CASE("Ordering by row mean with ties and missing rows", "[similarity]") {
    using O = std::optional<double>;
    // Row means (off-diagonal): C1 0.2, C2 0.9, C3 0.8.
    const auto m = from_means({"C1", "C2", "C3"}, {{O(0.0), O(0.3), O(0.1)},
                                                   {O(0.3), O(0.0), O(1.5)},
                                                   {O(0.1), O(1.5), O(0.0)}});
    CHECK_THAT(*m.row_mean(0), WithinAbs(0.2, 1e-12));
    CHECK(order_by_row_sum(m) == std::vector<std::size_t>{0, 2, 1});

    const auto tied = from_means({"b", "a", "z"}, {{O(0.0), O(1.0), O()},
                                                   {O(1.0), O(0.0), O()},
                                                   {O(), O(), O()}});
    CHECK(order_by_row_sum(tied) == std::vector<std::size_t>{1, 0, 2});
    CHECK_FALSE(tied.row_mean(2));

    const auto p = m.permuted(std::vector<std::size_t>{0, 2, 1});
    CHECK(p.cells() == std::vector<std::string>{"C1", "C3", "C2"});
    CHECK(p.at(1, 2) == m.at(2, 1));
    CHECK(p.at(0, 1) == m.at(0, 2));
}

TEST_CASE("Largest-gap split of an ordered matrix", "[similarity]") {
    using O = std::optional<double>;
    const auto m = from_means({"A", "B", "C", "D"}, {{O(0), O(0.1), O(2.0), O(2.0)},
                                                     {O(0.1), O(0), O(2.0), O(2.0)},
                                                     {O(2.0), O(2.0), O(0), O(3.0)},
                                                     {O(2.0), O(2.0), O(3.0), O(0)}});
    const auto ordered = m.permuted(order_by_row_sum(m));
    const auto split = split_at_largest_gap(ordered);
    CHECK(split.first_group_size == 2);
    CHECK(split.gap > 0.0);
}

TEST_CASE("Seeded subsample keeps cell order and is reproducible", "[similarity]") {
    std::vector<CellProfile> profiles;
    for (int c = 0; c < 30; ++c) profiles.push_back({"C" + std::to_string(100 + c), {}});
    const auto a = sample_profiles(profiles, 10, 7);
    const auto b = sample_profiles(profiles, 10, 7);
    REQUIRE(a.size() == 10);
    std::vector<std::string> ids_a;
    std::vector<std::string> ids_b;
    for (const auto& p : a) ids_a.push_back(p.cell_id);
    for (const auto& p : b) ids_b.push_back(p.cell_id);
    CHECK(ids_a == ids_b);
    CHECK(std::is_sorted(ids_a.begin(), ids_a.end()));
    CHECK(std::set<std::string>(ids_a.begin(), ids_a.end()).size() == 10);
    CHECK(sample_profiles(profiles, 100, 7).size() == 30);
}

TEST_CASE("Matrix CSV and heatmap output", "[similarity]") {
    using O = std::optional<double>;
    const auto m = from_means({"A", "B,x"}, {{O(0.0), O()}, {O(), O(0.25)}});
    std::ostringstream csv;
    write_matrix_csv(csv, m);
    CHECK(csv.str() == ",A,\"B,x\"\nA,0,\n\"B,x\",,0.25\n");

    std::ostringstream svg;
    write_heatmap_svg(svg, m);
    const auto s = svg.str();
    CHECK(s.find("<svg") != std::string::npos);
    CHECK(std::count(s.begin(), s.end(), '\n') == 6);
    CHECK(s.find("width=\"20\"") != std::string::npos);
    CHECK(s.find("rgb(255,255,255)") != std::string::npos);
    CHECK(s.find("rgb(0,0,255)") != std::string::npos);
    CHECK(s.find("rgb(255,0,0)") != std::string::npos);
}
