#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "cdrtime/ingest.hpp"
#include "cdrtime/matching.hpp"
#include "cdrtime/random.hpp"
#include "oracles.hpp"

using namespace cdrtime;

namespace {

EventDataset random_dataset(Rng& rng, std::size_t subscribers, std::size_t cells,
                            std::size_t net_count, std::size_t cdr_count) {
    std::vector<NetworkEvent> net;
    std::vector<CdrEvent> cdr;
    const auto sub = [&] { return "S" + std::to_string(rng.below(subscribers)); };
    const auto cell = [&] { return "C" + std::to_string(rng.below(cells)); };
    for (std::size_t i = 0; i < net_count; ++i) {
        net.push_back({static_cast<Seconds>(rng.below(5000)), sub(), cell(),
                       static_cast<Tech>(rng.below(3))});
    }
    for (std::size_t i = 0; i < cdr_count; ++i) {
        cdr.push_back({static_cast<Seconds>(rng.below(5000)), sub(), cell(),
                       static_cast<Tech>(rng.below(3)), static_cast<Charging>(rng.below(2))});
    }
    return build_dataset(std::move(net), std::move(cdr), 0);
}

}  // namespace

TEST_CASE("Two-cell trace: errors are 94 s and 2792 s", "[matching]") {
    auto ds = build_dataset({{69405, "S1", "A1", Tech::G2}, {69406, "S1", "A2", Tech::G4}},
                            {{69499, "S1", "A1", Tech::G2, Charging::Prepaid},
                             {72198, "S1", "A2", Tech::G4, Charging::Postpaid}},
                            0);
    const auto result = match_backward(ds);
    REQUIRE(result.records.size() == 2);
    CHECK(result.records[0] ==
          ErrorRecord{69499, 94, "A1", Tech::G2, Charging::Prepaid, "S1"});
    CHECK(result.records[1] ==
          ErrorRecord{72198, 2792, "A2", Tech::G4, Charging::Postpaid, "S1"});
    CHECK(result.report.matched_count == 2);
    CHECK(result.report.unmatched_count == 0);
    CHECK(result.report.per_cell_counts == std::map<std::string, std::size_t>{{"A1", 1}, {"A2", 1}});
}

TEST_CASE("Only past events of the same subscriber and cell qualify", "[matching]") {
    auto ds = build_dataset(
        {
            {100, "S1", "A", Tech::G3},
            {150, "S1", "A", Tech::G3},
            {200, "S1", "A", Tech::G3},  // after the CDR
            {190, "S2", "A", Tech::G3},  // other subscriber
            {195, "S1", "B", Tech::G3},  // other cell
        },
        {
            {180, "S1", "A", Tech::G3, Charging::Postpaid},
            {200, "S1", "A", Tech::G3, Charging::Postpaid},  // simultaneous event: error 0
            {50, "S1", "A", Tech::G3, Charging::Postpaid},   // nothing earlier
            {500, "S9", "A", Tech::G3, Charging::Postpaid},  // unknown subscriber
        },
        0);
    const auto result = match_backward(ds);
    REQUIRE(result.records.size() == 2);
    CHECK(result.records[0].cdr_timestamp == 180);
    CHECK(result.records[0].error_seconds == 30);
    CHECK(result.records[1].cdr_timestamp == 200);
    CHECK(result.records[1].error_seconds == 0);
    CHECK(result.report.unmatched_count == 2);
}

TEST_CASE("CDR tech is kept even when the network event differs", "[matching]") {
    auto ds = build_dataset({{10, "S1", "A", Tech::G2}},
                            {{20, "S1", "A", Tech::G4, Charging::Prepaid}}, 0);
    const auto result = match_backward(ds);
    REQUIRE(result.records.size() == 1);
    CHECK(result.records[0].tech == Tech::G4);
}

TEST_CASE("Empty inputs match nothing", "[matching]") {
    CHECK(match_backward(build_dataset({}, {}, 0)).records.empty());
    const auto only_cdr =
        match_backward(build_dataset({}, {{1, "S", "A", Tech::G2, Charging::Prepaid}}, 0));
    CHECK(only_cdr.records.empty());
    CHECK(only_cdr.report.unmatched_count == 1);
}

TEST_CASE("Unsorted dataset is rejected", "[matching]") {
    EventDataset ds;
    ds.network = {{20, "S1", "A", Tech::G2}, {10, "S1", "A", Tech::G2}};
    CHECK_THROWS_AS(match_backward(ds), std::invalid_argument);
}

TEST_CASE("Property: agrees with brute force on random traces", "[matching][property]") {
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const auto ds = random_dataset(rng, 1 + rng.below(5), 1 + rng.below(4), rng.below(60),
                                       rng.below(60));
        std::size_t unmatched = 0;
        const auto expected = oracle::brute_force_match(ds.network, ds.cdr, &unmatched);
        const auto got = match_backward(ds);
        REQUIRE(got.records == expected);
        REQUIRE(got.report.unmatched_count == unmatched);
        REQUIRE(got.report.matched_count + got.report.unmatched_count == ds.cdr.size());
    }
}

TEST_CASE("Property: errors are non-negative and input order does not matter",
          "[matching][property]") {
    Rng rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        auto ds = random_dataset(rng, 3, 3, 80, 80);
        const auto base = match_backward(ds);
        for (const auto& r : base.records) REQUIRE(r.error_seconds >= 0);

        auto net = ds.network;
        auto cdr = ds.cdr;
        std::reverse(net.begin(), net.end());
        std::reverse(cdr.begin(), cdr.end());
        const auto shuffled = match_backward(build_dataset(net, cdr, 0));
        REQUIRE(shuffled.report == base.report);
        // Equal (subscriber, time) CDRs may swap; compare as multisets.
        auto a = base.records;
        auto b = shuffled.records;
        const auto key = [](const ErrorRecord& r) {
            return std::tie(r.subscriber_id, r.cdr_timestamp, r.cell_id, r.error_seconds, r.tech,
                            r.charging);
        };
        const auto less = [&](const ErrorRecord& x, const ErrorRecord& y) { return key(x) < key(y); };
        std::sort(a.begin(), a.end(), less);
        std::sort(b.begin(), b.end(), less);
        REQUIRE(a == b);
    }
}

TEST_CASE("Errors CSV round-trips", "[matching]") {
    const std::vector<ErrorRecord> records{
        {69499, 94, "A1", Tech::G2, Charging::Prepaid, "S1"},
        {72198, 2792, "A,2", Tech::G4, Charging::Postpaid, "S1"},
    };
    std::ostringstream out;
    write_errors_csv(out, records);
    CHECK(out.str().rfind("cdr_timestamp,error_seconds,cell_id,tech,charging,subscriber_id\n", 0) == 0);
    std::istringstream in(out.str());
    CHECK(read_errors_csv(in) == records);

    std::istringstream bad("cdr_timestamp,error_seconds,cell_id,tech,charging,subscriber_id\n1,x,A,2G,Prepaid,S\n");
    CHECK_THROWS(read_errors_csv(bad));
}

TEST_CASE("Match report JSON has the documented keys", "[matching]") {
    MatchReport report{2, 1, {{"A1", 1}, {"A2", 1}}};
    std::ostringstream out;
    write_match_report_json(out, report);
    const auto j = nlohmann::json::parse(out.str());
    CHECK(j.at("matched_count") == 2);
    CHECK(j.at("unmatched_count") == 1);
    CHECK(j.at("per_cell_counts").at("A2") == 1);
}
