#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cdrtime/pipeline.hpp"
#include "cdrtime/synth.hpp"

using namespace cdrtime;
namespace fs = std::filesystem;

namespace {

const fs::path kData = CDRTIME_TEST_DATA;

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("cdrtime_pipeline_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// Smaller copy of the default scenario so the unit suite stays quick.
fs::path write_small_scenario(const fs::path& dir) {
    auto config = default_scenario(42);
    config.subscribers = 200;
    config.days = 3;
    const auto path = dir / "scenario.json";
    std::ofstream(path) << config_to_json(config).dump(2);
    return path;
}

int run_quiet(const RunConfig& config, std::string* log = nullptr) {
    std::ostringstream out;
    const int code = run(config, out);
    if (log) *log = out.str();
    return code;
}

const char* kArtifacts[] = {"errors.csv",          "match_report.json",      "rejects_network.csv",
                            "rejects_cdr.csv",     "bin_stats.csv",          "fit_params.json",
                            "similarity_matrix.csv", "similarity_chi2.csv",  "similarity_combined_p.csv",
                            "similarity_order.json", "similarity_heatmap.svg"};

}  // namespace

TEST_CASE("match on the two-cell fixture writes errors 94 and 2792", "[pipeline]") {
    const auto dir = scratch("two_cell");
    RunConfig config;
    config.command = Subcommand::Match;
    config.network = kData / "two_cell_network.csv";
    config.cdr = kData / "two_cell_cdr.csv";
    config.out = dir;
    REQUIRE(run_quiet(config) == kExitOk);
    CHECK(slurp(dir / "errors.csv") ==
          "cdr_timestamp,error_seconds,cell_id,tech,charging,subscriber_id\n"
          "69499,94,A1,2G,Prepaid,S1\n"
          "72198,2792,A2,4G,Postpaid,S1\n");
    CHECK(slurp(dir / "rejects_cdr.csv") == "line,reason\n");
    const auto report = nlohmann::json::parse(slurp(dir / "match_report.json"));
    CHECK(report.at("matched_count") == 2);
}

TEST_CASE("all on empty event files fails with a diagnostic", "[pipeline]") {
    const auto dir = scratch("empty");
    std::ofstream(dir / "net.csv") << "timestamp,subscriber_id,cell_id,tech\n";
    std::ofstream(dir / "cdr.csv") << "timestamp,subscriber_id,cell_id,tech,charging\n";
    RunConfig config;
    config.network = dir / "net.csv";
    config.cdr = dir / "cdr.csv";
    config.out = dir / "out";
    std::string log;
    CHECK(run_quiet(config, &log) == kExitProcessing);
    CHECK(log.find("no error records") != std::string::npos);
}

TEST_CASE("Usage and input errors map to exit codes", "[pipeline]") {
    const auto dir = scratch("usage");
    RunConfig config;
    config.command = Subcommand::Match;
    config.network = dir / "missing.csv";
    config.cdr = kData / "two_cell_cdr.csv";
    config.out = dir;
    CHECK(run_quiet(config) == kExitUsage);

    config.network.clear();
    CHECK(run_quiet(config) == kExitUsage);

    config.network = kData / "two_cell_network.csv";
    config.min_per_bin = 1;
    CHECK(run_quiet(config) == kExitUsage);

    config.min_per_bin = 50;
    config.utc_offset_seconds = 60000;
    CHECK(run_quiet(config) == kExitUsage);

    config.utc_offset_seconds = 0;
    config.command = Subcommand::Similarity;
    config.pooled = true;
    config.tech = Tech::G3;
    CHECK(run_quiet(config) == kExitUsage);

    // Wrong header is a processing error, not a usage error.
    std::ofstream(dir / "bad.csv") << "when,who\n1,2\n";
    RunConfig bad;
    bad.command = Subcommand::Match;
    bad.network = dir / "bad.csv";
    bad.cdr = kData / "two_cell_cdr.csv";
    bad.out = dir;
    std::string log;
    CHECK(run_quiet(bad, &log) == kExitProcessing);
    CHECK(log.rfind("error: ", 0) == 0);
}

TEST_CASE("Similarity on too few cells is a processing error", "[pipeline]") {
    const auto dir = scratch("fewcells");
    RunConfig config;
    config.command = Subcommand::Match;
    config.network = kData / "two_cell_network.csv";
    config.cdr = kData / "two_cell_cdr.csv";
    config.out = dir;
    REQUIRE(run_quiet(config) == kExitOk);

    config.command = Subcommand::Fit;
    std::string log;
    REQUIRE(run_quiet(config, &log) == kExitOk);
    CHECK(log.find("skipping") != std::string::npos);
    CHECK(nlohmann::json::parse(slurp(dir / "fit_params.json")).empty());

    config.command = Subcommand::Similarity;
    CHECK(run_quiet(config) == kExitProcessing);
}

TEST_CASE("all equals the four subcommands in sequence and is deterministic", "[pipeline]") {
    const auto dir = scratch("chain");
    RunConfig synth;
    synth.command = Subcommand::Synth;
    synth.synth_config = write_small_scenario(dir);
    synth.out = dir / "trace";
    REQUIRE(run_quiet(synth) == kExitOk);

    RunConfig all;
    all.network = dir / "trace" / "network.csv";
    all.cdr = dir / "trace" / "cdr.csv";
    all.heatmap = true;
    all.out = dir / "all1";
    REQUIRE(run_quiet(all) == kExitOk);
    all.out = dir / "all2";
    all.threads = 1;
    REQUIRE(run_quiet(all) == kExitOk);

    RunConfig step = all;
    step.out = dir / "steps";
    for (auto command : {Subcommand::Match, Subcommand::Stats, Subcommand::Fit, Subcommand::Similarity}) {
        step.command = command;
        REQUIRE(run_quiet(step) == kExitOk);
    }

    for (const char* name : kArtifacts) {
        INFO(name);
        const auto reference = slurp(dir / "all1" / name);
        CHECK_FALSE(reference.empty());
        CHECK(reference == slurp(dir / "all2" / name));
        CHECK(reference == slurp(dir / "steps" / name));
    }

    const auto order = nlohmann::json::parse(slurp(dir / "all1" / "similarity_order.json"));
    CHECK(order.at("stratum").at("tech") == "4G");
    CHECK(order.at("cells").size() == 20);
    CHECK(order.at("experimental_split").at("first_group_size").get<int>() > 0);

    const auto fits = nlohmann::json::parse(slurp(dir / "all1" / "fit_params.json"));
    REQUIRE_FALSE(fits.empty());
    for (const char* key : {"charging", "tech", "bin", "mu", "sigma", "tau", "loglik", "n"}) {
        CHECK(fits[0].contains(key));
    }
    fs::remove_all(dir);
}

TEST_CASE("Stratum selection and subsampling", "[pipeline]") {
    const auto dir = scratch("strata");
    RunConfig synth;
    synth.command = Subcommand::Synth;
    synth.synth_config = write_small_scenario(dir);
    synth.out = dir;
    REQUIRE(run_quiet(synth) == kExitOk);

    RunConfig config;
    config.command = Subcommand::Match;
    config.network = dir / "network.csv";
    config.cdr = dir / "cdr.csv";
    config.out = dir;
    REQUIRE(run_quiet(config) == kExitOk);

    config.command = Subcommand::Similarity;
    config.pooled = true;
    config.max_cells = 5;
    REQUIRE(run_quiet(config) == kExitOk);
    auto order = nlohmann::json::parse(slurp(dir / "similarity_order.json"));
    CHECK(order.at("stratum") == "pooled");
    CHECK(order.at("cells").size() == 5);

    // No 3G traffic in the scenario: fewer than two cells.
    config.pooled = false;
    config.max_cells = 0;
    config.tech = Tech::G3;
    CHECK(run_quiet(config) == kExitProcessing);
    fs::remove_all(dir);
}
