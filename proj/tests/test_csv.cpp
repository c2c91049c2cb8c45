#include <catch2/catch_amalgamated.hpp>

#include "cdrtime/csv.hpp"

using namespace cdrtime;

TEST_CASE("csv::split handles plain and quoted fields", "[csv]") {
    auto f = csv::split("69405,S1,A1,2G");
    REQUIRE(f);
    CHECK(*f == std::vector<std::string>{"69405", "S1", "A1", "2G"});

    f = csv::split(R"(1,"a,b","say ""hi""",)");
    REQUIRE(f);
    CHECK(*f == std::vector<std::string>{"1", "a,b", "say \"hi\"", ""});

    CHECK_FALSE(csv::split("1,\"open"));
}

TEST_CASE("csv::quote round-trips through split", "[csv]") {
    const std::vector<std::string> fields{"plain", "with,comma", "q\"uote", ""};
    const auto back = csv::split(csv::join(fields));
    REQUIRE(back);
    CHECK(*back == fields);
}

TEST_CASE("csv::format_double is shortest round-trip", "[csv]") {
    CHECK(csv::format_double(97.0) == "97");
    CHECK(csv::format_double(0.1) == "0.1");
    const double x = 4.242640687119285;
    CHECK(std::stod(csv::format_double(x)) == x);
}
