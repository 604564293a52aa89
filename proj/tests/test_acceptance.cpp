// Acceptance suite runner: executes every criterion at its pinned tolerance
// and prints one pass/fail line each.

#include <catch2/catch_amalgamated.hpp>

#include <icausal/accept.hpp>

TEST_CASE("acceptance suite", "[acceptance]") {
    const auto results = icausal::accept::run_all();
    const bool all = icausal::accept::print_results(results);
    REQUIRE(results.size() == 12);
    for (const auto& r : results) {
        INFO(r.name << ": " << r.detail);
        CHECK(r.passed);
    }
    REQUIRE(all);
}
