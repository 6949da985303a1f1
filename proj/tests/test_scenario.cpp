#include <doctest.h>

#include "padl/scenario.hpp"

using namespace padl;

namespace {
std::string scenario_path(const char* name) {
    return std::string(SCENARIO_DIR) + "/" + name;
}
}  // namespace

TEST_CASE("bond market fixture replays end to end") {
    auto script = ScenarioScript::from_file(scenario_path("bond_market.json"));
    auto outcome = run_scenario(script);
    for (const auto& step : outcome.report.steps) {
        CAPTURE(step.dump());
        CHECK(step.at("ok").get<bool>());
    }
    REQUIRE(outcome.report.ok);
    // seven rows: genesis + tx1..tx6
    CHECK(outcome.desk->ledger().row_count() == 7);
    CHECK(outcome.report.final_balances.at("usd").at("custodian").get<int64_t>() == -1000);
    CHECK(outcome.report.final_balances.at("usd").at("investor_m").get<int64_t>() == 2199);
}

TEST_CASE("settlement fixture replays in reduced-cell mode") {
    auto script = ScenarioScript::from_file(scenario_path("settlement.json"));
    auto outcome = run_scenario(script);
    for (const auto& step : outcome.report.steps) {
        CAPTURE(step.dump());
        CHECK(step.at("ok").get<bool>());
    }
    REQUIRE(outcome.report.ok);
    CHECK(outcome.desk->ledger().row_count() == 3);
    // reduced cells carry exactly the five-field structure
    for (const auto& tx : outcome.desk->ledger().rows())
        for (const auto& row : tx.cells)
            for (const auto& cell : row) {
                CHECK(!cell.endorsed());
                CHECK(cell.issuer.has_value());
            }
}

TEST_CASE("simple exchange fixture swaps balances") {
    auto script = ScenarioScript::from_file(scenario_path("simple_exchange.json"));
    auto outcome = run_scenario(script);
    REQUIRE(outcome.report.ok);
    CHECK(outcome.report.final_balances.at("gem").at("bob").get<int64_t>() == 100);
    CHECK(outcome.report.final_balances.at("usd").at("alice").get<int64_t>() == 1000);
}

TEST_CASE("scenario determinism: same seed, identical ledger bytes") {
    auto script = ScenarioScript::from_file(scenario_path("simple_exchange.json"));
    auto a = run_scenario(script);
    auto b = run_scenario(script);
    REQUIRE(a.report.ok);
    REQUIRE(b.report.ok);
    CHECK(a.report.state_hash == b.report.state_hash);
    REQUIRE(a.desk->ledger().row_count() == b.desk->ledger().row_count());
    for (size_t t = 0; t < a.desk->ledger().row_count(); t++)
        CHECK(a.desk->ledger().rows()[t].to_bytes() == b.desk->ledger().rows()[t].to_bytes());

    // a different seed changes the bytes
    auto script2 = script;
    script2.seed[0] ^= 1;
    auto c = run_scenario(script2);
    REQUIRE(c.report.ok);
    CHECK(c.report.state_hash != a.report.state_hash);
}

TEST_CASE("scenario abort reports the failing step") {
    auto script = ScenarioScript::from_file(scenario_path("simple_exchange.json"));
    // tamper with the expected balances
    for (auto& step : script.steps)
        if (step.at("op") == "expect_balances") step["balances"]["usd"]["alice"] = 999;
    auto outcome = run_scenario(script);
    CHECK(!outcome.report.ok);
    CHECK(outcome.report.aborted_step >= 0);
    CHECK(outcome.report.to_json().contains("abort_reason"));
}
