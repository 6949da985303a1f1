#pragma once

#include "padl/harness.hpp"
#include "padl/host.hpp"

namespace padl {

// Declarative use-case script: init and spend steps (issue / exchange /
// coupon / mature / transfer are all spends), audits, and balance
// expectations. Replaying a script under one seed is byte-deterministic.
struct ScenarioScript {
    std::string name;
    Bytes32 seed{};
    std::vector<std::string> participants;
    std::vector<std::pair<std::string, std::string>> assets;  // id -> issuer
    LedgerConfig config;
    nlohmann::json steps;

    static ScenarioScript from_json(const nlohmann::json& j);
    static ScenarioScript from_file(const std::string& path);
};

struct ScenarioReport {
    std::string name;
    bool ok = true;
    std::vector<nlohmann::json> steps;
    nlohmann::json final_balances;
    std::string state_hash;
    std::string abort_reason;
    int aborted_step = -1;

    nlohmann::json to_json() const;
};

struct ScenarioOutcome {
    ScenarioReport report;
    std::unique_ptr<Desk> desk;  // the final world, for inspection
};

// In-process execution.
ScenarioOutcome run_scenario(const ScenarioScript& script);

// Execution through a ledger host: spends travel via broadcast/append, audits
// via the host's audit endpoints. Participant endorsement services are spun
// up on loopback ports.
ScenarioOutcome run_scenario_remote(const ScenarioScript& script, HostService& host);

}  // namespace padl
