#pragma once

#include "padl/desk.hpp"

#include <json.hpp>

namespace padl {

struct BenchPoint {
    uint32_t participants = 0;
    uint32_t assets = 0;
    double draft_ms = 0;    // sender-side commit + consistency proving
    double endorse_ms = 0;  // full endorsement round (asset proofs)
    double verify_ms = 0;   // verification of the endorsed transaction
    size_t tx_bytes = 0;
    size_t cell_bytes = 0;  // endorsed cell, wire size
};

struct BenchReport {
    RangeBackend backend;
    uint32_t repetitions = 0;
    uint32_t workload_txs = 0;
    std::vector<BenchPoint> points;
    size_t balance_audit_bytes = 0;
    size_t rate_audit_bytes = 0;
    size_t liquidity_audit_bytes = 0;

    nlohmann::json to_json() const;
    std::string to_csv() const;
};

// Fixed multi-transaction workload per grid point; medians over repetitions.
BenchReport run_bench(std::span<const uint32_t> participant_grid,
                      std::span<const uint32_t> asset_grid, uint32_t repetitions,
                      RangeBackend backend, uint32_t workload_txs = 4,
                      const Bytes32& seed = Bytes32{});

}  // namespace padl
