#include "padl/bench.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

#include "padl/audit.hpp"

using nlohmann::json;

namespace padl {

namespace {

double ms_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    size_t n = xs.size();
    return n % 2 ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2.0;
}

// one grid point: n participants trading one workload of txs across assets
BenchPoint measure_point(uint32_t n_participants, uint32_t n_assets, uint32_t reps,
                         RangeBackend backend, uint32_t workload_txs, const Bytes32& seed) {
    BenchPoint point;
    point.participants = n_participants;
    point.assets = n_assets;

    std::vector<double> draft_times, endorse_times, verify_times;
    for (uint32_t rep = 0; rep < reps; rep++) {
        LedgerConfig cfg;
        cfg.backend = backend;
        cfg.extract_max = uint64_t(1) << 14;
        std::vector<std::string> ids;
        for (uint32_t p = 0; p < n_participants; p++) ids.push_back("p" + std::to_string(p));
        std::vector<std::pair<std::string, std::string>> assets;
        for (uint32_t a = 0; a < n_assets; a++)
            assets.emplace_back("asset" + std::to_string(a), ids[0]);
        Bytes32 rep_seed = seed;
        rep_seed[0] ^= uint8_t(rep);
        rep_seed[1] ^= uint8_t(n_participants);
        rep_seed[2] ^= uint8_t(n_assets);
        Desk desk(ids, assets, cfg, Rng(rep_seed));

        std::map<std::string, std::map<std::string, int64_t>> initial;
        for (uint32_t a = 0; a < n_assets; a++)
            for (uint32_t p = 0; p < n_participants; p++)
                initial["asset" + std::to_string(a)][ids[p]] = 10000;
        desk.init(initial);

        double draft_total = 0, endorse_total = 0, verify_total = 0;
        for (uint32_t t = 0; t < workload_txs; t++) {
            // rotate value around the ring in every asset
            std::map<std::string, std::map<std::string, int64_t>> values;
            for (uint32_t a = 0; a < n_assets; a++) {
                auto& row = values["asset" + std::to_string(a)];
                uint32_t from = t % n_participants;
                uint32_t to = (t + 1) % n_participants;
                row[ids[from]] = -int64_t(10 + a);
                row[ids[to]] = int64_t(10 + a);
            }
            ValueList vl = desk.make_values(values);
            uint32_t sender = t % n_participants;

            auto t0 = std::chrono::steady_clock::now();
            SpendDraft draft = build_draft(desk.ck(), desk.registry(), desk.config(), vl,
                                           desk.ledger().row_count(), false, desk.rng());
            draft_total += ms_since(t0);
            desk.participant(ids[sender]).mark_initiated(draft.pre_tx.txid);

            auto t1 = std::chrono::steady_clock::now();
            auto endorsers = desk.endorsers();
            auto result = collect_endorsements(draft, desk.ledger(), endorsers);
            endorse_total += ms_since(t1);
            if (!std::holds_alternative<Transaction>(result))
                throw Error("bench: endorsement refused");
            Transaction tx = std::get<Transaction>(result);

            auto t2 = std::chrono::steady_clock::now();
            auto report = verify_transaction(desk.ck(), desk.registry(), desk.config(), tx,
                                             desk.ledger());
            verify_total += ms_since(t2);
            if (!report.ok) throw Error("bench: verification failed");

            if (!desk.append(tx).accepted) throw Error("bench: append failed");
            if (rep == 0 && t == 0) {
                point.tx_bytes = tx.to_bytes().size();
                // wire size of one endorsed cell: single-cell probe minus the
                // fixed transaction header
                Transaction probe;
                probe.asset_ids = {"a"};
                probe.participants = {0};
                probe.cells = {{tx.cells[0][0]}};
                size_t header = 32 + 1 + 8 + 2 + 2 + (2 + 1) + 4;
                point.cell_bytes = probe.to_bytes().size() - header;
            }
        }
        draft_times.push_back(draft_total);
        endorse_times.push_back(endorse_total);
        verify_times.push_back(verify_total);
    }
    point.draft_ms = median(draft_times);
    point.endorse_ms = median(endorse_times);
    point.verify_ms = median(verify_times);
    return point;
}

}  // namespace

BenchReport run_bench(std::span<const uint32_t> participant_grid,
                      std::span<const uint32_t> asset_grid, uint32_t repetitions,
                      RangeBackend backend, uint32_t workload_txs, const Bytes32& seed) {
    BenchReport report;
    report.backend = backend;
    report.repetitions = repetitions;
    report.workload_txs = workload_txs;

    // varied participants at the smallest asset count, then varied assets at
    // the smallest participant count
    uint32_t base_assets = asset_grid.empty() ? 1 : asset_grid.front();
    uint32_t base_participants = participant_grid.empty() ? 2 : participant_grid.front();
    for (uint32_t p : participant_grid)
        report.points.push_back(
            measure_point(p, base_assets, repetitions, backend, workload_txs, seed));
    for (uint32_t a : asset_grid) {
        if (a == base_assets) continue;  // already measured
        report.points.push_back(
            measure_point(base_participants, a, repetitions, backend, workload_txs, seed));
    }

    // audit proof sizes from a small sample world
    {
        LedgerConfig cfg;
        cfg.backend = backend;
        cfg.extract_max = uint64_t(1) << 14;
        Desk desk({"x", "y"}, {{"usd", "x"}}, cfg, Rng(seed));
        desk.init({{"usd", {{"x", 1000}, {"y", 1000}}}});
        if (!desk.transfer("x", {{"usd", {{"x", -10}, {"y", 10}}}}).ok())
            throw Error("bench: sample transfer failed");
        Rng rng = Rng(seed).fork("audit-sizes");
        auto balance = prove_balance(desk.ledger(), 1, "usd", desk.participant("y").keys().sk,
                                     1010, {}, rng);
        report.balance_audit_bytes = balance.proof.to_bytes().size();
        auto rate = prove_rate(desk.ledger(), 1, "usd", desk.participant("y").keys().sk, {1},
                               {1}, 1, 1, 1, 1, rng);
        report.rate_audit_bytes = rate.proof.to_bytes().size();
        auto liq =
            prove_liquidity(desk.ledger(), desk.participant("y"), "usd", 2, 1, rng);
        report.liquidity_audit_bytes = 32 + liq.proof.to_bytes().size();
    }
    return report;
}

json BenchReport::to_json() const {
    json pts = json::array();
    for (const auto& p : points)
        pts.push_back({{"participants", p.participants},
                       {"assets", p.assets},
                       {"draft_ms", p.draft_ms},
                       {"endorse_ms", p.endorse_ms},
                       {"verify_ms", p.verify_ms},
                       {"total_ms", p.draft_ms + p.endorse_ms + p.verify_ms},
                       {"tx_bytes", p.tx_bytes},
                       {"cell_bytes", p.cell_bytes}});
    return {{"backend", backend == RangeBackend::Bulletproof ? "bulletproof" : "bits"},
            {"repetitions", repetitions},
            {"workload_txs", workload_txs},
            {"points", pts},
            {"audit_proof_bytes",
             {{"balance", balance_audit_bytes},
              {"rate", rate_audit_bytes},
              {"liquidity", liquidity_audit_bytes}}},
            {"reference",
             {{"cell_bytes", 1176},
              {"exchange_tx_seconds", 0.34},
              {"balance_proof_bytes", 98},
              {"rate_proof_bytes", 98},
              {"liquidity_proof_bytes", 688}}}};
}

std::string BenchReport::to_csv() const {
    std::ostringstream out;
    out << "participants,assets,draft_ms,endorse_ms,verify_ms,total_ms,tx_bytes,cell_bytes\n";
    for (const auto& p : points)
        out << p.participants << ',' << p.assets << ',' << p.draft_ms << ',' << p.endorse_ms
            << ',' << p.verify_ms << ',' << (p.draft_ms + p.endorse_ms + p.verify_ms) << ','
            << p.tx_bytes << ',' << p.cell_bytes << "\n";
    return out.str();
}

}  // namespace padl
