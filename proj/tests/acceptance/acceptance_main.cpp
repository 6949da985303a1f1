// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Run through ctest or directly; a criterion number as argv[1]
// restricts the run.

#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "padl/bench.hpp"
#include "padl/scenario.hpp"

using namespace padl;
using nlohmann::json;

namespace {

struct Criterion {
    int number;
    std::string name;
    bool pass = false;
    std::string detail;

    Criterion(int n, std::string label) : number(n), name(std::move(label)) {}
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string scenario_path(const char* name) {
    return std::string(SCENARIO_DIR) + "/" + name;
}

// ---------------------------------------------------------------------------
// 1. fixture replay: the three use-case scripts, exact balances, < 30 s
// ---------------------------------------------------------------------------

Criterion criterion_fixture_replay() {
    Criterion c{1, "fixture-replay"};
    auto start = std::chrono::steady_clock::now();
    std::ostringstream detail;
    bool ok = true;

    for (const char* name : {"bond_market.json", "settlement.json", "simple_exchange.json"}) {
        ScenarioScript script = ScenarioScript::from_file(scenario_path(name));
        auto outcome = run_scenario(script);
        if (!outcome.report.ok) {
            ok = false;
            detail << name << " aborted at step " << outcome.report.aborted_step << " ("
                   << outcome.report.abort_reason << "); ";
            continue;
        }
        // every extracted balance equals the shadow value exactly
        ShadowLedger shadow;
        for (const json& step : script.steps) {
            if (!step.contains("values") && !step.contains("holdings")) continue;
            bool genesis = step.at("op") == "init";
            const json& values = genesis ? step.at("holdings") : step.at("values");
            std::map<std::string, std::map<std::string, int64_t>> by_asset;
            for (const auto& [asset, by_p] : values.items())
                for (const auto& [pid, v] : by_p.items())
                    by_asset[asset][pid] = v.get<int64_t>();
            shadow.apply(outcome.desk->registry(),
                         outcome.desk->make_values(by_asset, genesis));
        }
        for (const auto& asset : outcome.desk->registry().assets) {
            for (const auto& p : outcome.desk->registry().participants) {
                int64_t extracted = outcome.desk->balance_of(p.id, asset.id);
                int64_t expected = shadow.balance(outcome.desk->registry(), p.id, asset.id);
                if (extracted != expected) {
                    ok = false;
                    detail << name << ": " << p.id << "/" << asset.id << " extracted "
                           << extracted << " != shadow " << expected << "; ";
                }
            }
        }
        detail << name << " ok (" << outcome.desk->ledger().row_count() << " rows); ";
    }

    double elapsed = seconds_since(start);
    if (elapsed >= 30.0) {
        ok = false;
        detail << "runtime " << elapsed << "s exceeds 30s";
    } else {
        detail << "runtime " << elapsed << "s";
    }
    c.pass = ok;
    c.detail = detail.str();
    return c;
}

// ---------------------------------------------------------------------------
// 2. tamper battery: every cataloged integrity attack rejected
// ---------------------------------------------------------------------------

Criterion criterion_tamper_battery() {
    Criterion c{2, "tamper-battery"};
    HarnessReport integrity = run_integrity_battery(Bytes32{7}, RangeBackend::Bulletproof);
    HarnessReport anonymity = run_anonymity_mechanics(Bytes32{7}, RangeBackend::Bulletproof);
    size_t total = integrity.cases.size();
    size_t rejected = 0;
    std::ostringstream failing;
    for (const auto& cs : integrity.cases) {
        if (cs.pass)
            rejected++;
        else
            failing << cs.name << "; ";
    }
    bool anon_ok = anonymity.all_pass();
    for (const auto& cs : anonymity.cases)
        if (!cs.pass) failing << "anon:" << cs.name << "; ";
    c.pass = (total >= 30) && (rejected == total) && anon_ok;
    std::ostringstream detail;
    detail << rejected << "/" << total << " attacks rejected, " << anonymity.cases.size()
           << " anonymity mechanics checks";
    if (!c.pass) detail << "; failing: " << failing.str();
    c.detail = detail.str();
    return c;
}

// ---------------------------------------------------------------------------
// 3. audit correctness over randomized ledgers + bond coupon rates
// ---------------------------------------------------------------------------

Criterion criterion_audit_correctness() {
    Criterion c{3, "audit-correctness"};
    std::ostringstream detail;
    bool ok = true;

    // property phase: accept iff the shadow predicate holds, exactly
    int worlds = 0, balance_checks = 0, liquidity_checks = 0, rate_checks = 0;
    Rng driver(Bytes32{40});
    LedgerConfig cfg;
    cfg.extract_max = uint64_t(1) << 14;

    for (int w = 0; w < 100 && ok; w++) {
        Bytes32 seed{};
        store_le64(seed.data(), uint64_t(w) + 1000);
        Desk desk({"p0", "p1", "p2", "mint"}, {{"usd", "mint"}, {"gem", "mint"}}, cfg,
                  Rng(seed));
        ShadowLedger shadow;
        std::map<std::string, std::map<std::string, int64_t>> init = {
            {"usd", {{"p0", int64_t(100 + driver.next_u64() % 900)},
                     {"p1", int64_t(driver.next_u64() % 500)}}},
            {"gem", {{"p2", int64_t(driver.next_u64() % 300)},
                     {"p0", int64_t(driver.next_u64() % 100)}}}};
        desk.init(init);
        shadow.apply(desk.registry(), desk.make_values(init, true));

        int txs = 2 + int(driver.next_u64() % 3);
        for (int t = 0; t < txs; t++) {
            const char* names[3] = {"p0", "p1", "p2"};
            std::string from = names[driver.next_u64() % 3];
            std::string to = names[driver.next_u64() % 3];
            if (from == to) continue;
            std::string asset = driver.next_u64() % 2 ? "usd" : "gem";
            int64_t have = shadow.balance(desk.registry(), from, asset);
            if (have <= 0) continue;
            int64_t amount = int64_t(driver.next_u64() % uint64_t(have)) + 1;
            auto values = std::map<std::string, std::map<std::string, int64_t>>{
                {asset, {{from, -amount}, {to, amount}}}};
            auto res = desk.transfer(from, values);
            if (!res.ok()) {
                ok = false;
                detail << "world " << w << ": honest transfer failed; ";
                break;
            }
            shadow.apply(desk.registry(), desk.make_values(values));
        }
        if (!ok) break;
        worlds++;
        Rng audit_rng = Rng(seed).fork("audits");

        // balance: true claim accepts, perturbations reject
        for (const char* pid : {"p0", "p1", "p2"}) {
            for (const char* asset : {"usd", "gem"}) {
                uint32_t idx = *desk.registry().participant_index(pid);
                int64_t truth = shadow.balance(desk.registry(), pid, asset);
                auto audit = prove_balance(desk.ledger(), idx, asset,
                                           desk.participant(pid).keys().sk, truth, {},
                                           audit_rng);
                bool accepted = verify_balance(desk.ledger(), audit);
                int64_t delta = int64_t(driver.next_u64() % 5) + 1;
                if (driver.next_u64() & 1) delta = -delta;
                auto perturbed = prove_balance(desk.ledger(), idx, asset,
                                               desk.participant(pid).keys().sk, truth + delta,
                                               {}, audit_rng);
                bool perturbed_accepted = verify_balance(desk.ledger(), perturbed);
                balance_checks += 2;
                if (!accepted || perturbed_accepted) {
                    ok = false;
                    detail << "world " << w << " balance audit mismatch for " << pid << "/"
                           << asset << "; ";
                }
            }
        }

        // liquidity: accept iff d*sum_all - n*sum_target in [0, 2^n_bits)
        for (const char* pid : {"p0", "p2"}) {
            std::string target = driver.next_u64() % 2 ? "usd" : "gem";
            uint64_t d = 1 + driver.next_u64() % 8;
            uint64_t n = 1 + driver.next_u64() % 8;
            __int128 sum_all = shadow.balance(desk.registry(), pid, "usd") +
                               shadow.balance(desk.registry(), pid, "gem");
            __int128 sum_target = shadow.balance(desk.registry(), pid, target);
            __int128 v_r = __int128(d) * sum_all - __int128(n) * sum_target;
            bool predicate = v_r >= 0 && (v_r >> cfg.n_bits) == 0;
            bool accepted = false;
            try {
                auto audit =
                    prove_liquidity(desk.ledger(), desk.participant(pid), target, d, n,
                                    audit_rng);
                accepted = verify_liquidity(desk.ledger(), audit);
            } catch (const RangeError&) {
                accepted = false;
            }
            liquidity_checks++;
            if (accepted != predicate) {
                ok = false;
                detail << "world " << w << " liquidity mismatch for " << pid << " (" << d << "/"
                       << n << "); ";
            }
        }

        // rate: accept iff n*s1*sum1 == d*s2*sum2 over random row subsets
        {
            uint32_t idx = uint32_t(driver.next_u64() % 3);
            const char* pid = std::array{"p0", "p1", "p2"}[idx];
            std::string asset = driver.next_u64() % 2 ? "usd" : "gem";
            // only rows that actually carry this asset qualify as subsets
            std::vector<uint64_t> candidates;
            for (uint64_t t = 0; t < desk.ledger().row_count(); t++)
                for (const auto& id : desk.ledger().rows()[t].asset_ids)
                    if (id == asset) candidates.push_back(t);
            if (candidates.size() >= 2) {
                std::vector<uint64_t> txs1 = {candidates[driver.next_u64() % candidates.size()]};
                std::vector<uint64_t> txs2 = {candidates[driver.next_u64() % candidates.size()]};
                auto column_sum = [&](const std::vector<uint64_t>& set) {
                    int64_t sum = 0;
                    for (uint64_t t : set) {
                        const Transaction& tx = desk.ledger().rows()[t];
                        auto slot = tx.slot_of(*desk.registry().participant_index(pid));
                        for (size_t a = 0; a < tx.asset_ids.size(); a++)
                            if (tx.asset_ids[a] == asset && slot) {
                                auto v = desk.participant(pid).extract(tx.cells[a][*slot].cm,
                                                                       tx.cells[a][*slot].tk);
                                sum += v.value_or(0);
                            }
                    }
                    return sum;
                };
                int64_t sum1 = column_sum(txs1);
                int64_t sum2 = column_sum(txs2);
                uint64_t d = 1 + driver.next_u64() % 6;
                uint64_t n = 1 + driver.next_u64() % 6;
                int8_t s1 = driver.next_u64() & 1 ? 1 : -1;
                int8_t s2 = driver.next_u64() & 1 ? 1 : -1;
                bool predicate =
                    __int128(n) * s1 * sum1 == __int128(d) * s2 * sum2;
                auto audit = prove_rate(desk.ledger(),
                                        *desk.registry().participant_index(pid), asset,
                                        desk.participant(pid).keys().sk, txs1, txs2, d, n, s1,
                                        s2, audit_rng);
                bool accepted = verify_rate(desk.ledger(), audit);
                rate_checks++;
                if (accepted != predicate) {
                    ok = false;
                    detail << "world " << w << " rate mismatch (" << int(s1) << "*" << sum1
                           << ")/(" << int(s2) << "*" << sum2 << ") vs " << d << "/" << n
                           << "; ";
                }
            }
        }
    }

    // bond fixture: coupon rate accepts at 1/10, rejects at 1/9 and 1/11
    {
        ScenarioScript script = ScenarioScript::from_file(scenario_path("bond_market.json"));
        auto outcome = run_scenario(script);
        if (!outcome.report.ok) {
            ok = false;
            detail << "bond fixture failed; ";
        } else {
            Desk& desk = *outcome.desk;
            Rng rng(Bytes32{41});
            uint32_t m = *desk.registry().participant_index("investor_m");
            const Scalar& sk = desk.participant("investor_m").keys().sk;
            auto coupon = [&](uint64_t d, uint64_t n) {
                auto audit =
                    prove_rate(desk.ledger(), m, "usd", sk, {4}, {3}, d, n, 1, -1, rng);
                return verify_rate(desk.ledger(), audit);
            };
            if (!coupon(1, 10)) {
                ok = false;
                detail << "coupon 1/10 rejected; ";
            }
            if (coupon(1, 9) || coupon(1, 11)) {
                ok = false;
                detail << "wrong coupon rate accepted; ";
            }
        }
    }

    std::ostringstream summary;
    summary << worlds << " randomized ledgers, " << balance_checks << " balance / "
            << liquidity_checks << " liquidity / " << rate_checks
            << " rate property checks, coupon 1/10 vs 1/9, 1/11. " << detail.str();
    c.pass = ok && worlds >= 100;
    c.detail = summary.str();
    return c;
}

// ---------------------------------------------------------------------------
// 4. extraction: exhaustive small range, randomized wide range, wrong keys
// ---------------------------------------------------------------------------

Criterion criterion_extraction() {
    Criterion c{4, "extraction"};
    std::ostringstream detail;
    bool ok = true;

    CommitKey ck = setup(std::array{Scalar::from_u64(1234)});
    Rng rng(Bytes32{50});
    KeyPair kp = keygen(ck, rng);

    // exhaustive |v| <= 2^14
    {
        Extractor ex(ck, kp.sk, uint64_t(1) << 14);
        int64_t limit = int64_t(1) << 14;
        int failures = 0;
        for (int64_t v = -limit; v <= limit; v++) {
            Scalar r = rng.next_scalar();
            Commitment cm = ck.commit_i64(v, r);
            Token tk = make_token(r, kp.pk);
            auto got = ex.extract(cm, tk);
            if (!got || *got != v) failures++;
        }
        if (failures) {
            ok = false;
            detail << failures << " exhaustive failures; ";
        } else {
            detail << "exhaustive |v| <= 2^14 ok; ";
        }
    }

    // randomized |v| <= 2^20
    {
        Extractor ex(ck, kp.sk, uint64_t(1) << 20);
        int failures = 0;
        for (int i = 0; i < 1000; i++) {
            int64_t v = int64_t(rng.next_u64() % ((uint64_t(1) << 21) + 1)) -
                        (int64_t(1) << 20);
            Scalar r = rng.next_scalar();
            auto got = ex.extract(ck.commit_i64(v, r), make_token(r, kp.pk));
            if (!got || *got != v) failures++;
        }
        if (failures) {
            ok = false;
            detail << failures << " randomized failures; ";
        } else {
            detail << "randomized |v| <= 2^20 ok; ";
        }
    }

    // wrong key fails every time
    {
        Extractor ex(ck, kp.sk, uint64_t(1) << 14);
        int hits = 0;
        for (int i = 0; i < 1000; i++) {
            KeyPair other = keygen(ck, rng);
            int64_t v = int64_t(rng.next_u64() % 1000);
            Scalar r = rng.next_scalar();
            // token under the other key; extraction with kp must miss
            auto got = ex.extract(ck.commit_i64(v, r), make_token(r, other.pk));
            if (got) hits++;
        }
        if (hits) {
            ok = false;
            detail << hits << " wrong-key extractions succeeded; ";
        } else {
            detail << "wrong-key misses 1000/1000";
        }
    }
    c.pass = ok;
    c.detail = detail.str();
    return c;
}

// ---------------------------------------------------------------------------
// 5. scaling shape with the optimized backend
// ---------------------------------------------------------------------------

Criterion criterion_scaling() {
    Criterion c{5, "scaling-shape"};
    std::ostringstream detail;
    bool ok = true;

    uint32_t participants[] = {2, 4, 8, 16};
    uint32_t assets[] = {1, 2, 4, 8};
    BenchReport report = run_bench(participants, assets, 3, RangeBackend::Bulletproof, 4,
                                   Bytes32{60});

    auto total = [](const BenchPoint& p) { return p.draft_ms + p.endorse_ms + p.verify_ms; };
    // points 0..3 vary participants at 1 asset; 4..6 vary assets at 2 participants
    detail << "participants(ms):";
    for (int i = 0; i < 4; i++)
        detail << " " << report.points[i].participants << "->" << int(total(report.points[i]));
    detail << "; assets(ms): 1->" << int(total(report.points[0]));
    for (size_t i = 4; i < report.points.size(); i++)
        detail << " " << report.points[i].assets << "->" << int(total(report.points[i]));

    for (int i = 1; i < 4; i++) {
        double ratio = total(report.points[i]) / std::max(1.0, total(report.points[i - 1]));
        if (ratio > 2.5) {
            ok = false;
            detail << "; participant step " << report.points[i - 1].participants << "->"
                   << report.points[i].participants << " ratio " << ratio << " > 2.5";
        }
    }
    // asset dimension: points[0] is (2 participants, 1 asset)
    std::vector<const BenchPoint*> asset_points = {&report.points[0]};
    for (size_t i = 4; i < report.points.size(); i++) asset_points.push_back(&report.points[i]);
    for (size_t i = 1; i < asset_points.size(); i++) {
        double ratio = total(*asset_points[i]) / std::max(1.0, total(*asset_points[i - 1]));
        if (ratio > 2.5) {
            ok = false;
            detail << "; asset step " << asset_points[i - 1]->assets << "->"
                   << asset_points[i]->assets << " ratio " << ratio << " > 2.5";
        }
    }

    size_t cell = report.points[0].cell_bytes;
    detail << "; cell " << cell << " B (reference 1176 B)";
    if (cell > 2 * 1176) {
        ok = false;
        detail << " exceeds 2x reference";
    }
    detail << "; audit proofs B/R/L = " << report.balance_audit_bytes << "/"
           << report.rate_audit_bytes << "/" << report.liquidity_audit_bytes
           << " bytes (reference 98/98/688)";

    c.pass = ok;
    c.detail = detail.str();
    return c;
}

// ---------------------------------------------------------------------------
// 6. determinism of scenario replays and the state hash chain
// ---------------------------------------------------------------------------

Criterion criterion_determinism() {
    Criterion c{6, "determinism"};
    std::ostringstream detail;
    bool ok = true;

    ScenarioScript script = ScenarioScript::from_file(scenario_path("bond_market.json"));
    auto a = run_scenario(script);
    auto b = run_scenario(script);
    if (!a.report.ok || !b.report.ok) {
        c.detail = "scenario failed";
        return c;
    }
    if (a.report.state_hash != b.report.state_hash) {
        ok = false;
        detail << "state hashes differ across identical runs; ";
    }
    bool rows_equal = a.desk->ledger().row_count() == b.desk->ledger().row_count();
    for (size_t t = 0; rows_equal && t < a.desk->ledger().row_count(); t++)
        rows_equal = a.desk->ledger().rows()[t].to_bytes() == b.desk->ledger().rows()[t].to_bytes();
    if (!rows_equal) {
        ok = false;
        detail << "ledger logs differ; ";
    } else {
        detail << "two seeded runs byte-identical (" << a.desk->ledger().row_count()
               << " rows); ";
    }

    // the saved binary logs are identical too
    auto dir = std::filesystem::temp_directory_path();
    auto p1 = dir / "padl_det_a.bin";
    auto p2 = dir / "padl_det_b.bin";
    a.desk->ledger().save(p1);
    b.desk->ledger().save(p2);
    std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
    std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    if (s1 != s2 || s1.empty()) {
        ok = false;
        detail << "binary logs differ; ";
    }
    std::filesystem::remove(p1);
    std::filesystem::remove(p2);
    std::filesystem::remove(p1.string() + ".idx");
    std::filesystem::remove(p2.string() + ".idx");

    // omitting any single row changes the state hash
    const auto& rows = a.desk->ledger().rows();
    for (size_t skip = 0; skip < rows.size(); skip++) {
        std::vector<Transaction> omitted;
        for (size_t t = 0; t < rows.size(); t++)
            if (t != skip) omitted.push_back(rows[t]);
        if (Ledger::chain_state_hash(omitted) == a.desk->ledger().state_hash()) {
            ok = false;
            detail << "omitting row " << skip << " left the state hash unchanged; ";
        }
    }
    detail << "omission of each of " << rows.size() << " rows changes the chain";
    c.pass = ok;
    c.detail = detail.str();
    return c;
}

// ---------------------------------------------------------------------------
// 7. NIZK property suite
// ---------------------------------------------------------------------------

Criterion criterion_nizk_properties() {
    Criterion c{7, "nizk-properties"};
    std::ostringstream detail;
    bool ok = true;

    CommitKey ck = setup(std::array{Scalar::from_u64(77)});
    Rng rng(Bytes32{70});
    KeyPair kp = keygen(ck, rng);
    const int kIterations = 10000;

    auto ctx = [](uint64_t tag) {
        Transcript t("padl/acceptance/nizk");
        t.absorb_u64("txid", tag);
        return t;
    };

    // completeness, 10^4 random statements per sigma system
    int failures = 0;
    for (int i = 0; i < kIterations; i++) {
        Scalar v = Scalar::from_u64(rng.next_u64() >> 24);
        Scalar r = rng.next_scalar();
        Commitment cm = ck.commit(v, r);
        Token tk = make_token(r, kp.pk);
        auto proof = prove_consistency(ck, cm, tk, kp.pk, v, r, ctx(i), rng);
        if (!verify_consistency(ck, cm, tk, kp.pk, proof, ctx(i))) failures++;
    }
    if (failures) {
        ok = false;
        detail << "consistency completeness failures: " << failures << "; ";
    }

    failures = 0;
    for (int i = 0; i < kIterations; i++) {
        Scalar v = Scalar::from_u64(rng.next_u64() >> 24);
        Scalar r1 = rng.next_scalar(), r2 = rng.next_scalar();
        Commitment cm1 = ck.commit(v, r1), cm2 = ck.commit(v, r2);
        Token tk1 = make_token(r1, kp.pk), tk2 = make_token(r2, kp.pk);
        auto proof = prove_equivalence(ck, cm1, cm2, tk1, tk2, kp.pk, kp.sk, ctx(i), rng);
        if (!verify_equivalence(ck, cm1, cm2, tk1, tk2, kp.pk, proof, ctx(i))) failures++;
    }
    if (failures) {
        ok = false;
        detail << "equivalence completeness failures: " << failures << "; ";
    }

    failures = 0;
    for (int i = 0; i < kIterations; i++) {
        Scalar x = rng.next_scalar();
        GroupElement c1 = ck.g.mul(rng.next_scalar()) + ck.h.mul(rng.next_scalar());
        GroupElement e1 = ck.h.mul(x);
        GroupElement e2 = c1.mul(x);
        auto proof = prove_dlog_equality(ck.h, e1, c1, e2, x, ctx(i), rng);
        if (!verify_dlog_equality(ck.h, e1, c1, e2, proof, ctx(i))) failures++;
    }
    if (failures) {
        ok = false;
        detail << "dlog-equality completeness failures: " << failures << "; ";
    }
    detail << "3x" << kIterations << " completeness ok; ";

    // exhaustive single-field mutation rejection per proof type
    {
        Scalar v = Scalar::from_u64(321), r = rng.next_scalar();
        Commitment cm = ck.commit(v, r);
        Token tk = make_token(r, kp.pk);
        auto base = prove_consistency(ck, cm, tk, kp.pk, v, r, ctx(1), rng);
        int accepted = 0;
        for (int f = 0; f < 4; f++) {
            auto p = base;
            if (f == 0) p.t1 += ck.g;
            if (f == 1) p.t2 += ck.g;
            if (f == 2) p.s1 += Scalar::one();
            if (f == 3) p.s2 += Scalar::one();
            if (verify_consistency(ck, cm, tk, kp.pk, p, ctx(1))) accepted++;
        }
        Scalar r2 = rng.next_scalar();
        Commitment cm2 = ck.commit(v, r2);
        Token tk2 = make_token(r2, kp.pk);
        auto eq = prove_equivalence(ck, cm, cm2, tk, tk2, kp.pk, kp.sk, ctx(2), rng);
        for (int f = 0; f < 2; f++) {
            auto p = eq;
            if (f == 0) p.t += ck.g;
            if (f == 1) p.s += Scalar::one();
            if (verify_equivalence(ck, cm, cm2, tk, tk2, kp.pk, p, ctx(2))) accepted++;
        }
        GroupElement c1 = ck.g.mul(rng.next_scalar()) + ck.h.mul(rng.next_scalar());
        auto dl = prove_dlog_equality(ck.h, kp.pk, c1, c1.mul(kp.sk), kp.sk, ctx(3), rng);
        for (int f = 0; f < 3; f++) {
            auto p = dl;
            if (f == 0) p.t_a += ck.g;
            if (f == 1) p.t_b += ck.g;
            if (f == 2) p.s += Scalar::one();
            if (verify_dlog_equality(ck.h, kp.pk, c1, c1.mul(kp.sk), p, ctx(3))) accepted++;
        }
        // range proofs: every byte position of both backends
        for (RangeBackend kind : {RangeBackend::BitDecomposition, RangeBackend::Bulletproof}) {
            const auto& backend = range_backend(kind);
            Scalar rv = rng.next_scalar();
            auto proof = backend.prove(ck, Scalar::from_u64(12345), rv, 32, ctx(4), rng);
            Commitment rcm = ck.commit(Scalar::from_u64(12345), rv);
            for (size_t pos = 0; pos < proof.payload.size(); pos += 61) {
                auto bad = proof;
                bad.payload[pos] ^= 0x04;
                if (backend.verify(ck, rcm, 32, bad, ctx(4))) accepted++;
            }
        }
        if (accepted) {
            ok = false;
            detail << accepted << " mutated proofs accepted; ";
        } else {
            detail << "field/byte mutations all rejected; ";
        }
    }

    // transcript binding: txid substitution flips acceptance
    {
        Scalar v = Scalar::from_u64(9), r = rng.next_scalar();
        Commitment cm = ck.commit(v, r);
        Token tk = make_token(r, kp.pk);
        auto proof = prove_consistency(ck, cm, tk, kp.pk, v, r, ctx(100), rng);
        bool bound = !verify_consistency(ck, cm, tk, kp.pk, proof, ctx(101)) &&
                     verify_consistency(ck, cm, tk, kp.pk, proof, ctx(100));
        if (!bound) {
            ok = false;
            detail << "txid binding failed; ";
        } else {
            detail << "txid binding holds";
        }
    }

    c.pass = ok;
    c.detail = detail.str();
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    int only = argc > 1 ? std::atoi(argv[1]) : 0;
    std::vector<Criterion (*)()> criteria = {
        criterion_fixture_replay, criterion_tamper_battery, criterion_audit_correctness,
        criterion_extraction,     criterion_scaling,        criterion_determinism,
        criterion_nizk_properties};

    bool all_pass = true;
    for (size_t i = 0; i < criteria.size(); i++) {
        if (only && int(i + 1) != only) continue;
        Criterion c = [&] {
            try {
                return criteria[i]();
            } catch (const std::exception& e) {
                Criterion failed{int(i + 1), "exception"};
                failed.detail = e.what();
                return failed;
            }
        }();
        std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.number << ". " << c.name << ": "
                  << c.detail << "\n"
                  << std::flush;
        all_pass = all_pass && c.pass;
    }
    return all_pass ? 0 : 1;
}
