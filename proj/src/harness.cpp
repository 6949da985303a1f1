#include "padl/harness.hpp"

#include <sstream>

using nlohmann::json;

namespace padl {

void ShadowLedger::apply(const Registry& reg, const ValueList& values) {
    for (size_t a = 0; a < values.asset_ids.size(); a++)
        for (size_t p = 0; p < values.amounts[a].size(); p++)
            balances_[{uint32_t(p), values.asset_ids[a]}] += values.amounts[a][p];
    (void)reg;
}

int64_t ShadowLedger::balance(uint32_t participant, const std::string& asset_id) const {
    auto it = balances_.find({participant, asset_id});
    return it == balances_.end() ? 0 : it->second;
}

int64_t ShadowLedger::balance(const Registry& reg, const std::string& participant_id,
                              const std::string& asset_id) const {
    auto idx = reg.participant_index(participant_id);
    if (!idx) throw InvalidInput("shadow: unknown participant");
    return balance(*idx, asset_id);
}

OracleWorld::OracleWorld(std::vector<std::pair<std::string, std::string>> assets_with_issuers,
                         LedgerConfig cfg, Rng rng)
    : assets_(std::move(assets_with_issuers)), cfg_(std::move(cfg)), rng_(rng) {
    // the commit key is part of the public parameters, fixed before any
    // account registers
    Scalar contribution[1] = {rng_.fork("setup").next_scalar()};
    ck_ = setup(contribution);
}

GroupElement OracleWorld::add_account(const std::string& id) {
    if (desk_) throw InvalidInput("oracle: accounts are fixed once the ledger starts");
    Rng party = rng_.fork("keys/" + id);
    KeyPair kp = keygen(ck_, party);
    pending_.emplace_back(id, kp);
    return kp.pk;
}

void OracleWorld::start(const std::map<std::string, std::map<std::string, int64_t>>& initial) {
    if (desk_) throw InvalidInput("oracle: already started");
    if (pending_.empty()) throw InvalidInput("oracle: no accounts");
    desk_ = std::make_unique<Desk>(ck_, pending_, assets_, cfg_, rng_.fork("desk"));
    desk_->init(initial);
    ValueList genesis_values = desk_->make_values(initial, true);
    shadow_.apply(desk_->registry(), genesis_values);
}

bool OracleWorld::post_tx(const Transaction& tx) {
    if (!desk_) throw InvalidInput("oracle: not started");
    if (excluded_.count(tx.txid)) return false;
    auto res = desk_->append(tx);
    return res.accepted;
}

std::optional<Transaction> OracleWorld::oracle_spend(
    const std::string& sender_id,
    const std::map<std::string, std::map<std::string, int64_t>>& values) {
    if (!desk_) throw InvalidInput("oracle: not started");
    auto sender = desk_->registry().participant_index(sender_id);
    if (!sender) throw InvalidInput("oracle: unknown sender");
    ValueList vl = desk_->make_values(values);
    auto endorsers = desk_->endorsers();
    auto result =
        spend(desk_->ck(), desk_->registry(), desk_->config(), vl, desk_->ledger(), endorsers,
              *sender, desk_->rng());
    if (std::holds_alternative<SpendRefused>(result)) return std::nullopt;
    Transaction tx = std::get<Transaction>(result);
    if (!post_tx(tx)) return std::nullopt;
    shadow_.apply(desk_->registry(), vl);
    return tx;
}

Scalar OracleWorld::corrupt(const GroupElement& pk) {
    if (!desk_) throw InvalidInput("oracle: not started");
    for (const auto& spec : desk_->registry().participants) {
        if (spec.pk == pk) {
            corrupted_.push_back(pk);
            return desk_->participant(spec.id).keys().sk;
        }
    }
    throw InvalidInput("oracle: unknown public key");
}

void OracleWorld::set_policy(const std::string& id, Policy policy) {
    desk_->participant(id).set_policy(std::move(policy));
}

std::pair<std::vector<GroupElement>, const std::vector<Transaction>*> OracleWorld::latest()
    const {
    std::vector<GroupElement> pks;
    for (const auto& p : desk_->registry().participants) pks.push_back(p.pk);
    return {pks, &desk_->ledger().rows()};
}

bool OracleWorld::is_corrupted(const GroupElement& pk) const {
    for (const auto& c : corrupted_)
        if (c == pk) return true;
    return false;
}

bool HarnessReport::all_pass() const {
    for (const auto& c : cases)
        if (!c.pass) return false;
    return true;
}

json HarnessReport::to_json() const {
    json arr = json::array();
    for (const auto& c : cases)
        arr.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    return {{"battery", battery},
            {"seed", to_hex(seed)},
            {"cases", arr},
            {"all_pass", all_pass()}};
}

std::string HarnessReport::to_table() const {
    std::ostringstream out;
    out << battery << " (seed " << to_hex(seed) << ")\n";
    size_t width = 8;
    for (const auto& c : cases) width = std::max(width, c.name.size());
    for (const auto& c : cases) {
        out << "  " << c.name << std::string(width - c.name.size() + 2, ' ')
            << (c.pass ? "ok" : "FAIL");
        if (!c.detail.empty()) out << "  " << c.detail;
        out << "\n";
    }
    out << (all_pass() ? "all cases passed" : "BATTERY FAILED") << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// integrity battery
// ---------------------------------------------------------------------------

namespace {

struct BatteryWorld {
    std::unique_ptr<Desk> desk;
    Rng attacker_rng;

    // three traders plus a mint account that issues both assets
    explicit BatteryWorld(const Bytes32& seed, RangeBackend backend, bool with_issuer = false)
        : attacker_rng(Rng(seed).fork("attacker")) {
        LedgerConfig cfg;
        cfg.backend = backend;
        cfg.extract_max = uint64_t(1) << 14;
        if (with_issuer) cfg.audit_issuer = 3;
        desk = std::make_unique<Desk>(
            std::vector<std::string>{"a", "b", "c", "mint"},
            std::vector<std::pair<std::string, std::string>>{{"usd", "mint"}, {"gem", "mint"}},
            cfg, Rng(seed));
        desk->init({{"usd", {{"a", 1000}, {"b", 500}}}, {"gem", {{"c", 50}}}});
    }

    // honest endorsed transaction, not appended
    Transaction fresh_tx(const std::map<std::string, std::map<std::string, int64_t>>& values,
                         const std::string& sender) {
        ValueList vl = desk->make_values(values);
        auto endorsers = desk->endorsers();
        auto res = spend(desk->ck(), desk->registry(), desk->config(), vl, desk->ledger(),
                         endorsers, *desk->registry().participant_index(sender), desk->rng());
        if (!std::holds_alternative<Transaction>(res)) throw Error("battery: spend refused");
        return std::get<Transaction>(res);
    }

    // draft where participant `cheater` will not endorse honestly; everyone
    // else fills their cells, the cheater's cell is left to the caller
    std::pair<SpendDraft, Transaction> draft_except(
        const std::map<std::string, std::map<std::string, int64_t>>& values,
        const std::string& sender, const std::string& cheater) {
        ValueList vl = desk->make_values(values);
        SpendDraft draft = build_draft(desk->ck(), desk->registry(), desk->config(), vl,
                                       desk->ledger().row_count(), false, desk->rng());
        desk->participant(sender).mark_initiated(draft.pre_tx.txid);
        Transaction tx = draft.pre_tx;
        uint32_t cheater_idx = *desk->registry().participant_index(cheater);
        for (uint32_t s = 0; s < tx.participants.size(); s++) {
            uint32_t p = tx.participants[s];
            if (p == cheater_idx) continue;
            auto& endorser = desk->participant(desk->registry().participants[p].id);
            for (uint32_t a = 0; a < tx.asset_ids.size(); a++) {
                Endorsement en = endorser.fill_asset(desk->ledger(), draft.pre_tx, a);
                if (!std::holds_alternative<EndorsementData>(en))
                    throw Error("battery: honest endorsement refused");
                auto& data = std::get<EndorsementData>(en);
                Cell& cell = tx.cells[a][s];
                cell.cm_prime = data.cm_prime;
                cell.tk_prime = data.tk_prime;
                cell.consistency_prime = data.consistency_prime;
                cell.equivalence = data.equivalence;
                cell.asset = data.asset;
            }
        }
        return {draft, tx};
    }
};

using CaseResult = std::pair<bool, std::string>;
using CaseFn = std::function<CaseResult(BatteryWorld&)>;

CaseResult expect_reject(Ledger::AppendResult res) {
    if (res.accepted) return {false, "tampered transaction was accepted"};
    std::string why = res.reason;
    if (!res.report.failures.empty()) why += " [" + res.report.failures.front().check + "]";
    return {true, why};
}

// fills the cheater's endorsement honestly except for the asset proof, which
// the caller forges; the cheater colludes with itself (knows its sk)
struct CheaterCell {
    Cell* cell;
    int64_t value;
    Transcript ctx;
};

CheaterCell open_cheater_cell(BatteryWorld& w, SpendDraft& draft, Transaction& tx,
                              const std::string& cheater, const std::string& asset_id) {
    uint32_t idx = *w.desk->registry().participant_index(cheater);
    auto slot = *tx.slot_of(idx);
    uint32_t a = 0;
    while (tx.asset_ids[a] != asset_id) a++;
    int64_t value = draft.values.amounts[a][slot];
    return {&tx.cells[a][slot], value,
            cell_context(tx.txid, tx.bound_row_count, tx.genesis, asset_id, idx)};
}

}  // namespace

HarnessReport run_integrity_battery(const Bytes32& seed, RangeBackend backend) {
    HarnessReport report;
    report.battery = "integrity";
    report.seed = seed;

    std::vector<std::pair<std::string, CaseFn>> catalog;
    auto add = [&](std::string name, CaseFn fn) {
        catalog.emplace_back(std::move(name), std::move(fn));
    };

    // ---- I1: asset balance ----
    add("overspend-by-one", [](BatteryWorld& w) -> CaseResult {
        auto res = w.desk->transfer("a", {{"usd", {{"a", -1001}, {"b", 1001}}}});
        if (res.status != Desk::TransferResult::Status::Refused)
            return {false, "overspend was not refused"};
        if (res.refusal.reason != RefusalReason::InsufficientBalance)
            return {false, "wrong refusal reason"};
        return {true, "refused: insufficient balance"};
    });
    add("overspend-after-exact-drain", [](BatteryWorld& w) -> CaseResult {
        if (!w.desk->transfer("a", {{"usd", {{"a", -1000}, {"b", 1000}}}}).ok())
            return {false, "exact drain should pass"};
        auto res = w.desk->transfer("a", {{"usd", {{"a", -1}, {"b", 1}}}});
        return {res.status == Desk::TransferResult::Status::Refused &&
                    res.refusal.reason == RefusalReason::InsufficientBalance,
                "refused after drain"};
    });
    add("negative-balance-unprovable", [](BatteryWorld& w) -> CaseResult {
        auto& p = w.desk->participant("b");
        ColumnHistory hist = w.desk->ledger().column(1, "usd");
        Minted m = mint(w.desk->ck(), -600, 32, w.attacker_rng);
        Token tk = make_token(m.r, p.pk());
        try {
            Transcript ctx("padl/attack");
            prove_asset(w.desk->ck(), hist, m.cm, tk, -100, 0, p.keys().sk, p.pk(), 32,
                        range_backend(w.desk->config().backend), ctx, w.attacker_rng);
            return {false, "negative balance was provable"};
        } catch (const RangeError&) {
            return {true, "prover cannot build the proof"};
        }
    });
    add("forged-aggregate-token", [](BatteryWorld& w) -> CaseResult {
        // b overspends (-600 of 500) and forges the asset proof so the bare
        // equivalence relation holds for a fabricated balance of 7
        auto [draft, tx] = w.draft_except({{"usd", {{"b", -600}, {"a", 600}}}}, "b", "b");
        auto cc = open_cheater_cell(w, draft, tx, "b", "usd");
        auto& p = w.desk->participant("b");
        const CommitKey& ck = w.desk->ck();
        Rng& rng = w.attacker_rng;

        Scalar r_prime = rng.next_scalar();
        cc.cell->cm_prime = ck.commit_i64(cc.value, r_prime);
        cc.cell->tk_prime = make_token(r_prime, p.pk());
        cc.cell->consistency_prime =
            prove_consistency(ck, *cc.cell->cm_prime, *cc.cell->tk_prime, p.pk(),
                              Scalar::from_i64(cc.value), r_prime, cc.ctx.fork("pi_C_prime"),
                              rng);
        cc.cell->equivalence =
            prove_equivalence(ck, cc.cell->cm, *cc.cell->cm_prime, cc.cell->tk,
                              *cc.cell->tk_prime, p.pk(), p.keys().sk, cc.ctx.fork("pi_E"), rng);

        ColumnHistory hist = w.desk->ledger().column(1, "usd");
        Commitment cm_pi = aggregate_commitments(hist.cms);
        cm_pi.point += cc.cell->cm.point;
        Token tk_pi = aggregate_tokens(hist.tks);
        tk_pi.point += cc.cell->tk.point;
        Scalar r_fake = rng.next_scalar();
        Commitment cm_fake = ck.commit_i64(7, r_fake);
        GroupElement base = cm_pi.point - cm_fake.point;
        Token tk_fake{tk_pi.point - base.mul(p.keys().sk)};

        Transcript actx = cc.ctx.fork("pi_A");
        actx.absorb_u64("asset/shift", 0);
        actx.absorb_u64("asset/n", 32);
        AssetProof forged;
        forged.cm_agg = cm_fake;
        forged.tk_agg = tk_fake;
        forged.consistency = prove_consistency(ck, cm_fake, tk_fake, p.pk(),
                                               Scalar::from_i64(7), r_fake,
                                               actx.fork("asset/consistency"), rng);
        forged.equivalence =
            prove_equivalence(ck, cm_pi, cm_fake, tk_pi, tk_fake, p.pk(), p.keys().sk,
                              actx.fork("asset/equivalence"), rng);
        forged.range = range_backend(w.desk->config().backend)
                           .prove(ck, Scalar::from_i64(7), r_fake, 32,
                                  actx.fork("asset/range"), rng);
        cc.cell->asset = forged;
        return expect_reject(w.desk->append(tx));
    });
    add("asset-proof-balance-mismatch", [](BatteryWorld& w) -> CaseResult {
        // honest-looking asset proof but for the wrong claimed balance (the
        // fresh pair is consistent, so the equivalence must fail)
        auto [draft, tx] = w.draft_except({{"usd", {{"b", -400}, {"a", 400}}}}, "b", "b");
        auto cc = open_cheater_cell(w, draft, tx, "b", "usd");
        auto& p = w.desk->participant("b");
        const CommitKey& ck = w.desk->ck();
        Rng& rng = w.attacker_rng;

        Scalar r_prime = rng.next_scalar();
        cc.cell->cm_prime = ck.commit_i64(cc.value, r_prime);
        cc.cell->tk_prime = make_token(r_prime, p.pk());
        cc.cell->consistency_prime =
            prove_consistency(ck, *cc.cell->cm_prime, *cc.cell->tk_prime, p.pk(),
                              Scalar::from_i64(cc.value), r_prime, cc.ctx.fork("pi_C_prime"),
                              rng);
        cc.cell->equivalence =
            prove_equivalence(ck, cc.cell->cm, *cc.cell->cm_prime, cc.cell->tk,
                              *cc.cell->tk_prime, p.pk(), p.keys().sk, cc.ctx.fork("pi_E"), rng);
        ColumnHistory hist = w.desk->ledger().column(1, "usd");
        // true balance is 100, claim 4000
        cc.cell->asset = prove_asset(ck, hist, cc.cell->cm, cc.cell->tk, 4000, 0, p.keys().sk,
                                     p.pk(), 32, range_backend(w.desk->config().backend),
                                     cc.ctx.fork("pi_A"), rng);
        return expect_reject(w.desk->append(tx));
    });

    // ---- I3: transaction balance ----
    add("imbalance-plus-one", [](BatteryWorld& w) -> CaseResult {
        Transaction tx = w.fresh_tx({{"usd", {{"a", -10}, {"b", 10}}}}, "a");
        tx.cells[0][0].cm.point += w.desk->ck().g;
        tx.txid = Transaction::compute_txid(tx);
        return expect_reject(w.desk->append(tx));
    });
    add("imbalance-cross-asset", [](BatteryWorld& w) -> CaseResult {
        w.desk->participant("c").grant_consent("gem", -5);
        Transaction tx = w.fresh_tx(
            {{"usd", {{"a", -10}, {"b", 10}}}, {"gem", {{"c", -5}, {"a", 5}}}}, "a");
        tx.cells[0][0].cm.point += w.desk->ck().g;
        tx.cells[1][0].cm.point -= w.desk->ck().g;
        tx.txid = Transaction::compute_txid(tx);
        return expect_reject(w.desk->append(tx));
    });
    add("genesis-exemption-reuse", [](BatteryWorld& w) -> CaseResult {
        Transaction tx = w.fresh_tx({{"usd", {{"a", -10}, {"b", 10}}}}, "a");
        tx.genesis = true;
        tx.txid = Transaction::compute_txid(tx);
        return expect_reject(w.desk->append(tx));
    });
    add("cell-substitution", [](BatteryWorld& w) -> CaseResult {
        Transaction tx = w.fresh_tx({{"usd", {{"a", -10}, {"b", 10}}}}, "a");
        Minted m = mint(w.desk->ck(), 25, 32, w.attacker_rng);
        tx.cells[0][1].cm = m.cm;
        tx.cells[0][1].tk = make_token(m.r, w.desk->participant("b").pk());
        tx.txid = Transaction::compute_txid(tx);
        return expect_reject(w.desk->append(tx));
    });

    // ---- I2: account owner endorsement ----
    add("foreign-sk-equivalence", [](BatteryWorld& w) -> CaseResult {
        Transaction tx = w.fresh_tx({{"usd", {{"a", -10}, {"b", 10}}}}, "a");
        KeyPair attacker = keygen(w.desk->ck(), w.attacker_rng);
        auto slot = *tx.slot_of(1);
        Cell& cell = tx.cells[0][slot];
        Transcript ctx = cell_context(tx.txid, tx.bound_row_count, false, "usd", 1);
        cell.equivalence = prove_equivalence(
            w.desk->ck(), cell.cm, *cell.cm_prime, cell.tk, *cell.tk_prime,
            w.desk->participant("b").pk(), attacker.sk, ctx.fork("pi_E"), w.attacker_rng);
        return expect_reject(w.desk->append(tx));
    });
    add("foreign-sk-asset-proof", [](BatteryWorld& w) -> CaseResult {
        Transaction tx = w.fresh_tx({{"usd", {{"a", -10}, {"b", 10}}}}, "a");
        KeyPair attacker = keygen(w.desk->ck(), w.attacker_rng);
        auto slot = *tx.slot_of(1);
        Cell& cell = tx.cells[0][slot];
        ColumnHistory hist = w.desk->ledger().column(1, "usd");
        Transcript ctx = cell_context(tx.txid, tx.bound_row_count, false, "usd", 1);
        // correct balance, wrong secret key
        cell.asset = prove_asset(w.desk->ck(), hist, cell.cm, cell.tk, 510, 0, attacker.sk,
                                 w.desk->participant("b").pk(), 32,
                                 range_backend(w.desk->config().backend), ctx.fork("pi_A"),
                                 w.attacker_rng);
        return expect_reject(w.desk->append(tx));
    });
    add("foreign-complementary-pair", [](BatteryWorld& w) -> CaseResult {
        Transaction tx = w.fresh_tx({{"usd", {{"a", -10}, {"b", 10}}}}, "a");
        KeyPair attacker = keygen(w.desk->ck(), w.attacker_rng);
        auto slot = *tx.slot_of(1);
        Cell& cell = tx.cells[0][slot];
        Scalar r_prime = w.attacker_rng.next_scalar();
        cell.cm_prime = w.desk->ck().commit_i64(10, r_prime);
        cell.tk_prime = make_token(r_prime, attacker.pk);  // wrong key
        Transcript ctx = cell_context(tx.txid, tx.bound_row_count, false, "usd", 1);
        cell.consistency_prime = prove_consistency(
            w.desk->ck(), *cell.cm_prime, *cell.tk_prime, attacker.pk, Scalar::from_i64(10),
            r_prime, ctx.fork("pi_C_prime"), w.attacker_rng);
        return expect_reject(w.desk->append(tx));
    });
    add("endorsement-transplant-same-tx", [](BatteryWorld& w) -> CaseResult {
        Transaction tx = w.fresh_tx({{"usd", {{"a", -10}, {"b", 10}}}}, "a");
        tx.cells[0][2].cm_prime = tx.cells[0][1].cm_prime;
        tx.cells[0][2].tk_prime = tx.cells[0][1].tk_prime;
        tx.cells[0][2].consistency_prime = tx.cells[0][1].consistency_prime;
        tx.cells[0][2].equivalence = tx.cells[0][1].equivalence;
        tx.cells[0][2].asset = tx.cells[0][1].asset;
        return expect_reject(w.desk->append(tx));
    });
    add("endorsement-replay-previous-tx", [](BatteryWorld& w) -> CaseResult {
        if (!w.desk->transfer("a", {{"usd", {{"a", -10}, {"b", 10}}}}).ok())
            return {false, "setup transfer failed"};
        const Transaction& old = w.desk->ledger().rows().back();
        Transaction tx = w.fresh_tx({{"usd", {{"a", -10}, {"b", 10}}}}, "a");
        auto slot = *tx.slot_of(1);
        auto old_slot = *old.slot_of(1);
        tx.cells[0][slot].cm_prime = old.cells[0][old_slot].cm_prime;
        tx.cells[0][slot].tk_prime = old.cells[0][old_slot].tk_prime;
        tx.cells[0][slot].consistency_prime = old.cells[0][old_slot].consistency_prime;
        tx.cells[0][slot].equivalence = old.cells[0][old_slot].equivalence;
        tx.cells[0][slot].asset = old.cells[0][old_slot].asset;
        return expect_reject(w.desk->append(tx));
    });

    // ---- proof field mutations ----
    auto mutation_case = [&](std::string name, std::function<void(BatteryWorld&, Cell&)> mutate) {
        add(std::move(name), [mutate](BatteryWorld& w) -> CaseResult {
            Transaction tx = w.fresh_tx({{"usd", {{"a", -10}, {"b", 10}}}}, "a");
            mutate(w, tx.cells[0][1]);
            return expect_reject(w.desk->append(tx));
        });
    };
    mutation_case("mutate-pi-c-t1",
                  [](BatteryWorld& w, Cell& c) { c.consistency.t1 += w.desk->ck().g; });
    mutation_case("mutate-pi-c-t2",
                  [](BatteryWorld& w, Cell& c) { c.consistency.t2 += w.desk->ck().h; });
    mutation_case("mutate-pi-c-s1",
                  [](BatteryWorld&, Cell& c) { c.consistency.s1 += Scalar::one(); });
    mutation_case("mutate-pi-c-s2",
                  [](BatteryWorld&, Cell& c) { c.consistency.s2 += Scalar::one(); });
    mutation_case("mutate-pi-e-t",
                  [](BatteryWorld& w, Cell& c) { c.equivalence->t += w.desk->ck().g; });
    mutation_case("mutate-pi-e-s",
                  [](BatteryWorld&, Cell& c) { c.equivalence->s += Scalar::one(); });
    mutation_case("mutate-pi-c-prime-s2",
                  [](BatteryWorld&, Cell& c) { c.consistency_prime->s2 += Scalar::one(); });
    mutation_case("mutate-asset-cm-agg",
                  [](BatteryWorld& w, Cell& c) { c.asset->cm_agg.point += w.desk->ck().g; });
    mutation_case("mutate-asset-tk-agg",
                  [](BatteryWorld& w, Cell& c) { c.asset->tk_agg.point += w.desk->ck().h; });
    mutation_case("mutate-asset-consistency",
                  [](BatteryWorld&, Cell& c) { c.asset->consistency.s1 += Scalar::one(); });
    mutation_case("mutate-asset-equivalence",
                  [](BatteryWorld&, Cell& c) { c.asset->equivalence.s += Scalar::one(); });
    mutation_case("mutate-asset-range-byte", [](BatteryWorld&, Cell& c) {
        c.asset->range.payload[c.asset->range.payload.size() / 2] ^= 0x20;
    });
    mutation_case("truncate-asset-range",
                  [](BatteryWorld&, Cell& c) { c.asset->range.payload.pop_back(); });
    mutation_case("swap-cm-tk", [](BatteryWorld&, Cell& c) {
        std::swap(c.cm.point, c.tk.point);
    });

    // ---- replay, staleness, history, structure ----
    add("duplicate-append", [](BatteryWorld& w) -> CaseResult {
        Transaction tx = w.fresh_tx({{"usd", {{"a", -10}, {"b", 10}}}}, "a");
        if (!w.desk->append(tx).accepted) return {false, "honest append failed"};
        return expect_reject(w.desk->append(tx));
    });
    add("stale-height-binding", [](BatteryWorld& w) -> CaseResult {
        Transaction tx = w.fresh_tx({{"usd", {{"a", -10}, {"b", 10}}}}, "a");
        if (!w.desk->transfer("a", {{"usd", {{"a", -5}, {"b", 5}}}}).ok())
            return {false, "interleaved transfer failed"};
        return expect_reject(w.desk->append(tx));
    });
    add("history-omission-breaks-replay", [](BatteryWorld& w) -> CaseResult {
        for (int i = 0; i < 3; i++)
            if (!w.desk->transfer("a", {{"usd", {{"a", -10}, {"b", 10}}}}).ok())
                return {false, "setup transfer failed"};
        // replay the log into a fresh ledger with row 1 omitted
        Ledger replica(w.desk->ck(), w.desk->registry(), w.desk->config());
        const auto& rows = w.desk->ledger().rows();
        if (!replica.append(rows[0]).accepted) return {false, "genesis replay failed"};
        for (size_t t = 2; t < rows.size(); t++) {
            Transaction patched = rows[t];
            patched.bound_row_count = replica.row_count();
            auto res = replica.append(patched);
            if (!res.accepted)
                return {true, "replay without row 1 rejected [" +
                                  (res.report.failures.empty()
                                       ? res.reason
                                       : res.report.failures.front().check) +
                                  "]"};
        }
        return {false, "ledger with omitted history replayed cleanly"};
    });
    add("state-hash-omission", [](BatteryWorld& w) -> CaseResult {
        for (int i = 0; i < 2; i++)
            if (!w.desk->transfer("a", {{"usd", {{"a", -10}, {"b", 10}}}}).ok())
                return {false, "setup transfer failed"};
        const auto& rows = w.desk->ledger().rows();
        std::vector<Transaction> omitted = {rows[0], rows[2]};
        bool detected = Ledger::chain_state_hash(omitted) != w.desk->ledger().state_hash();
        return {detected, "hash chain diverges"};
    });
    add("state-hash-reorder", [](BatteryWorld& w) -> CaseResult {
        for (int i = 0; i < 2; i++)
            if (!w.desk->transfer("a", {{"usd", {{"a", -10}, {"b", 10}}}}).ok())
                return {false, "setup transfer failed"};
        const auto& rows = w.desk->ledger().rows();
        std::vector<Transaction> reordered = {rows[0], rows[2], rows[1]};
        bool detected = Ledger::chain_state_hash(reordered) != w.desk->ledger().state_hash();
        return {detected, "hash chain diverges"};
    });
    add("txid-byte-flip", [](BatteryWorld& w) -> CaseResult {
        Transaction tx = w.fresh_tx({{"usd", {{"a", -10}, {"b", 10}}}}, "a");
        tx.txid[5] ^= 0x01;
        return expect_reject(w.desk->append(tx));
    });
    add("cm-tamper-after-endorsement", [](BatteryWorld& w) -> CaseResult {
        Transaction tx = w.fresh_tx({{"usd", {{"a", -10}, {"b", 10}}}}, "a");
        tx.cells[0][0].cm.point += w.desk->ck().g;  // txid left unrepaired
        return expect_reject(w.desk->append(tx));
    });
    add("asset-rename", [](BatteryWorld& w) -> CaseResult {
        Transaction tx = w.fresh_tx({{"usd", {{"a", -10}, {"b", 10}}}}, "a");
        tx.asset_ids[0] = "gem";
        tx.txid = Transaction::compute_txid(tx);
        return expect_reject(w.desk->append(tx));
    });
    add("unknown-asset", [](BatteryWorld& w) -> CaseResult {
        Transaction tx = w.fresh_tx({{"usd", {{"a", -10}, {"b", 10}}}}, "a");
        tx.asset_ids[0] = "oil";
        tx.txid = Transaction::compute_txid(tx);
        return expect_reject(w.desk->append(tx));
    });
    add("unknown-participant-index", [](BatteryWorld& w) -> CaseResult {
        Transaction tx = w.fresh_tx({{"usd", {{"a", -10}, {"b", 10}}}}, "a");
        tx.participants[3] = 99;
        tx.txid = Transaction::compute_txid(tx);
        return expect_reject(w.desk->append(tx));
    });
    add("exclusion-of-nonzero-cell", [](BatteryWorld& w) -> CaseResult {
        ValueList vl = w.desk->make_values({{"usd", {{"a", -10}, {"b", 10}}}});
        SpendDraft draft = build_draft(w.desk->ck(), w.desk->registry(), w.desk->config(), vl,
                                       w.desk->ledger().row_count(), false, w.desk->rng());
        SpendDraft broken = exclude_and_rebalance(w.desk->ck(), w.desk->registry(),
                                                  w.desk->config(), draft, {1}, 0,
                                                  w.desk->rng());
        w.desk->participant("a").mark_initiated(broken.pre_tx.txid);
        std::vector<Participant*> rest = {&w.desk->participant("a"), &w.desk->participant("c"),
                                          &w.desk->participant("mint")};
        auto result = collect_endorsements(broken, w.desk->ledger(), rest);
        if (std::holds_alternative<SpendRefused>(result))
            return {true, "refused during endorsement"};
        return expect_reject(w.desk->append(std::get<Transaction>(result)));
    });

    // ---- issuer-token extension ----
    add("issuer-token-missing", [](BatteryWorld&) -> CaseResult {
        BatteryWorld w2(Bytes32{201}, RangeBackend::Bulletproof, /*with_issuer=*/true);
        Transaction tx = w2.fresh_tx({{"usd", {{"a", -10}, {"b", 10}}}}, "a");
        tx.cells[0][0].issuer.reset();
        return expect_reject(w2.desk->append(tx));
    });
    add("issuer-token-wrong-key", [](BatteryWorld&) -> CaseResult {
        BatteryWorld w2(Bytes32{202}, RangeBackend::Bulletproof, /*with_issuer=*/true);
        Transaction tx = w2.fresh_tx({{"usd", {{"a", -10}, {"b", 10}}}}, "a");
        KeyPair attacker = keygen(w2.desk->ck(), w2.attacker_rng);
        IssuerToken bogus;
        bogus.token = make_token(w2.attacker_rng.next_scalar(), attacker.pk);
        bogus.consistency = tx.cells[0][0].issuer->consistency;
        tx.cells[0][0].issuer = bogus;
        return expect_reject(w2.desk->append(tx));
    });

    for (auto& [name, fn] : catalog) {
        BatteryWorld world(seed, backend);
        try {
            auto [pass, detail] = fn(world);
            report.cases.push_back({name, pass, detail});
        } catch (const std::exception& e) {
            report.cases.push_back({name, false, std::string("exception: ") + e.what()});
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// anonymity game mechanics
// ---------------------------------------------------------------------------

namespace {

struct AmountLists {
    // per asset, per participant id
    std::map<std::string, std::map<std::string, int64_t>> v0, v1;
};

// the three trivial-exclusion rules; nullopt means "proceed"
std::optional<std::string> exclusion_rule(OracleWorld& world, const AmountLists& lists) {
    auto& desk = world.desk();
    // rule 1: corrupted accounts must carry identical values in both lists
    for (const auto& spec : desk.registry().participants) {
        if (!world.is_corrupted(spec.pk)) continue;
        for (const auto& asset : desk.registry().assets) {
            auto get = [&](const auto& vs) {
                auto ait = vs.find(asset.id);
                if (ait == vs.end()) return int64_t(0);
                auto pit = ait->second.find(spec.id);
                return pit == ait->second.end() ? int64_t(0) : pit->second;
            };
            if (get(lists.v0) != get(lists.v1)) return "corrupted-account value mismatch";
        }
    }
    // rule 2: the two lists must hold the same multiset of amounts per asset
    for (const auto& asset : desk.registry().assets) {
        std::multiset<int64_t> m0, m1;
        auto fill = [&](const auto& vs, std::multiset<int64_t>& m) {
            auto ait = vs.find(asset.id);
            if (ait == vs.end()) return;
            for (const auto& [pid, v] : ait->second) m.insert(v);
        };
        fill(lists.v0, m0);
        fill(lists.v1, m1);
        if (m0 != m1) return "amount multisets differ";
    }
    // rule 3: every value must pass its account's policy
    for (const auto* vs : {&lists.v0, &lists.v1}) {
        for (const auto& [asset_id, by_p] : *vs) {
            for (const auto& [pid, v] : by_p) {
                auto& part = desk.participant(pid);
                if (!part.policy_allows(asset_id, v)) return "policy-failing value";
            }
        }
    }
    return std::nullopt;
}

}  // namespace

HarnessReport run_anonymity_mechanics(const Bytes32& seed, RangeBackend backend) {
    HarnessReport report;
    report.battery = "anonymity-mechanics";
    report.seed = seed;

    LedgerConfig cfg;
    cfg.backend = backend;
    cfg.extract_max = uint64_t(1) << 14;

    auto make_world = [&]() {
        auto world = std::make_unique<OracleWorld>(
            std::vector<std::pair<std::string, std::string>>{{"usd", "mint"}}, cfg,
            Rng(seed).fork("anon"));
        for (const char* id : {"p", "q", "r", "mint"}) world->add_account(id);
        world->start({{"usd", {{"p", 500}, {"q", 500}, {"r", 500}}}});
        return world;
    };

    auto check = [&](std::string name, bool pass, std::string detail) {
        report.cases.push_back({std::move(name), pass, std::move(detail)});
    };

    {
        // rule 1: corrupted account with differing values
        auto world = make_world();
        auto pks = world->latest().first;
        world->corrupt(pks[2]);  // r
        AmountLists lists;
        lists.v0["usd"] = {{"p", -5}, {"q", 5}, {"r", 0}};
        lists.v1["usd"] = {{"p", -5}, {"q", 0}, {"r", 5}};
        auto rule = exclusion_rule(*world, lists);
        check("rule-corrupted-mismatch", rule.has_value() && *rule == "corrupted-account value mismatch",
              rule.value_or("no rule fired"));
    }
    {
        // rule 2: multiset mismatch on uncorrupted accounts
        auto world = make_world();
        AmountLists lists;
        lists.v0["usd"] = {{"p", -5}, {"q", 5}};
        lists.v1["usd"] = {{"p", -7}, {"q", 7}};
        auto rule = exclusion_rule(*world, lists);
        check("rule-multiset-mismatch", rule.has_value() && *rule == "amount multisets differ",
              rule.value_or("no rule fired"));
    }
    {
        // rule 3: a value the account's policy rejects
        auto world = make_world();
        AmountLists lists;
        // q never initiated and granted no consent, so -5 fails its policy
        lists.v0["usd"] = {{"p", 5}, {"q", -5}};
        lists.v1["usd"] = {{"q", 5}, {"p", -5}};
        auto rule = exclusion_rule(*world, lists);
        check("rule-policy-failing", rule.has_value() && *rule == "policy-failing value",
              rule.value_or("no rule fired"));
    }
    {
        // well-formed challenge: produced, excluded, unpostable, value-free
        auto world = make_world();
        auto& desk = world->desk();
        desk.participant("p").grant_consent("usd", -5);
        desk.participant("q").grant_consent("usd", -5);
        AmountLists lists;
        lists.v0["usd"] = {{"p", -5}, {"q", 5}};
        lists.v1["usd"] = {{"q", -5}, {"p", 5}};
        auto rule = exclusion_rule(*world, lists);
        check("challenge-rules-clear", !rule.has_value(), rule.value_or(""));

        bool b = Rng(seed).fork("bit").next_u64() & 1;
        ValueList vl = desk.make_values(b ? lists.v1 : lists.v0);
        auto endorsers = desk.endorsers();
        auto result = spend(desk.ck(), desk.registry(), desk.config(), vl, desk.ledger(),
                            endorsers, *desk.registry().participant_index("mint"), desk.rng());
        bool built = std::holds_alternative<Transaction>(result);
        check("challenge-produced", built, built ? "" : "spend refused");
        if (built) {
            Transaction challenge = std::get<Transaction>(result);
            auto pre_rows = desk.ledger().row_count();
            world->exclude_tx(challenge.txid);
            bool posted = world->post_tx(challenge);
            check("challenge-excluded-from-posting",
                  !posted && desk.ledger().row_count() == pre_rows,
                  "post_tx returned 0, ledger unchanged");

            // plaintext scan: no 8-byte little-endian encoding of any amount
            Bytes wire = challenge.to_bytes();
            bool leaked = false;
            for (int64_t v : {int64_t(5), int64_t(-5)}) {
                uint8_t pat[8];
                store_le64(pat, uint64_t(v));
                for (size_t i = 0; i + 8 <= wire.size(); i++)
                    if (std::memcmp(wire.data() + i, pat, 8) == 0) leaked = true;
            }
            check("challenge-bytes-value-free", !leaked, "");

            // and the challenge itself is a well-formed transaction
            auto rep = verify_transaction(desk.ck(), desk.registry(), desk.config(), challenge,
                                          desk.ledger());
            check("challenge-well-formed", rep.ok, "");
        }
    }
    return report;
}

}  // namespace padl
