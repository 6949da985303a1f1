#include "padl/audit.hpp"

using nlohmann::json;

namespace padl {

namespace {

// products over one column restricted to a row range
struct ColumnProducts {
    GroupElement cm = GroupElement::identity();
    GroupElement tk = GroupElement::identity();
    size_t cells = 0;
};

ColumnProducts column_products(const Ledger& ledger, uint32_t participant,
                               const std::string& asset_id, const TxRange& range) {
    ColumnProducts out;
    uint64_t to = range.resolve_to(ledger);
    if (to > ledger.row_count()) throw InvalidInput("audit: range beyond ledger height");
    for (uint64_t t = range.from; t < to; t++) {
        const Transaction& tx = ledger.rows()[t];
        auto slot = tx.slot_of(participant);
        if (!slot) continue;
        for (size_t a = 0; a < tx.asset_ids.size(); a++) {
            if (tx.asset_ids[a] != asset_id) continue;
            out.cm += tx.cells[a][*slot].cm.point;
            out.tk += tx.cells[a][*slot].tk.point;
            out.cells++;
        }
    }
    return out;
}

Transcript balance_ctx(const Ledger& ledger, const BalanceAudit& audit) {
    Transcript t("padl/audit/balance/v1");
    t.absorb("state", ledger.state_hash());
    t.absorb_u64("participant", audit.participant);
    t.absorb("asset", std::span<const uint8_t>(
                          reinterpret_cast<const uint8_t*>(audit.asset_id.data()),
                          audit.asset_id.size()));
    t.absorb_u64("claimed", uint64_t(audit.claimed));
    t.absorb_u64("from", audit.range.from);
    t.absorb_u64("to", audit.range.resolve_to(ledger));
    return t;
}

}  // namespace

BalanceAudit prove_balance(const Ledger& ledger, uint32_t participant,
                           const std::string& asset_id, const Scalar& sk, int64_t claimed,
                           TxRange range, Rng& rng) {
    BalanceAudit audit;
    audit.participant = participant;
    audit.asset_id = asset_id;
    audit.claimed = claimed;
    audit.range = range;

    ColumnProducts prod = column_products(ledger, participant, asset_id, range);
    if (prod.cells == 0) throw DegenerateStatement("balance audit: empty column range");
    GroupElement c1 = prod.cm - ledger.commit_key().g.mul(Scalar::from_i64(claimed));
    GroupElement c2 = prod.tk;
    const GroupElement& pk = ledger.registry().participants[participant].pk;

    audit.proof = prove_dlog_equality(ledger.commit_key().h, pk, c1, c2, sk,
                                      balance_ctx(ledger, audit), rng);
    return audit;
}

bool verify_balance(const Ledger& ledger, const BalanceAudit& audit) {
    if (audit.participant >= ledger.registry().participants.size()) return false;
    if (!ledger.registry().asset_index(audit.asset_id)) return false;
    ColumnProducts prod;
    try {
        prod = column_products(ledger, audit.participant, audit.asset_id, audit.range);
    } catch (const InvalidInput&) {
        return false;
    }
    if (prod.cells == 0) return false;
    GroupElement c1 = prod.cm - ledger.commit_key().g.mul(Scalar::from_i64(audit.claimed));
    GroupElement c2 = prod.tk;
    const GroupElement& pk = ledger.registry().participants[audit.participant].pk;
    return verify_dlog_equality(ledger.commit_key().h, pk, c1, c2, audit.proof,
                                balance_ctx(ledger, audit));
}

// ---------------------------------------------------------------------------
// liquidity
// ---------------------------------------------------------------------------

namespace {

Transcript liquidity_ctx(const Ledger& ledger, const LiquidityAudit& audit) {
    Transcript t("padl/audit/liquidity/v1");
    t.absorb("state", ledger.state_hash());
    t.absorb_u64("participant", audit.participant);
    t.absorb("asset", std::span<const uint8_t>(
                          reinterpret_cast<const uint8_t*>(audit.target_asset.data()),
                          audit.target_asset.size()));
    t.absorb_u64("d", audit.d);
    t.absorb_u64("n", audit.n);
    return t;
}

// c1 = prod of complementary commitments of the target asset,
// c2 = prod over all assets
std::pair<GroupElement, GroupElement> liquidity_points(const Ledger& ledger,
                                                       uint32_t participant,
                                                       const std::string& target_asset) {
    GroupElement c1 = GroupElement::identity();
    GroupElement c2 = GroupElement::identity();
    for (const auto& asset : ledger.registry().assets) {
        auto col = ledger.column_complementary(participant, asset.id);
        GroupElement prod = GroupElement::identity();
        for (const auto& cm : col) prod += cm.point;
        c2 += prod;
        if (asset.id == target_asset) c1 = prod;
    }
    return {c1, c2};
}

}  // namespace

LiquidityAudit prove_liquidity(const Ledger& ledger, const Participant& prover,
                               const std::string& target_asset, uint64_t d, uint64_t n,
                               Rng& rng) {
    if (n == 0 || d == 0) throw InvalidInput("liquidity audit: zero threshold terms");
    if (!ledger.registry().asset_index(target_asset))
        throw InvalidInput("liquidity audit: unknown asset");
    if (ledger.config().reduced_cells)
        throw InvalidInput("liquidity audit: needs an endorsed ledger");

    LiquidityAudit audit;
    audit.participant = prover.index();
    audit.target_asset = target_asset;
    audit.d = d;
    audit.n = n;

    // sums of values and complementary blindings from the prover's store
    __int128 sum_all = 0, sum_target = 0;
    Scalar r_all = Scalar::zero(), r_target = Scalar::zero();
    for (const auto& tx : ledger.rows()) {
        if (!tx.slot_of(prover.index())) continue;
        for (const auto& asset_id : tx.asset_ids) {
            auto it = prover.openings().find({tx.txid, asset_id});
            if (it == prover.openings().end())
                throw Error("liquidity audit: missing complementary opening");
            sum_all += it->second.value;
            r_all += it->second.r_prime;
            if (asset_id == target_asset) {
                sum_target += it->second.value;
                r_target += it->second.r_prime;
            }
        }
    }

    __int128 v_r = __int128(d) * sum_all - __int128(n) * sum_target;
    if (v_r < 0) throw RangeError("liquidity audit: ratio violates the threshold");
    if (v_r >> ledger.config().n_bits)
        throw RangeError("liquidity audit: residual exceeds the range bound");

    Scalar dd = Scalar::from_u64(d);
    Scalar nn = Scalar::from_u64(n);
    Scalar r_r = dd * r_all - nn * r_target;
    audit.c_r = ledger.commit_key().commit(Scalar::from_u64(uint64_t(v_r)), r_r);
    audit.proof = range_backend(ledger.config().backend)
                      .prove(ledger.commit_key(), Scalar::from_u64(uint64_t(v_r)), r_r,
                             ledger.config().n_bits, liquidity_ctx(ledger, audit), rng);
    return audit;
}

bool verify_liquidity(const Ledger& ledger, const LiquidityAudit& audit) {
    if (audit.participant >= ledger.registry().participants.size()) return false;
    if (!ledger.registry().asset_index(audit.target_asset)) return false;
    if (audit.d == 0 || audit.n == 0) return false;
    auto [c1, c2] = liquidity_points(ledger, audit.participant, audit.target_asset);
    GroupElement expected = c2.mul(Scalar::from_u64(audit.d)) - c1.mul(Scalar::from_u64(audit.n));
    if (expected != audit.c_r.point) return false;
    return range_backend(ledger.config().backend)
        .verify(ledger.commit_key(), audit.c_r, ledger.config().n_bits, audit.proof,
                liquidity_ctx(ledger, audit));
}

// ---------------------------------------------------------------------------
// inter-transaction rate
// ---------------------------------------------------------------------------

namespace {

Transcript rate_ctx(const Ledger& ledger, const RateAudit& audit) {
    Transcript t("padl/audit/rate/v1");
    t.absorb("state", ledger.state_hash());
    t.absorb_u64("participant", audit.participant);
    t.absorb("asset", std::span<const uint8_t>(
                          reinterpret_cast<const uint8_t*>(audit.asset_id.data()),
                          audit.asset_id.size()));
    t.absorb_u64("d", audit.d);
    t.absorb_u64("n", audit.n);
    t.absorb_u64("sign1", uint64_t(int64_t(audit.sign1)));
    t.absorb_u64("sign2", uint64_t(int64_t(audit.sign2)));
    for (uint64_t r : audit.txs1) t.absorb_u64("t1", r);
    for (uint64_t r : audit.txs2) t.absorb_u64("t2", r);
    return t;
}

// c = c1^(s1 n) * c2^(-s2 d), tau likewise over tokens
std::optional<std::pair<GroupElement, GroupElement>> rate_points(const Ledger& ledger,
                                                                 const RateAudit& audit) {
    auto collect = [&](const std::vector<uint64_t>& rows)
        -> std::optional<std::pair<GroupElement, GroupElement>> {
        GroupElement cm = GroupElement::identity();
        GroupElement tk = GroupElement::identity();
        size_t found = 0;
        for (uint64_t t : rows) {
            if (t >= ledger.row_count()) return std::nullopt;
            const Transaction& tx = ledger.rows()[t];
            auto slot = tx.slot_of(audit.participant);
            if (!slot) return std::nullopt;
            for (size_t a = 0; a < tx.asset_ids.size(); a++) {
                if (tx.asset_ids[a] != audit.asset_id) continue;
                cm += tx.cells[a][*slot].cm.point;
                tk += tx.cells[a][*slot].tk.point;
                found++;
            }
        }
        if (found == 0) return std::nullopt;
        return std::make_pair(cm, tk);
    };
    auto side1 = collect(audit.txs1);
    auto side2 = collect(audit.txs2);
    if (!side1 || !side2) return std::nullopt;

    Scalar e1 = Scalar::from_u64(audit.n);
    if (audit.sign1 < 0) e1 = -e1;
    Scalar e2 = -Scalar::from_u64(audit.d);
    if (audit.sign2 < 0) e2 = -e2;
    GroupElement c = side1->first.mul(e1) + side2->first.mul(e2);
    GroupElement tau = side1->second.mul(e1) + side2->second.mul(e2);
    return std::make_pair(c, tau);
}

}  // namespace

RateAudit prove_rate(const Ledger& ledger, uint32_t participant, const std::string& asset_id,
                     const Scalar& sk, std::vector<uint64_t> txs1, std::vector<uint64_t> txs2,
                     uint64_t d, uint64_t n, int8_t sign1, int8_t sign2, Rng& rng) {
    if (d == 0 || n == 0) throw InvalidInput("rate audit: zero rate terms");

    RateAudit audit;
    audit.participant = participant;
    audit.asset_id = asset_id;
    audit.txs1 = std::move(txs1);
    audit.txs2 = std::move(txs2);
    audit.d = d;
    audit.n = n;
    audit.sign1 = sign1;
    audit.sign2 = sign2;

    auto points = rate_points(ledger, audit);
    if (!points) throw InvalidInput("rate audit: bad transaction subsets");
    auto [c, tau] = *points;
    const GroupElement& pk = ledger.registry().participants[participant].pk;
    if (c.is_identity() && tau.is_identity()) {
        // identical subsets at rate 1/1 cancel completely; the proof reduces
        // to plain account ownership
        c = ledger.commit_key().h;
        tau = pk;
    }
    audit.proof = prove_dlog_equality(ledger.commit_key().h, pk, c, tau, sk,
                                      rate_ctx(ledger, audit), rng);
    return audit;
}

bool verify_rate(const Ledger& ledger, const RateAudit& audit) {
    if (audit.participant >= ledger.registry().participants.size()) return false;
    if (audit.d == 0 || audit.n == 0) return false;
    auto points = rate_points(ledger, audit);
    if (!points) return false;
    auto [c, tau] = *points;
    const GroupElement& pk = ledger.registry().participants[audit.participant].pk;
    if (c.is_identity() != tau.is_identity()) return false;
    if (c.is_identity()) {
        c = ledger.commit_key().h;
        tau = pk;
    }
    return verify_dlog_equality(ledger.commit_key().h, pk, c, tau, audit.proof,
                                rate_ctx(ledger, audit));
}

// ---------------------------------------------------------------------------
// full audit via issuer tokens
// ---------------------------------------------------------------------------

int64_t full_audit_extract(const Ledger& ledger, const Extractor& issuer_extractor,
                           const GroupElement& issuer_pk, const CellAddress& address) {
    if (!ledger.config().audit_issuer)
        throw InvalidInput("full audit: ledger has no audit issuer");
    const GroupElement& designated =
        ledger.registry().participants[*ledger.config().audit_issuer].pk;
    if (!(issuer_pk == designated))
        throw InvalidInput("full audit: not the designated audit issuer");
    if (address.row >= ledger.row_count()) throw InvalidInput("full audit: no such row");
    const Transaction& tx = ledger.rows()[address.row];
    auto slot = tx.slot_of(address.participant);
    if (!slot) throw InvalidInput("full audit: participant not in transaction");
    for (size_t a = 0; a < tx.asset_ids.size(); a++) {
        if (tx.asset_ids[a] != address.asset_id) continue;
        const Cell& cell = tx.cells[a][*slot];
        if (!cell.issuer) throw InvalidInput("full audit: cell carries no issuer token");
        auto v = issuer_extractor.extract(cell.cm, cell.issuer->token);
        if (!v) throw RangeError("full audit: value out of the extraction window");
        return *v;
    }
    throw InvalidInput("full audit: asset not in transaction");
}

// ---------------------------------------------------------------------------
// wire schemas
// ---------------------------------------------------------------------------

json BalanceAudit::to_json() const {
    json j = {{"type", "balance"},
              {"participant", participant},
              {"asset", asset_id},
              {"claimed", claimed},
              {"from", range.from},
              {"proof", to_hex(proof.to_bytes())}};
    if (range.to) j["to"] = *range.to;
    return j;
}

BalanceAudit BalanceAudit::from_json(const json& j) {
    BalanceAudit a;
    a.participant = j.at("participant").get<uint32_t>();
    a.asset_id = j.at("asset").get<std::string>();
    a.claimed = j.at("claimed").get<int64_t>();
    a.range.from = j.at("from").get<uint64_t>();
    if (j.contains("to")) a.range.to = j.at("to").get<uint64_t>();
    auto proof = DlogEqualityProof::from_bytes(from_hex(j.at("proof").get<std::string>()));
    if (!proof) throw DecodeError("balance audit: bad proof bytes");
    a.proof = *proof;
    return a;
}

json LiquidityAudit::to_json() const {
    return {{"type", "liquidity"}, {"participant", participant}, {"asset", target_asset},
            {"d", d},             {"n", n},
            {"c_r", to_hex(c_r.point.encode())},
            {"proof", to_hex(proof.to_bytes())}};
}

LiquidityAudit LiquidityAudit::from_json(const json& j) {
    LiquidityAudit a;
    a.participant = j.at("participant").get<uint32_t>();
    a.target_asset = j.at("asset").get<std::string>();
    a.d = j.at("d").get<uint64_t>();
    a.n = j.at("n").get<uint64_t>();
    auto point = GroupElement::decode(array_from_hex<32>(j.at("c_r").get<std::string>()));
    if (!point) throw DecodeError("liquidity audit: bad commitment");
    a.c_r = {*point};
    auto proof = RangeProof::from_bytes(from_hex(j.at("proof").get<std::string>()));
    if (!proof) throw DecodeError("liquidity audit: bad proof bytes");
    a.proof = *proof;
    return a;
}

json RateAudit::to_json() const {
    return {{"type", "rate"},       {"participant", participant}, {"asset", asset_id},
            {"txs1", txs1},         {"txs2", txs2},
            {"d", d},               {"n", n},
            {"sign1", int(sign1)},  {"sign2", int(sign2)},
            {"proof", to_hex(proof.to_bytes())}};
}

RateAudit RateAudit::from_json(const json& j) {
    RateAudit a;
    a.participant = j.at("participant").get<uint32_t>();
    a.asset_id = j.at("asset").get<std::string>();
    a.txs1 = j.at("txs1").get<std::vector<uint64_t>>();
    a.txs2 = j.at("txs2").get<std::vector<uint64_t>>();
    a.d = j.at("d").get<uint64_t>();
    a.n = j.at("n").get<uint64_t>();
    a.sign1 = int8_t(j.at("sign1").get<int>());
    a.sign2 = int8_t(j.at("sign2").get<int>());
    auto proof = DlogEqualityProof::from_bytes(from_hex(j.at("proof").get<std::string>()));
    if (!proof) throw DecodeError("rate audit: bad proof bytes");
    a.proof = *proof;
    return a;
}

}  // namespace padl
