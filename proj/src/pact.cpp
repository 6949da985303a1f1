#include "padl/pact.hpp"

#include <algorithm>
#include <cstring>
#include <future>

#include "padl/sha512.hpp"

namespace padl {

std::optional<uint32_t> Registry::participant_index(std::string_view id) const {
    for (uint32_t i = 0; i < participants.size(); i++)
        if (participants[i].id == id) return i;
    return std::nullopt;
}

std::optional<uint32_t> Registry::asset_index(std::string_view id) const {
    for (uint32_t i = 0; i < assets.size(); i++)
        if (assets[i].id == id) return i;
    return std::nullopt;
}

const AssetSpec& Registry::asset(std::string_view id) const {
    auto idx = asset_index(id);
    if (!idx) throw InvalidInput("unknown asset id");
    return assets[*idx];
}

std::optional<uint32_t> Transaction::slot_of(uint32_t participant_index) const {
    for (uint32_t s = 0; s < participants.size(); s++)
        if (participants[s] == participant_index) return s;
    return std::nullopt;
}

Bytes32 Transaction::compute_txid(const Transaction& tx) {
    Sha512 h;
    h.update("padl/txid/v1");
    uint8_t head[3] = {uint8_t(tx.genesis ? 1 : 0), uint8_t(tx.asset_ids.size()),
                       uint8_t(tx.participants.size())};
    h.update(std::span<const uint8_t>(head, 3));
    for (const auto& id : tx.asset_ids) {
        uint8_t len[2] = {uint8_t(id.size()), uint8_t(id.size() >> 8)};
        h.update(std::span<const uint8_t>(len, 2));
        h.update(id);
    }
    for (uint32_t p : tx.participants) {
        uint8_t enc[4];
        store_le32(enc, p);
        h.update(std::span<const uint8_t>(enc, 4));
    }
    for (const auto& row : tx.cells) {
        for (const auto& cell : row) {
            Bytes32 cm = cell.cm.point.encode();
            Bytes32 tk = cell.tk.point.encode();
            h.update(std::span<const uint8_t>(cm.data(), 32));
            h.update(std::span<const uint8_t>(tk.data(), 32));
        }
    }
    Bytes64 wide = h.finalize();
    Bytes32 out;
    std::memcpy(out.data(), wide.data(), 32);
    return out;
}

void ValueList::validate(const Registry& reg, bool genesis) const {
    if (asset_ids.size() != amounts.size())
        throw InvalidInput("value list: asset shape mismatch");
    if (asset_ids.empty()) throw InvalidInput("value list: no assets");
    for (size_t a = 0; a < asset_ids.size(); a++) {
        if (!reg.asset_index(asset_ids[a])) throw InvalidInput("value list: unknown asset");
        if (amounts[a].size() != reg.participants.size())
            throw InvalidInput("value list: participant shape mismatch");
        if (!genesis) {
            int64_t sum = 0;
            for (int64_t v : amounts[a]) sum += v;
            if (sum != 0) throw InvalidInput("value list: amounts do not sum to zero");
        } else {
            for (int64_t v : amounts[a])
                if (v < 0) throw InvalidInput("value list: negative genesis amount");
        }
    }
}

Policy default_policy() {
    return [](const PolicyContext& pc) { return pc.amount >= 0 || pc.self_initiated; };
}

const char* refusal_name(RefusalReason r) {
    switch (r) {
        case RefusalReason::Policy: return "policy";
        case RefusalReason::InsufficientBalance: return "insufficient-balance";
        case RefusalReason::Extraction: return "extraction";
        case RefusalReason::Stale: return "stale";
    }
    return "unknown";
}

Transcript cell_context(const Bytes32& txid, uint64_t bound_rows, bool genesis,
                        std::string_view asset_id, uint32_t participant_index) {
    Transcript t("padl/cell/v1");
    t.absorb("txid", txid);
    t.absorb_u64("rows", bound_rows);
    t.absorb_u64("genesis", genesis ? 1 : 0);
    t.absorb("asset", std::span<const uint8_t>(
                          reinterpret_cast<const uint8_t*>(asset_id.data()), asset_id.size()));
    t.absorb_u64("participant", participant_index);
    return t;
}

Minted mint(const CommitKey& ck, int64_t v, uint32_t n_bits, Rng& rng) {
    uint64_t mag = v >= 0 ? uint64_t(v) : uint64_t(-(v + 1)) + 1;
    if (n_bits < 64 && (mag >> n_bits)) throw RangeError("mint: magnitude out of range");
    Minted m;
    m.r = rng.next_scalar();
    m.cm = ck.commit_i64(v, m.r);
    return m;
}

// ---------------------------------------------------------------------------
// extraction (baby-step giant-step over the account base g^sk)
// ---------------------------------------------------------------------------

Extractor::Extractor(const CommitKey& ck, const Scalar& sk, uint64_t max_magnitude)
    : sk_(sk), base_(ck.g.mul(sk)), max_(max_magnitude) {
    if (max_ == 0) max_ = 1;
    m_ = 1;
    while (m_ * m_ < max_) m_ <<= 1;

    // giant strides j*m*base for j in [-ceil(max/m)-1, +ceil(max/m)+1]
    int64_t j_max = int64_t(max_ / m_) + 1;
    GroupElement stride = base_.mul(Scalar::from_u64(m_));
    std::vector<GroupElement> pts;
    std::vector<int64_t> idx;
    GroupElement up = GroupElement::identity();
    GroupElement down = GroupElement::identity();
    pts.push_back(up);
    idx.push_back(0);
    for (int64_t j = 1; j <= j_max; j++) {
        up += stride;
        down -= stride;
        pts.push_back(up);
        idx.push_back(j);
        pts.push_back(down);
        idx.push_back(-j);
    }
    auto keys = batch_point_keys(pts);
    for (size_t i = 0; i < keys.size(); i++) table_.emplace(keys[i], idx[i]);
}

std::optional<int64_t> Extractor::extract(const Commitment& cm, const Token& tk) const {
    // cm^sk / tk = (g^sk)^v
    GroupElement target = cm.point.mul(sk_) - tk.point;
    if (target.is_identity()) return 0;

    // batches of candidates target - i*base; a hit at (i, j) means v = j*m + i
    constexpr size_t kChunk = 128;
    GroupElement cursor = target;
    uint64_t i = 0;
    std::vector<GroupElement> chunk;
    chunk.reserve(kChunk);
    while (i < m_) {
        chunk.clear();
        std::vector<uint64_t> offsets;
        for (size_t k = 0; k < kChunk && i < m_; k++, i++) {
            chunk.push_back(cursor);
            offsets.push_back(i);
            cursor -= base_;
        }
        auto keys = batch_point_keys(chunk);
        for (size_t k = 0; k < keys.size(); k++) {
            auto it = table_.find(keys[k]);
            if (it != table_.end()) {
                int64_t v = it->second * int64_t(m_) + int64_t(offsets[k]);
                if (v >= -int64_t(max_) && v <= int64_t(max_)) return v;
            }
        }
    }
    return std::nullopt;
}

std::optional<int64_t> extract_value(const CommitKey& ck, const Commitment& cm, const Token& tk,
                                     const Scalar& sk, uint64_t max_magnitude) {
    Extractor ex(ck, sk, max_magnitude);
    return ex.extract(cm, tk);
}

// ---------------------------------------------------------------------------
// participant
// ---------------------------------------------------------------------------

Participant::Participant(const CommitKey& ck, const Registry& reg, const LedgerConfig& cfg,
                         uint32_t index, KeyPair kp, Rng rng)
    : ck_(ck),
      reg_(reg),
      cfg_(cfg),
      index_(index),
      kp_(std::move(kp)),
      policy_(default_policy()),
      rng_(rng),
      extractor_(ck, kp_.sk, cfg.extract_max) {}

int64_t Participant::balance_through(const LedgerView& view, std::string_view asset_id,
                                     uint64_t rows) const {
    (void)rows;
    // extract every own cell in the column; cache by synced row count
    std::string key(asset_id);
    ColumnHistory col = view.column(index_, asset_id);
    auto it = balance_cache_.find(key);
    size_t from = 0;
    int64_t balance = 0;
    if (it != balance_cache_.end() && it->second.first <= col.cms.size()) {
        from = it->second.first;
        balance = it->second.second;
    }
    for (size_t i = from; i < col.cms.size(); i++) {
        auto v = extractor_.extract(col.cms[i], col.tks[i]);
        if (!v) throw Error("participant cannot extract own historical cell");
        balance += *v;
    }
    balance_cache_[key] = {col.cms.size(), balance};
    return balance;
}

int64_t Participant::confirmed_balance(std::string_view asset_id) const {
    auto it = balance_cache_.find(std::string(asset_id));
    return it == balance_cache_.end() ? 0 : it->second.second;
}

Endorsement Participant::fill_asset(const LedgerView& view, const Transaction& pre_tx,
                                    uint32_t asset_idx) {
    if (pre_tx.bound_row_count != view.row_count()) return RefusalReason::Stale;
    auto slot = pre_tx.slot_of(index_);
    if (!slot) throw InvalidInput("fill_asset: participant not in transaction");
    const Cell& cell = pre_tx.cells[asset_idx][*slot];
    const std::string& asset_id = pre_tx.asset_ids[asset_idx];

    auto value = extractor_.extract(cell.cm, cell.tk);
    if (!value) return RefusalReason::Extraction;

    bool self = initiated_.count(pre_tx.txid) > 0;
    PolicyContext pc{*value, pre_tx.txid, asset_id, kp_.pk, cell.cm, self};
    if (!policy_(pc)) {
        // a granted consent substitutes for self-initiation
        auto it = consents_.find({asset_id, *value});
        if (it == consents_.end()) return RefusalReason::Policy;
        consents_.erase(it);
    }

    uint64_t shift = reg_.asset(asset_id).issuer == index_ ? cfg_.issuer_shift() : 0;
    int64_t balance = balance_through(view, asset_id, pre_tx.bound_row_count) + *value;
    __int128 shifted = __int128(balance) + __int128(shift);
    if (shifted < 0 || (shifted >> cfg_.n_bits) != 0)
        return RefusalReason::InsufficientBalance;

    // fresh complementary pair
    Scalar r_prime = rng_.next_scalar();
    EndorsementData data;
    data.cm_prime = ck_.commit_i64(*value, r_prime);
    data.tk_prime = make_token(r_prime, kp_.pk);

    Transcript ctx = cell_context(pre_tx.txid, pre_tx.bound_row_count, pre_tx.genesis, asset_id,
                                  index_);
    data.consistency_prime =
        prove_consistency(ck_, data.cm_prime, data.tk_prime, kp_.pk, Scalar::from_i64(*value),
                          r_prime, ctx.fork("pi_C_prime"), rng_);
    // degenerate only when r' collides with the original blinding
    if (data.cm_prime.point == cell.cm.point) return fill_asset(view, pre_tx, asset_idx);
    data.equivalence = prove_equivalence(ck_, cell.cm, data.cm_prime, cell.tk, data.tk_prime,
                                         kp_.pk, kp_.sk, ctx.fork("pi_E"), rng_);
    ColumnHistory hist = view.column(index_, asset_id);
    data.asset = prove_asset(ck_, hist, cell.cm, cell.tk, balance, shift, kp_.sk, kp_.pk,
                             cfg_.n_bits, range_backend(cfg_.backend), ctx.fork("pi_A"), rng_);

    store_[{pre_tx.txid, asset_id}] = StoredOpening{*value, r_prime};
    return data;
}

// ---------------------------------------------------------------------------
// spend
// ---------------------------------------------------------------------------

SpendDraft build_draft(const CommitKey& ck, const Registry& reg, const LedgerConfig& cfg,
                       const ValueList& values, uint64_t bound_rows, bool genesis, Rng& rng) {
    values.validate(reg, genesis);
    const size_t n_parts = reg.participants.size();

    SpendDraft draft;
    draft.values = values;
    draft.pre_tx.genesis = genesis;
    draft.pre_tx.bound_row_count = bound_rows;
    draft.pre_tx.asset_ids = values.asset_ids;
    for (uint32_t p = 0; p < n_parts; p++) draft.pre_tx.participants.push_back(p);

    for (size_t a = 0; a < values.asset_ids.size(); a++) {
        std::vector<Cell> row(n_parts);
        std::vector<Scalar> blind(n_parts);
        Scalar r_sum = Scalar::zero();
        for (size_t p = 0; p < n_parts; p++) {
            Scalar r;
            if (genesis || p + 1 < n_parts) {
                r = rng.next_scalar();
                r_sum += r;
            } else {
                r = -r_sum;  // last participant closes the additive sharing
            }
            blind[p] = r;
            row[p].cm = ck.commit_i64(values.amounts[a][p], r);
            row[p].tk = make_token(r, reg.participants[p].pk);
        }
        draft.pre_tx.cells.push_back(std::move(row));
        draft.blindings.push_back(std::move(blind));
    }

    draft.pre_tx.txid = Transaction::compute_txid(draft.pre_tx);

    // consistency proofs (and issuer tokens) bind the final txid
    for (size_t a = 0; a < draft.pre_tx.cells.size(); a++) {
        for (size_t p = 0; p < n_parts; p++) {
            Cell& cell = draft.pre_tx.cells[a][p];
            Transcript ctx = cell_context(draft.pre_tx.txid, bound_rows, genesis,
                                          values.asset_ids[a], uint32_t(p));
            cell.consistency = prove_consistency(
                ck, cell.cm, cell.tk, reg.participants[p].pk,
                Scalar::from_i64(values.amounts[a][p]), draft.blindings[a][p],
                ctx.fork("pi_C"), rng);
            if (cfg.audit_issuer) {
                const GroupElement& issuer_pk = reg.participants[*cfg.audit_issuer].pk;
                IssuerToken it;
                it.token = make_token(draft.blindings[a][p], issuer_pk);
                it.consistency = prove_consistency(
                    ck, cell.cm, it.token, issuer_pk, Scalar::from_i64(values.amounts[a][p]),
                    draft.blindings[a][p], ctx.fork("pi_C_issuer"), rng);
                cell.issuer = std::move(it);
            }
        }
    }
    return draft;
}

SpendDraft exclude_and_rebalance(const CommitKey& ck, const Registry& reg,
                                 const LedgerConfig& cfg, const SpendDraft& draft,
                                 const std::set<uint32_t>& excluded, uint32_t sender_index,
                                 Rng& rng) {
    if (excluded.empty()) return draft;
    if (excluded.count(sender_index)) throw InvalidInput("exclusion: sender cannot drop itself");
    auto sender_slot = draft.pre_tx.slot_of(sender_index);
    if (!sender_slot) throw InvalidInput("exclusion: sender not in transaction");

    // fold the excluded blindings into the sender's cells; excluded values are
    // simply dropped (nonzero ones leave the balance product broken, which
    // verification catches rather than this function fixing it up)
    SpendDraft out;
    out.values.asset_ids = draft.values.asset_ids;
    out.pre_tx.genesis = draft.pre_tx.genesis;
    out.pre_tx.bound_row_count = draft.pre_tx.bound_row_count;
    out.pre_tx.asset_ids = draft.pre_tx.asset_ids;
    for (uint32_t p : draft.pre_tx.participants)
        if (!excluded.count(p)) out.pre_tx.participants.push_back(p);

    const size_t n_slots = draft.pre_tx.participants.size();
    for (size_t a = 0; a < draft.pre_tx.cells.size(); a++) {
        std::vector<Cell> row;
        std::vector<Scalar> blind;
        std::vector<int64_t> amounts;
        Scalar folded = Scalar::zero();
        for (size_t s = 0; s < n_slots; s++)
            if (excluded.count(draft.pre_tx.participants[s])) folded += draft.blindings[a][s];
        for (size_t s = 0; s < n_slots; s++) {
            uint32_t p = draft.pre_tx.participants[s];
            if (excluded.count(p)) continue;
            Scalar r = draft.blindings[a][s];
            int64_t v = draft.values.amounts[a][s];
            if (p == sender_index) r += folded;
            Cell cell;
            cell.cm = ck.commit_i64(v, r);
            cell.tk = make_token(r, reg.participants[p].pk);
            row.push_back(cell);
            blind.push_back(r);
            amounts.push_back(v);
        }
        out.pre_tx.cells.push_back(std::move(row));
        out.blindings.push_back(std::move(blind));
        out.values.amounts.push_back(std::move(amounts));
    }

    out.pre_tx.txid = Transaction::compute_txid(out.pre_tx);
    // the sender knows every remaining witness pre-endorsement, so it can
    // regenerate all consistency proofs against the new txid
    for (size_t a = 0; a < out.pre_tx.cells.size(); a++) {
        for (size_t s = 0; s < out.pre_tx.participants.size(); s++) {
            uint32_t p = out.pre_tx.participants[s];
            Cell& cell = out.pre_tx.cells[a][s];
            Transcript ctx = cell_context(out.pre_tx.txid, out.pre_tx.bound_row_count,
                                          out.pre_tx.genesis, out.values.asset_ids[a], p);
            cell.consistency = prove_consistency(ck, cell.cm, cell.tk, reg.participants[p].pk,
                                                 Scalar::from_i64(out.values.amounts[a][s]),
                                                 out.blindings[a][s], ctx.fork("pi_C"), rng);
            if (cfg.audit_issuer) {
                const GroupElement& issuer_pk = reg.participants[*cfg.audit_issuer].pk;
                IssuerToken it;
                it.token = make_token(out.blindings[a][s], issuer_pk);
                it.consistency = prove_consistency(ck, cell.cm, it.token, issuer_pk,
                                                   Scalar::from_i64(out.values.amounts[a][s]),
                                                   out.blindings[a][s],
                                                   ctx.fork("pi_C_issuer"), rng);
                cell.issuer = std::move(it);
            }
        }
    }
    return out;
}

std::variant<Transaction, SpendRefused> collect_endorsements(
    const SpendDraft& draft, const LedgerView& view, std::span<Participant* const> endorsers) {
    Transaction tx = draft.pre_tx;

    struct SlotResult {
        uint32_t participant;
        std::vector<std::pair<uint32_t, Endorsement>> per_asset;
    };

    // asynchronous proof generation: one task per endorser, each covering all
    // of its cells in asset order
    std::vector<std::future<SlotResult>> futures;
    for (uint32_t s = 0; s < tx.participants.size(); s++) {
        uint32_t p = tx.participants[s];
        Participant* endorser = nullptr;
        for (Participant* e : endorsers)
            if (e->index() == p) endorser = e;
        if (!endorser) throw InvalidInput("collect_endorsements: missing endorser");
        futures.push_back(std::async(std::launch::async, [endorser, &view, &tx]() {
            SlotResult res;
            res.participant = endorser->index();
            for (uint32_t a = 0; a < tx.asset_ids.size(); a++)
                res.per_asset.emplace_back(a, endorser->fill_asset(view, tx, a));
            return res;
        }));
    }

    std::optional<SpendRefused> refusal;
    for (auto& f : futures) {
        SlotResult res = f.get();
        auto slot = tx.slot_of(res.participant);
        for (auto& [a, en] : res.per_asset) {
            if (std::holds_alternative<RefusalReason>(en)) {
                if (!refusal)
                    refusal = SpendRefused{res.participant, tx.asset_ids[a],
                                           std::get<RefusalReason>(en)};
                continue;
            }
            auto& data = std::get<EndorsementData>(en);
            Cell& cell = tx.cells[a][*slot];
            cell.cm_prime = data.cm_prime;
            cell.tk_prime = data.tk_prime;
            cell.consistency_prime = data.consistency_prime;
            cell.equivalence = data.equivalence;
            cell.asset = data.asset;
        }
    }
    if (refusal) return *refusal;
    return tx;
}

std::variant<Transaction, SpendRefused> spend(const CommitKey& ck, const Registry& reg,
                                              const LedgerConfig& cfg, const ValueList& values,
                                              const LedgerView& view,
                                              std::span<Participant* const> endorsers,
                                              uint32_t sender_index, Rng& rng) {
    if (cfg.reduced_cells && !cfg.audit_issuer)
        throw InvalidInput("spend: reduced cells require an audit issuer");
    SpendDraft draft = build_draft(ck, reg, cfg, values, view.row_count(), false, rng);
    for (Participant* e : endorsers)
        if (e->index() == sender_index) e->mark_initiated(draft.pre_tx.txid);
    if (cfg.reduced_cells) return draft.pre_tx;  // issuer approves at append
    return collect_endorsements(draft, view, endorsers);
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

VerifyReport verify_transaction(const CommitKey& ck, const Registry& reg,
                                const LedgerConfig& cfg, const Transaction& tx,
                                const LedgerView& view) {
    VerifyReport report;

    // shape
    if (tx.asset_ids.empty() || tx.cells.size() != tx.asset_ids.size()) {
        report.fail("", -1, "shape");
        return report;
    }
    for (uint32_t i = 0; i + 1 < tx.participants.size(); i++)
        if (tx.participants[i] >= tx.participants[i + 1]) {
            report.fail("", -1, "shape");
            return report;
        }
    for (uint32_t p : tx.participants)
        if (p >= reg.participants.size()) {
            report.fail("", -1, "shape");
            return report;
        }
    for (size_t a = 0; a < tx.cells.size(); a++) {
        if (!reg.asset_index(tx.asset_ids[a])) {
            report.fail(tx.asset_ids[a], -1, "unknown-asset");
            return report;
        }
        if (tx.cells[a].size() != tx.participants.size()) {
            report.fail(tx.asset_ids[a], -1, "shape");
            return report;
        }
    }

    // genesis rows exist only at height zero
    if (tx.genesis && view.row_count() != 0) {
        report.fail("", -1, "genesis-flag");
        return report;
    }

    // transaction identifier must recompute from the cells
    if (Transaction::compute_txid(tx) != tx.txid) {
        report.fail("", -1, "txid");
        return report;
    }

    for (size_t a = 0; a < tx.cells.size(); a++) {
        const std::string& asset_id = tx.asset_ids[a];
        // balance product (genesis minting row exempt)
        if (!tx.genesis) {
            GroupElement prod = GroupElement::identity();
            for (const Cell& cell : tx.cells[a]) prod += cell.cm.point;
            if (!prod.is_identity()) report.fail(asset_id, -1, "balance-product");
        }

        for (uint32_t s = 0; s < tx.participants.size(); s++) {
            uint32_t p = tx.participants[s];
            const Cell& cell = tx.cells[a][s];
            const GroupElement& pk = reg.participants[p].pk;
            Transcript ctx =
                cell_context(tx.txid, tx.bound_row_count, tx.genesis, asset_id, p);

            if (!verify_consistency(ck, cell.cm, cell.tk, pk, cell.consistency,
                                    ctx.fork("pi_C")))
                report.fail(asset_id, int32_t(p), "pi_C");

            if (cfg.audit_issuer) {
                const GroupElement& issuer_pk = reg.participants[*cfg.audit_issuer].pk;
                if (!cell.issuer) {
                    report.fail(asset_id, int32_t(p), "issuer-token-missing");
                } else if (!verify_consistency(ck, cell.cm, cell.issuer->token, issuer_pk,
                                               cell.issuer->consistency,
                                               ctx.fork("pi_C_issuer"))) {
                    report.fail(asset_id, int32_t(p), "pi_C_issuer");
                }
            }

            if (cfg.reduced_cells) continue;  // plaintext issuer approval instead

            if (!cell.endorsed()) {
                report.fail(asset_id, int32_t(p), "not-endorsed");
                continue;
            }
            if (!verify_consistency(ck, *cell.cm_prime, *cell.tk_prime, pk,
                                    *cell.consistency_prime, ctx.fork("pi_C_prime")))
                report.fail(asset_id, int32_t(p), "pi_C_prime");
            if (!verify_equivalence(ck, cell.cm, *cell.cm_prime, cell.tk, *cell.tk_prime, pk,
                                    *cell.equivalence, ctx.fork("pi_E")))
                report.fail(asset_id, int32_t(p), "pi_E");

            uint64_t shift = reg.asset(asset_id).issuer == p ? cfg.issuer_shift() : 0;
            ColumnHistory hist = view.column(p, asset_id);
            if (!verify_asset(ck, hist, cell.cm, cell.tk, pk, *cell.asset, shift, cfg.n_bits,
                              range_backend(cfg.backend), ctx.fork("pi_A")))
                report.fail(asset_id, int32_t(p), "pi_A");
        }
    }
    return report;
}

}  // namespace padl
