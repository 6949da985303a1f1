#include "padl/asset.hpp"

#include <cstring>

#include "padl/errors.hpp"

namespace padl {

Commitment aggregate_commitments(std::span<const Commitment> cms) {
    GroupElement acc = GroupElement::identity();
    for (const auto& cm : cms) acc += cm.point;
    return {acc};
}

Token aggregate_tokens(std::span<const Token> tks) {
    GroupElement acc = GroupElement::identity();
    for (const auto& tk : tks) acc += tk.point;
    return {acc};
}

Bytes AssetProof::to_bytes() const {
    Bytes out;
    Bytes32 cm_enc = cm_agg.point.encode();
    Bytes32 tk_enc = tk_agg.point.encode();
    out.insert(out.end(), cm_enc.begin(), cm_enc.end());
    out.insert(out.end(), tk_enc.begin(), tk_enc.end());
    Bytes c = consistency.to_bytes();
    out.insert(out.end(), c.begin(), c.end());
    Bytes e = equivalence.to_bytes();
    out.insert(out.end(), e.begin(), e.end());
    Bytes r = range.to_bytes();
    out.insert(out.end(), r.begin(), r.end());
    return out;
}

std::optional<AssetProof> AssetProof::from_bytes(std::span<const uint8_t> data) {
    if (data.size() < 32 + 32 + 128 + 64 + 7) return std::nullopt;
    AssetProof out;
    Bytes32 raw;
    std::memcpy(raw.data(), data.data(), 32);
    auto cm = GroupElement::decode(raw);
    if (!cm) return std::nullopt;
    out.cm_agg = {*cm};
    std::memcpy(raw.data(), data.data() + 32, 32);
    auto tk = GroupElement::decode(raw);
    if (!tk) return std::nullopt;
    out.tk_agg = {*tk};
    auto cons = ConsistencyProof::from_bytes(data.subspan(64, 128));
    if (!cons) return std::nullopt;
    out.consistency = *cons;
    auto equiv = EquivalenceProof::from_bytes(data.subspan(192, 64));
    if (!equiv) return std::nullopt;
    out.equivalence = *equiv;
    auto range = RangeProof::from_bytes(data.subspan(256));
    if (!range) return std::nullopt;
    out.range = *range;
    return out;
}

bool AssetProof::operator==(const AssetProof& o) const {
    return cm_agg == o.cm_agg && tk_agg == o.tk_agg && consistency == o.consistency &&
           equivalence == o.equivalence && range == o.range;
}

namespace {

void absorb_asset_context(Transcript& ctx, uint64_t shift, uint32_t n_bits) {
    ctx.absorb_u64("asset/shift", shift);
    ctx.absorb_u64("asset/n", n_bits);
}

}  // namespace

AssetProof prove_asset(const CommitKey& ck, const ColumnHistory& history,
                       const Commitment& current_cm, const Token& current_tk, int64_t balance,
                       uint64_t shift, const Scalar& sk, const GroupElement& pk, uint32_t n_bits,
                       const RangeProofBackendIface& backend, Transcript ctx, Rng& rng) {
    if (history.cms.size() != history.tks.size())
        throw InvalidInput("prove_asset: history shape mismatch");
    __int128 shifted_wide = __int128(balance) + __int128(shift);
    if (shifted_wide < 0)
        throw RangeError("prove_asset: negative resulting balance");
    uint64_t shifted = uint64_t(shifted_wide);
    if (n_bits < 64 && (shifted >> n_bits))
        throw RangeError("prove_asset: balance exceeds range bound");

    Commitment cm_pi = aggregate_commitments(history.cms);
    cm_pi.point += current_cm.point;
    cm_pi.point += ck.g.mul(Scalar::from_u64(shift));
    Token tk_pi = aggregate_tokens(history.tks);
    tk_pi.point += current_tk.point;

    absorb_asset_context(ctx, shift, n_bits);

    Scalar v_sum = Scalar::from_u64(shifted);
    AssetProof proof;
    Scalar r_pi;
    do {
        r_pi = rng.next_scalar();
        proof.cm_agg = ck.commit(v_sum, r_pi);
    } while (proof.cm_agg.point == cm_pi.point);  // degenerate equivalence base
    proof.tk_agg = make_token(r_pi, pk);

    proof.consistency = prove_consistency(ck, proof.cm_agg, proof.tk_agg, pk, v_sum, r_pi,
                                          ctx.fork("asset/consistency"), rng);
    proof.equivalence = prove_equivalence(ck, cm_pi, proof.cm_agg, tk_pi, proof.tk_agg, pk, sk,
                                          ctx.fork("asset/equivalence"), rng);
    proof.range = backend.prove(ck, v_sum, r_pi, n_bits, ctx.fork("asset/range"), rng);
    return proof;
}

bool verify_asset(const CommitKey& ck, const ColumnHistory& history, const Commitment& current_cm,
                  const Token& current_tk, const GroupElement& pk, const AssetProof& proof,
                  uint64_t shift, uint32_t n_bits, const RangeProofBackendIface& backend,
                  Transcript ctx) {
    if (history.cms.size() != history.tks.size()) return false;
    Commitment cm_pi = aggregate_commitments(history.cms);
    cm_pi.point += current_cm.point;
    cm_pi.point += ck.g.mul(Scalar::from_u64(shift));
    Token tk_pi = aggregate_tokens(history.tks);
    tk_pi.point += current_tk.point;

    absorb_asset_context(ctx, shift, n_bits);

    if (!verify_consistency(ck, proof.cm_agg, proof.tk_agg, pk, proof.consistency,
                            ctx.fork("asset/consistency")))
        return false;
    if (!verify_equivalence(ck, cm_pi, proof.cm_agg, tk_pi, proof.tk_agg, pk, proof.equivalence,
                            ctx.fork("asset/equivalence")))
        return false;
    return backend.verify(ck, proof.cm_agg, n_bits, proof.range, ctx.fork("asset/range"));
}

}  // namespace padl
