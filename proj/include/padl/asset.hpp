#pragma once

#include "padl/rangeproof.hpp"
#include "padl/sigma.hpp"

namespace padl {

// Anti-overspend proof: a fresh commitment to the aggregated balance, shown
// equivalent to the product of the account's on-ledger commitments, plus a
// range proof that the balance is in [0, 2^n). The fresh pair carries its own
// consistency proof; without it a malicious prover could pick the fresh token
// so that the equivalence relation holds for a wrong balance.
struct AssetProof {
    Commitment cm_agg;      // cm'_pi: fresh commitment to the aggregated balance
    Token tk_agg;           // tk'_pi: fresh token under the account key
    ConsistencyProof consistency;
    EquivalenceProof equivalence;
    RangeProof range;

    Bytes to_bytes() const;
    static std::optional<AssetProof> from_bytes(std::span<const uint8_t> data);
    bool operator==(const AssetProof& o) const;
};

// History of one (participant, asset) column as read from the ledger.
struct ColumnHistory {
    std::vector<Commitment> cms;
    std::vector<Token> tks;
};

// balance must equal the sum of historical values plus the current cell value
// (shifted by `shift` for issuer accounts). Throws RangeError when the
// resulting balance is outside [0, 2^n).
AssetProof prove_asset(const CommitKey& ck, const ColumnHistory& history,
                       const Commitment& current_cm, const Token& current_tk, int64_t balance,
                       uint64_t shift, const Scalar& sk, const GroupElement& pk, uint32_t n_bits,
                       const RangeProofBackendIface& backend, Transcript ctx, Rng& rng);

bool verify_asset(const CommitKey& ck, const ColumnHistory& history, const Commitment& current_cm,
                  const Token& current_tk, const GroupElement& pk, const AssetProof& proof,
                  uint64_t shift, uint32_t n_bits, const RangeProofBackendIface& backend,
                  Transcript ctx);

// Verifier-side aggregate, also used by audits.
Commitment aggregate_commitments(std::span<const Commitment> cms);
Token aggregate_tokens(std::span<const Token> tks);

}  // namespace padl
