#pragma once

#include "padl/ledger.hpp"

namespace padl {

// Row range [from, to); an absent `to` means the full ledger.
struct TxRange {
    uint64_t from = 0;
    std::optional<uint64_t> to;

    uint64_t resolve_to(const Ledger& ledger) const {
        return to ? *to : ledger.row_count();
    }
};

// Proves the claimed per-asset balance against the on-ledger commitment and
// token products, without opening any transaction.
struct BalanceAudit {
    uint32_t participant;
    std::string asset_id;
    int64_t claimed;
    TxRange range;
    DlogEqualityProof proof;

    nlohmann::json to_json() const;
    static BalanceAudit from_json(const nlohmann::json& j);
};

BalanceAudit prove_balance(const Ledger& ledger, uint32_t participant,
                           const std::string& asset_id, const Scalar& sk, int64_t claimed,
                           TxRange range, Rng& rng);
bool verify_balance(const Ledger& ledger, const BalanceAudit& audit);

// Proves sum(asset a*) / sum(all assets) <= D/N over the account's
// complementary commitments, revealing neither sum.
struct LiquidityAudit {
    uint32_t participant;
    std::string target_asset;
    uint64_t d = 0, n = 0;  // threshold D/N
    Commitment c_r;
    RangeProof proof;

    nlohmann::json to_json() const;
    static LiquidityAudit from_json(const nlohmann::json& j);
};

LiquidityAudit prove_liquidity(const Ledger& ledger, const Participant& prover,
                               const std::string& target_asset, uint64_t d, uint64_t n,
                               Rng& rng);
bool verify_liquidity(const Ledger& ledger, const LiquidityAudit& audit);

// Proves sum over one transaction subset relates to the sum over another by
// the declared rational rate. Signs of the two sums are declared explicitly
// since coupon rows and principal rows come with opposite signs.
struct RateAudit {
    uint32_t participant;
    std::string asset_id;
    std::vector<uint64_t> txs1, txs2;  // disjoint row indices
    uint64_t d = 0, n = 0;             // rate D/N as |sum1|/|sum2| = D/N
    int8_t sign1 = 1, sign2 = 1;
    DlogEqualityProof proof;

    nlohmann::json to_json() const;
    static RateAudit from_json(const nlohmann::json& j);
};

RateAudit prove_rate(const Ledger& ledger, uint32_t participant, const std::string& asset_id,
                     const Scalar& sk, std::vector<uint64_t> txs1, std::vector<uint64_t> txs2,
                     uint64_t d, uint64_t n, int8_t sign1, int8_t sign2, Rng& rng);
bool verify_rate(const Ledger& ledger, const RateAudit& audit);

// Full audit through an issuer token: plaintext extraction of one cell.
struct CellAddress {
    uint64_t row;
    uint32_t participant;
    std::string asset_id;
};

int64_t full_audit_extract(const Ledger& ledger, const Extractor& issuer_extractor,
                           const GroupElement& issuer_pk, const CellAddress& address);

}  // namespace padl
