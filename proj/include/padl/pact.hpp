#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "padl/asset.hpp"
#include "padl/rangeproof.hpp"
#include "padl/sigma.hpp"

namespace padl {

struct ParticipantSpec {
    std::string id;
    GroupElement pk;
};

struct AssetSpec {
    std::string id;
    uint32_t issuer;  // participant index allowed to run negative in this asset
};

struct Registry {
    std::vector<ParticipantSpec> participants;
    std::vector<AssetSpec> assets;

    std::optional<uint32_t> participant_index(std::string_view id) const;
    std::optional<uint32_t> asset_index(std::string_view id) const;
    const AssetSpec& asset(std::string_view id) const;
};

struct LedgerConfig {
    uint32_t n_bits = 32;
    RangeBackend backend = RangeBackend::Bulletproof;
    // settlement mode: cells reduce to {cm, tk, pi_C, tk_I, pi_C_I}, no
    // endorsement round, the audit issuer approves appends in plaintext
    bool reduced_cells = false;
    // participant whose key is attached to every cell as an audit token
    std::optional<uint32_t> audit_issuer;
    uint64_t extract_max = uint64_t(1) << 20;

    // issuers may run their own asset down to -2^(n_bits-1)
    uint64_t issuer_shift() const { return uint64_t(1) << (n_bits - 1); }
};

// Extra token under a trusted party's key, enabling full audit of the cell.
struct IssuerToken {
    Token token;
    ConsistencyProof consistency;
    bool operator==(const IssuerToken& o) const {
        return token == o.token && consistency == o.consistency;
    }
};

struct Cell {
    Commitment cm;
    Token tk;
    ConsistencyProof consistency;  // pi_C, present from spend
    // filled by endorsement
    std::optional<Commitment> cm_prime;
    std::optional<Token> tk_prime;
    std::optional<ConsistencyProof> consistency_prime;
    std::optional<EquivalenceProof> equivalence;
    std::optional<AssetProof> asset;
    // settlement extension
    std::optional<IssuerToken> issuer;

    bool endorsed() const {
        return cm_prime && tk_prime && consistency_prime && equivalence && asset;
    }
};

struct Transaction {
    Bytes32 txid{};
    uint64_t bound_row_count = 0;  // ledger height the proofs bind to
    bool genesis = false;
    std::vector<std::string> asset_ids;
    std::vector<uint32_t> participants;       // registry indices, ascending
    std::vector<std::vector<Cell>> cells;     // [asset][participant slot]

    std::optional<uint32_t> slot_of(uint32_t participant_index) const;

    Bytes to_bytes() const;
    static std::optional<Transaction> from_bytes(std::span<const uint8_t> data);
    // Hash of the commitment-token pairs (asset-major, registry order).
    static Bytes32 compute_txid(const Transaction& tx);
};

// Per-asset amounts over the full registry, zero-padded; each asset sums to 0.
struct ValueList {
    std::vector<std::string> asset_ids;
    std::vector<std::vector<int64_t>> amounts;  // [asset][participant]

    void validate(const Registry& reg, bool genesis) const;
};

struct PolicyContext {
    int64_t amount;
    Bytes32 txid;
    std::string asset_id;
    GroupElement pk;
    Commitment cm;
    bool self_initiated;
};
using Policy = std::function<bool(const PolicyContext&)>;

// accepts deposits always, withdrawals only from the initiating account
Policy default_policy();

enum class RefusalReason { Policy, InsufficientBalance, Extraction, Stale };
const char* refusal_name(RefusalReason r);

struct EndorsementData {
    Commitment cm_prime;
    Token tk_prime;
    ConsistencyProof consistency_prime;
    EquivalenceProof equivalence;
    AssetProof asset;
};
using Endorsement = std::variant<EndorsementData, RefusalReason>;

// Read-only ledger state an endorser or verifier trusts.
class LedgerView {
public:
    virtual ~LedgerView() = default;
    virtual uint64_t row_count() const = 0;
    virtual ColumnHistory column(uint32_t participant, std::string_view asset_id) const = 0;
    // complementary commitments of one column, for liquidity audits
    virtual std::vector<Commitment> column_complementary(uint32_t participant,
                                                         std::string_view asset_id) const = 0;
};

// Transcript context every proof of a cell binds to.
Transcript cell_context(const Bytes32& txid, uint64_t bound_rows, bool genesis,
                        std::string_view asset_id, uint32_t participant_index);

// ---------------------------------------------------------------------------
// mint / extract
// ---------------------------------------------------------------------------

struct Minted {
    Commitment cm;
    Scalar r;
};
// |v| must be < 2^n_bits; negative amounts ride as l - |v|.
Minted mint(const CommitKey& ck, int64_t v, uint32_t n_bits, Rng& rng);

// Brute-force discrete-log recovery of a small committed value, baby-step
// giant-step over the account base g^sk.
class Extractor {
public:
    Extractor(const CommitKey& ck, const Scalar& sk, uint64_t max_magnitude);
    std::optional<int64_t> extract(const Commitment& cm, const Token& tk) const;
    uint64_t max_magnitude() const { return max_; }

private:
    Scalar sk_;
    GroupElement base_;  // g^sk
    uint64_t max_, m_;
    std::map<PointKey, int64_t> table_;
};

std::optional<int64_t> extract_value(const CommitKey& ck, const Commitment& cm, const Token& tk,
                                     const Scalar& sk, uint64_t max_magnitude);

// ---------------------------------------------------------------------------
// participant wallet: endorsement, extraction cache, complementary store
// ---------------------------------------------------------------------------

class Participant {
public:
    Participant(const CommitKey& ck, const Registry& reg, const LedgerConfig& cfg,
                uint32_t index, KeyPair kp, Rng rng);

    uint32_t index() const { return index_; }
    const KeyPair& keys() const { return kp_; }
    const GroupElement& pk() const { return kp_.pk; }
    void set_policy(Policy p) { policy_ = std::move(p); }

    // the sender marks transactions it initiated before broadcasting
    void mark_initiated(const Bytes32& txid) { initiated_.insert(txid); }

    // One-shot allowance for a negative amount in a transaction initiated by
    // somebody else: the owner inspected the deal and agrees to exactly this
    // (asset, amount) pair. Consumed by the next matching endorsement.
    void grant_consent(const std::string& asset_id, int64_t amount) {
        consents_.insert({asset_id, amount});
    }

    // Non-consuming probe of the endorsement policy (exclusion rules of the
    // anonymity game use it to spot values an account would never endorse).
    bool policy_allows(const std::string& asset_id, int64_t amount) const {
        PolicyContext pc{amount, Bytes32{}, asset_id, kp_.pk, Commitment{}, false};
        if (policy_(pc)) return true;
        return consents_.find({asset_id, amount}) != consents_.end();
    }

    // Extract own cell value, apply policy, check the resulting balance and
    // produce the endorsement data for one (asset, cell).
    Endorsement fill_asset(const LedgerView& view, const Transaction& pre_tx, uint32_t asset_idx);

    std::optional<int64_t> extract(const Commitment& cm, const Token& tk) const {
        return extractor_.extract(cm, tk);
    }

    // complementary-randomness store: (txid, asset) -> (value, r')
    struct StoredOpening {
        int64_t value;
        Scalar r_prime;
    };
    const std::map<std::pair<Bytes32, std::string>, StoredOpening>& openings() const {
        return store_;
    }

    // plaintext balance this wallet believes it holds (synced against views)
    int64_t confirmed_balance(std::string_view asset_id) const;

private:
    int64_t balance_through(const LedgerView& view, std::string_view asset_id,
                            uint64_t rows) const;

    const CommitKey& ck_;
    const Registry& reg_;
    const LedgerConfig& cfg_;
    uint32_t index_;
    KeyPair kp_;
    Policy policy_;
    Rng rng_;
    Extractor extractor_;
    std::set<Bytes32> initiated_;
    std::multiset<std::pair<std::string, int64_t>> consents_;
    std::map<std::pair<Bytes32, std::string>, StoredOpening> store_;
    // extraction cache per (asset, rows synced)
    mutable std::map<std::string, std::pair<uint64_t, int64_t>, std::less<>> balance_cache_;
};

// ---------------------------------------------------------------------------
// spend / endorse round / verify / exclusion
// ---------------------------------------------------------------------------

// Sender-side pre-endorsement state: the broadcast transaction plus the
// blinding factors only the sender knows.
struct SpendDraft {
    Transaction pre_tx;
    std::vector<std::vector<Scalar>> blindings;  // [asset][slot]
    ValueList values;
};

SpendDraft build_draft(const CommitKey& ck, const Registry& reg, const LedgerConfig& cfg,
                       const ValueList& values, uint64_t bound_rows, bool genesis, Rng& rng);

// Drops the excluded participants (their committed values must be zero) and
// folds their blindings into the sender's cells. The result is a fresh draft
// with a new txid; endorsement runs again on it.
SpendDraft exclude_and_rebalance(const CommitKey& ck, const Registry& reg,
                                 const LedgerConfig& cfg, const SpendDraft& draft,
                                 const std::set<uint32_t>& excluded, uint32_t sender_index,
                                 Rng& rng);

struct SpendRefused {
    uint32_t participant;
    std::string asset_id;
    RefusalReason reason;
};

// Endorsement collection across in-process participants (concurrent across
// endorsers). Returns the fully endorsed transaction or the first refusal.
std::variant<Transaction, SpendRefused> collect_endorsements(
    const SpendDraft& draft, const LedgerView& view, std::span<Participant* const> endorsers);

// Full spend flow: draft, broadcast, endorse, assemble.
std::variant<Transaction, SpendRefused> spend(const CommitKey& ck, const Registry& reg,
                                              const LedgerConfig& cfg, const ValueList& values,
                                              const LedgerView& view,
                                              std::span<Participant* const> endorsers,
                                              uint32_t sender_index, Rng& rng);

struct CheckFailure {
    std::string asset_id;
    int32_t participant;  // -1 when not cell-specific
    std::string check;
};

struct VerifyReport {
    bool ok = true;
    std::vector<CheckFailure> failures;

    void fail(std::string asset, int32_t p, std::string check) {
        ok = false;
        failures.push_back({std::move(asset), p, std::move(check)});
    }
};

VerifyReport verify_transaction(const CommitKey& ck, const Registry& reg,
                                const LedgerConfig& cfg, const Transaction& tx,
                                const LedgerView& view);

}  // namespace padl
