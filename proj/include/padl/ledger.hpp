#pragma once

#include <filesystem>

#include "padl/pact.hpp"

#include <json.hpp>

namespace padl {

class Ledger;

// Plaintext approver for reduced-cell ledgers: the designated issuer extracts
// every cell through its audit tokens and enforces balances directly.
class IssuerApprover {
public:
    IssuerApprover(const CommitKey& ck, const Registry& reg, const LedgerConfig& cfg,
                   uint32_t issuer_index, KeyPair keys);

    struct Decision {
        bool approved;
        std::string reason;
    };
    Decision approve(const Ledger& ledger, const Transaction& tx);

    uint32_t issuer_index() const { return issuer_index_; }
    const GroupElement& pk() const { return keys_.pk; }

private:
    std::optional<int64_t> extract_cell(const Cell& cell) const;

    struct LedgerState {
        std::map<std::pair<uint32_t, std::string>, int64_t> balances;
        uint64_t synced_rows = 0;
    };
    LedgerState& sync(const Ledger& ledger);

    const Registry& reg_;
    const LedgerConfig& cfg_;
    uint32_t issuer_index_;
    KeyPair keys_;
    Extractor extractor_;
    // balances tracked per ledger instance (replicas sync independently)
    std::map<const Ledger*, LedgerState> states_;
};

// The append-only table: registries, transaction rows, rolling state hash.
class Ledger : public LedgerView {
public:
    Ledger(const CommitKey& ck, Registry reg, LedgerConfig cfg);

    struct AppendResult {
        bool accepted = false;
        std::string reason;  // empty when accepted
        VerifyReport report;
    };

    // Row 0 must be the genesis minting row; later rows must not be.
    AppendResult append(const Transaction& tx, IssuerApprover* approver = nullptr);

    // Config is immutable once any row exists.
    void reconfigure(LedgerConfig cfg);

    uint64_t row_count() const override { return rows_.size(); }
    ColumnHistory column(uint32_t participant, std::string_view asset_id) const override;
    std::vector<Commitment> column_complementary(uint32_t participant,
                                                 std::string_view asset_id) const override;

    const std::vector<Transaction>& rows() const { return rows_; }
    const Registry& registry() const { return reg_; }
    const LedgerConfig& config() const { return cfg_; }
    const CommitKey& commit_key() const { return ck_; }
    const Bytes32& state_hash() const { return state_hash_; }

    // Recomputes the hash chain from scratch over the given rows.
    static Bytes32 chain_state_hash(std::span<const Transaction> rows);

    // length-prefixed binary log + sidecar offset index
    void save(const std::filesystem::path& path) const;
    static Ledger load(const CommitKey& ck, const std::filesystem::path& path,
                       bool full_verify = false);
    // commit key taken from the file header
    static Ledger load(const std::filesystem::path& path, bool full_verify = false);

    nlohmann::json to_json() const;
    static Ledger from_json(const nlohmann::json& j);

private:
    CommitKey ck_;
    Registry reg_;
    LedgerConfig cfg_;
    std::vector<Transaction> rows_;
    Bytes32 state_hash_{};
};

// Builds the genesis row (issuer-minted initial holdings, endorsed by every
// account unless the ledger runs reduced cells) and appends it.
Ledger init_ledger(const CommitKey& ck, Registry reg, LedgerConfig cfg, const ValueList& initial,
                   std::span<Participant* const> endorsers, Rng& rng,
                   IssuerApprover* approver = nullptr);

nlohmann::json transaction_to_json(const Transaction& tx);
Transaction transaction_from_json(const nlohmann::json& j);
nlohmann::json registry_to_json(const Registry& reg);
Registry registry_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const LedgerConfig& cfg);
LedgerConfig config_from_json(const nlohmann::json& j);

}  // namespace padl
