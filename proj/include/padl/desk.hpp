#pragma once

#include <memory>

#include "padl/ledger.hpp"

namespace padl {

// An in-process world: one ledger plus every participant's wallet. This is
// what the scenario runner, the benchmarks and most tests drive.
class Desk {
public:
    Desk(const std::vector<std::string>& participant_ids,
         const std::vector<std::pair<std::string, std::string>>& assets_with_issuers,
         LedgerConfig cfg, Rng rng);

    // world with externally created keys (oracle games, CLI keystores)
    Desk(const CommitKey& ck, const std::vector<std::pair<std::string, KeyPair>>& wallets,
         const std::vector<std::pair<std::string, std::string>>& assets_with_issuers,
         LedgerConfig cfg, Rng rng);

    // wallets keep references into the desk
    Desk(const Desk&) = delete;
    Desk& operator=(const Desk&) = delete;

    // Genesis row from initial holdings: asset id -> (participant id -> amount).
    void init(const std::map<std::string, std::map<std::string, int64_t>>& initial);

    struct TransferResult {
        enum class Status { Accepted, Refused, Rejected } status;
        Transaction tx;
        SpendRefused refusal{};
        std::string reject_reason;
        bool ok() const { return status == Status::Accepted; }
    };

    TransferResult transfer(const std::string& sender_id,
                            const std::map<std::string, std::map<std::string, int64_t>>& values);

    // Appends an externally built transaction (tamper tests, host flows).
    Ledger::AppendResult append(const Transaction& tx);

    ValueList make_values(const std::map<std::string, std::map<std::string, int64_t>>& values,
                          bool genesis = false) const;

    // Owner extraction of a full column.
    int64_t balance_of(const std::string& participant_id, const std::string& asset_id) const;

    Ledger& ledger() { return *ledger_; }
    const Ledger& ledger() const { return *ledger_; }
    bool has_ledger() const { return ledger_.has_value(); }
    Participant& participant(const std::string& id);
    const Registry& registry() const { return reg_; }
    const LedgerConfig& config() const { return cfg_; }
    const CommitKey& ck() const { return ck_; }
    IssuerApprover* approver() { return approver_ ? approver_.get() : nullptr; }
    Rng& rng() { return rng_; }
    std::vector<Participant*> endorsers();

private:
    void init_world(const CommitKey& ck,
                    const std::vector<std::pair<std::string, KeyPair>>& wallets,
                    const std::vector<std::pair<std::string, std::string>>& assets_with_issuers);

    CommitKey ck_;
    Registry reg_;
    LedgerConfig cfg_;
    Rng rng_;
    std::vector<std::unique_ptr<Participant>> participants_;
    std::unique_ptr<IssuerApprover> approver_;
    std::optional<Ledger> ledger_;
};

}  // namespace padl
