#pragma once

#include "padl/audit.hpp"
#include "padl/desk.hpp"

namespace padl {

// Plaintext mirror of every accepted transaction, the oracle acceptance
// testing checks extraction and audits against.
class ShadowLedger {
public:
    void apply(const Registry& reg, const ValueList& values);
    int64_t balance(uint32_t participant, const std::string& asset_id) const;
    int64_t balance(const Registry& reg, const std::string& participant_id,
                    const std::string& asset_id) const;

private:
    std::map<std::pair<uint32_t, std::string>, int64_t> balances_;
};

// The experiment oracle surface: account registration, posting, spending,
// corruption, policy injection, and state retrieval, with the excluded
// challenge-transaction list.
class OracleWorld {
public:
    OracleWorld(std::vector<std::pair<std::string, std::string>> assets_with_issuers,
                LedgerConfig cfg, Rng rng);

    // Exp.AddAcc: generates a key pair, registers the account, returns its
    // address. Only valid before the ledger starts (the registry is fixed at
    // genesis).
    GroupElement add_account(const std::string& id);

    const CommitKey& ck() const { return ck_; }

    // creates the ledger with the given (or all-zero) genesis holdings
    void start(const std::map<std::string, std::map<std::string, int64_t>>& initial = {});

    // Exp.PostTx: verify and append; excluded or failing transactions return
    // false and leave the ledger unchanged.
    bool post_tx(const Transaction& tx);

    // Exp.Spend: builds a transaction from the amount list and posts it.
    std::optional<Transaction> oracle_spend(
        const std::string& sender_id,
        const std::map<std::string, std::map<std::string, int64_t>>& values);

    // Exp.Corrupt: surrenders the secret key. Throws on unknown addresses.
    Scalar corrupt(const GroupElement& pk);

    // Exp.Policy
    void set_policy(const std::string& id, Policy policy);

    // Exp.Latest
    std::pair<std::vector<GroupElement>, const std::vector<Transaction>*> latest() const;

    void exclude_tx(const Bytes32& txid) { excluded_.insert(txid); }
    bool is_corrupted(const GroupElement& pk) const;

    Desk& desk() { return *desk_; }
    ShadowLedger& shadow() { return shadow_; }

private:
    std::vector<std::pair<std::string, KeyPair>> pending_;
    std::vector<std::pair<std::string, std::string>> assets_;
    LedgerConfig cfg_;
    CommitKey ck_;
    Rng rng_;
    std::unique_ptr<Desk> desk_;
    ShadowLedger shadow_;
    std::set<Bytes32> excluded_;
    std::vector<GroupElement> corrupted_;
};

struct HarnessCase {
    std::string name;
    bool pass;
    std::string detail;
};

struct HarnessReport {
    std::string battery;
    Bytes32 seed{};
    std::vector<HarnessCase> cases;

    bool all_pass() const;
    nlohmann::json to_json() const;
    std::string to_table() const;
};

// Tamper catalog mapped from the integrity invariants: overspends, imbalance
// injection, foreign-key endorsements, proof mutations, replays, omitted
// history. Every case must be rejected.
HarnessReport run_integrity_battery(const Bytes32& seed, RangeBackend backend);

// Mechanics of the anonymity game: the trivial-exclusion rules, challenge
// bookkeeping, and a plaintext scan of the challenge bytes.
HarnessReport run_anonymity_mechanics(const Bytes32& seed, RangeBackend backend);

}  // namespace padl
