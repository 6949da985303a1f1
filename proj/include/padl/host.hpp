#pragma once

#include <atomic>
#include <mutex>
#include <thread>

#include "padl/desk.hpp"

#include <json.hpp>

namespace padl {

// Ledger host: a single trusted sequencer exposing the transaction lifecycle
// and audit verification over HTTP+JSON (proof-carrying blobs ride as hex).
//
//   POST /create-ledger     {h, registry, config}
//   GET  /state             rows + state hash + registries
//   POST /register          {participant, url}   endorsement callback
//   POST /broadcast         {tx}  fans out to callbacks, collects En
//   POST /endorse-callback  {txid, participant, asset, endorsement} push path
//   GET  /endorsements      ?txid=hex
//   POST /append            {tx}
//   POST /audit/balance     audit request json
//   POST /audit/liquidity
//   POST /audit/rate
class HostService {
public:
    HostService();
    ~HostService();

    // reduced-cell ledgers need the issuer approver attached before appends
    void set_approver(IssuerApprover* approver) { approver_ = approver; }
    void set_endorse_timeout(int ms) { endorse_timeout_ms_ = ms; }
    void adopt_ledger(Ledger ledger);

    // binds the address (port 0 picks a free one); returns the bound port
    int start(const std::string& address = "127.0.0.1", int port = 0);
    void stop();
    std::string base_url() const;

    bool has_ledger() const;
    Ledger& ledger();

private:
    void routes();

    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::optional<Ledger> ledger_;
    mutable std::mutex mutex_;
    std::map<std::string, std::string> callbacks_;
    std::map<std::string, nlohmann::json> collected_;
    IssuerApprover* approver_ = nullptr;
    int endorse_timeout_ms_ = 2000;
    int port_ = 0;
};

// Serves one wallet's endorsement endpoint: POST /fill-asset {tx, asset}.
// The wallet endorses against the ledger view fetched from its host.
class ParticipantService {
public:
    ParticipantService(Participant& wallet, std::string host_url);
    ~ParticipantService();

    int start();
    void stop();
    std::string base_url() const;

    // artificial delay for dropped-party tests
    void set_delay_ms(int ms) { delay_ms_ = ms; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    Participant& wallet_;
    std::string host_url_;
    std::atomic<int> delay_ms_{0};
    int port_ = 0;
};

nlohmann::json endorsement_to_json(const Endorsement& en);
Endorsement endorsement_from_json(const nlohmann::json& j);

// Client-side driver for the endpoints.
class HostClient {
public:
    explicit HostClient(std::string base_url);

    void create_ledger(const CommitKey& ck, const Registry& reg, const LedgerConfig& cfg);
    nlohmann::json get_state();
    Ledger fetch_ledger();
    void register_callback(const std::string& participant_id, const std::string& url);
    // returns {endorsements: {...}, missing: [...]}
    nlohmann::json broadcast(const Transaction& pre_tx);
    void push_endorsement(const Bytes32& txid, uint32_t participant, const std::string& asset_id,
                          const nlohmann::json& endorsement);
    nlohmann::json endorsements(const Bytes32& txid);
    std::pair<bool, std::string> append(const Transaction& tx);
    bool verify_audit(const std::string& kind, const nlohmann::json& audit);

    // The full sender flow over the wire: draft, broadcast, assemble, append.
    // Participants that fail to endorse within the host timeout are excluded
    // (exclude_and_rebalance) when drop_missing is set.
    struct RemoteSpendResult {
        bool accepted = false;
        std::string reason;
        Transaction tx;
    };
    RemoteSpendResult remote_spend(const CommitKey& ck, const Registry& reg,
                                   const LedgerConfig& cfg, const ValueList& values,
                                   Participant& sender, Rng& rng, bool drop_missing = false);

private:
    std::string base_;
};

}  // namespace padl
