#include "padl/host.hpp"

#include <future>

#include <httplib.h>

#include "padl/audit.hpp"

using nlohmann::json;

namespace padl {

namespace {

json tx_envelope(const Transaction& tx) { return {{"tx", to_hex(tx.to_bytes())}}; }

std::optional<Transaction> tx_from_envelope(const json& j) {
    if (!j.contains("tx")) return std::nullopt;
    return Transaction::from_bytes(from_hex(j.at("tx").get<std::string>()));
}

void reply_error(httplib::Response& res, int code, const std::string& message) {
    res.status = code;
    res.set_content(json{{"error", message}}.dump(), "application/json");
}

void reply_json(httplib::Response& res, const json& j) {
    res.set_content(j.dump(), "application/json");
}

}  // namespace

json endorsement_to_json(const Endorsement& en) {
    if (std::holds_alternative<RefusalReason>(en))
        return {{"refusal", refusal_name(std::get<RefusalReason>(en))}};
    const auto& d = std::get<EndorsementData>(en);
    return {{"cm_prime", to_hex(d.cm_prime.point.encode())},
            {"tk_prime", to_hex(d.tk_prime.point.encode())},
            {"pi_c_prime", to_hex(d.consistency_prime.to_bytes())},
            {"pi_e", to_hex(d.equivalence.to_bytes())},
            {"pi_a", to_hex(d.asset.to_bytes())}};
}

Endorsement endorsement_from_json(const json& j) {
    if (j.contains("refusal")) {
        std::string name = j.at("refusal").get<std::string>();
        if (name == "policy") return RefusalReason::Policy;
        if (name == "insufficient-balance") return RefusalReason::InsufficientBalance;
        if (name == "stale") return RefusalReason::Stale;
        return RefusalReason::Extraction;
    }
    EndorsementData d;
    auto cm = GroupElement::decode(array_from_hex<32>(j.at("cm_prime").get<std::string>()));
    auto tk = GroupElement::decode(array_from_hex<32>(j.at("tk_prime").get<std::string>()));
    auto pc = ConsistencyProof::from_bytes(from_hex(j.at("pi_c_prime").get<std::string>()));
    auto pe = EquivalenceProof::from_bytes(from_hex(j.at("pi_e").get<std::string>()));
    auto pa = AssetProof::from_bytes(from_hex(j.at("pi_a").get<std::string>()));
    if (!cm || !tk || !pc || !pe || !pa) throw DecodeError("endorsement json: bad fields");
    d.cm_prime = {*cm};
    d.tk_prime = {*tk};
    d.consistency_prime = *pc;
    d.equivalence = *pe;
    d.asset = *pa;
    return d;
}

// ---------------------------------------------------------------------------
// host service
// ---------------------------------------------------------------------------

struct HostService::Impl {
    httplib::Server server;
    std::thread thread;
};

HostService::HostService() : impl_(std::make_unique<Impl>()) { routes(); }

HostService::~HostService() { stop(); }

void HostService::adopt_ledger(Ledger ledger) {
    std::lock_guard lock(mutex_);
    ledger_.emplace(std::move(ledger));
}

bool HostService::has_ledger() const {
    std::lock_guard lock(mutex_);
    return ledger_.has_value();
}

Ledger& HostService::ledger() {
    if (!ledger_) throw Error("host: no ledger");
    return *ledger_;
}

int HostService::start(const std::string& address, int port) {
    if (port == 0) {
        port_ = impl_->server.bind_to_any_port(address);
    } else {
        if (!impl_->server.bind_to_port(address, port))
            throw Error("host: cannot bind " + address + ":" + std::to_string(port));
        port_ = port;
    }
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return port_;
}

void HostService::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
    if (impl_ && impl_->thread.joinable()) impl_->thread.join();
}

std::string HostService::base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }

void HostService::routes() {
    auto& server = impl_->server;

    server.Post("/create-ledger", [this](const httplib::Request& req, httplib::Response& res) {
        try {
            json j = json::parse(req.body);
            auto h = GroupElement::decode(array_from_hex<32>(j.at("h").get<std::string>()));
            if (!h) return reply_error(res, 400, "bad commit key");
            CommitKey ck{GroupElement::base(), *h};
            Registry reg = registry_from_json(j.at("registry"));
            LedgerConfig cfg = config_from_json(j.at("config"));
            std::lock_guard lock(mutex_);
            if (ledger_) return reply_error(res, 409, "ledger already exists");
            ledger_.emplace(ck, std::move(reg), std::move(cfg));
            reply_json(res, {{"ok", true}});
        } catch (const std::exception& e) {
            reply_error(res, 400, e.what());
        }
    });

    server.Get("/state", [this](const httplib::Request&, httplib::Response& res) {
        std::lock_guard lock(mutex_);
        if (!ledger_) return reply_error(res, 404, "no ledger");
        reply_json(res, ledger_->to_json());
    });

    server.Post("/register", [this](const httplib::Request& req, httplib::Response& res) {
        try {
            json j = json::parse(req.body);
            std::lock_guard lock(mutex_);
            callbacks_[j.at("participant").get<std::string>()] = j.at("url").get<std::string>();
            reply_json(res, {{"ok", true}});
        } catch (const std::exception& e) {
            reply_error(res, 400, e.what());
        }
    });

    server.Post("/broadcast", [this](const httplib::Request& req, httplib::Response& res) {
        try {
            json j = json::parse(req.body);
            auto tx = tx_from_envelope(j);
            if (!tx) return reply_error(res, 400, "malformed transaction");
            std::map<std::string, std::string> callbacks;
            {
                std::lock_guard lock(mutex_);
                if (!ledger_) return reply_error(res, 404, "no ledger");
                callbacks = callbacks_;
            }
            // concurrent fan-out to every registered endorser
            std::string body = tx_envelope(*tx).dump();
            std::vector<std::pair<std::string, std::future<std::optional<json>>>> futures;
            for (const auto& [pid, url] : callbacks) {
                futures.emplace_back(
                    pid, std::async(std::launch::async, [url, body, this]() -> std::optional<json> {
                        httplib::Client client(url);
                        client.set_connection_timeout(0, endorse_timeout_ms_ * 1000);
                        client.set_read_timeout(endorse_timeout_ms_ / 1000,
                                                (endorse_timeout_ms_ % 1000) * 1000);
                        auto r = client.Post("/fill-asset", body, "application/json");
                        if (!r || r->status != 200) return std::nullopt;
                        return json::parse(r->body);
                    }));
            }
            json endorsements = json::object();
            for (auto& [pid, fut] : futures) {
                auto result = fut.get();
                if (result) endorsements[pid] = *result;
            }
            // missing covers everyone in the transaction without an answer,
            // registered or not
            json missing = json::array();
            {
                std::lock_guard lock(mutex_);
                for (uint32_t p : tx->participants) {
                    if (p >= ledger_->registry().participants.size()) continue;
                    const std::string& pid = ledger_->registry().participants[p].id;
                    if (!endorsements.contains(pid)) missing.push_back(pid);
                }
            }
            json out = {{"endorsements", endorsements}, {"missing", missing}};
            {
                std::lock_guard lock(mutex_);
                collected_[to_hex(tx->txid)] = out;
            }
            reply_json(res, out);
        } catch (const std::exception& e) {
            reply_error(res, 400, e.what());
        }
    });

    server.Post("/endorse-callback", [this](const httplib::Request& req, httplib::Response& res) {
        try {
            json j = json::parse(req.body);
            std::string txid = j.at("txid").get<std::string>();
            std::string participant = std::to_string(j.at("participant").get<uint32_t>());
            std::lock_guard lock(mutex_);
            collected_[txid]["endorsements"][participant][j.at("asset").get<std::string>()] =
                j.at("endorsement");
            reply_json(res, {{"ok", true}});
        } catch (const std::exception& e) {
            reply_error(res, 400, e.what());
        }
    });

    server.Get("/endorsements", [this](const httplib::Request& req, httplib::Response& res) {
        auto txid = req.get_param_value("txid");
        std::lock_guard lock(mutex_);
        auto it = collected_.find(txid);
        if (it == collected_.end()) return reply_error(res, 404, "unknown transaction");
        reply_json(res, it->second);
    });

    server.Post("/append", [this](const httplib::Request& req, httplib::Response& res) {
        try {
            json j = json::parse(req.body);
            auto tx = tx_from_envelope(j);
            if (!tx) return reply_error(res, 400, "malformed transaction");
            std::lock_guard lock(mutex_);  // appends serialize through one writer
            if (!ledger_) return reply_error(res, 404, "no ledger");
            auto result = ledger_->append(*tx, approver_);
            json failures = json::array();
            for (const auto& f : result.report.failures)
                failures.push_back(
                    {{"asset", f.asset_id}, {"participant", f.participant}, {"check", f.check}});
            json out = {{"accepted", result.accepted},
                        {"reason", result.reason},
                        {"failures", failures},
                        {"height", ledger_->row_count()},
                        {"state_hash", to_hex(ledger_->state_hash())}};
            if (!result.accepted) res.status = 422;
            reply_json(res, out);
        } catch (const std::exception& e) {
            reply_error(res, 400, e.what());
        }
    });

    auto audit_route = [this](const std::string& kind) {
        return [this, kind](const httplib::Request& req, httplib::Response& res) {
            try {
                json j = json::parse(req.body);
                std::lock_guard lock(mutex_);
                if (!ledger_) return reply_error(res, 404, "no ledger");
                bool accepted = false;
                if (kind == "balance")
                    accepted = verify_balance(*ledger_, BalanceAudit::from_json(j));
                else if (kind == "liquidity")
                    accepted = verify_liquidity(*ledger_, LiquidityAudit::from_json(j));
                else
                    accepted = verify_rate(*ledger_, RateAudit::from_json(j));
                reply_json(res, {{"accepted", accepted}});
            } catch (const std::exception& e) {
                reply_error(res, 400, e.what());
            }
        };
    };
    server.Post("/audit/balance", audit_route("balance"));
    server.Post("/audit/liquidity", audit_route("liquidity"));
    server.Post("/audit/rate", audit_route("rate"));
}

// ---------------------------------------------------------------------------
// participant endorsement service
// ---------------------------------------------------------------------------

struct ParticipantService::Impl {
    httplib::Server server;
    std::thread thread;
};

ParticipantService::ParticipantService(Participant& wallet, std::string host_url)
    : impl_(std::make_unique<Impl>()), wallet_(wallet), host_url_(std::move(host_url)) {
    impl_->server.Post("/fill-asset", [this](const httplib::Request& req,
                                             httplib::Response& res) {
        try {
            if (delay_ms_ > 0)
                std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms_.load()));
            json j = json::parse(req.body);
            auto tx = tx_from_envelope(j);
            if (!tx) return reply_error(res, 400, "malformed transaction");
            // endorse against the host's current view
            HostClient host(host_url_);
            Ledger view = host.fetch_ledger();
            json out = json::object();
            for (uint32_t a = 0; a < tx->asset_ids.size(); a++) {
                Endorsement en = wallet_.fill_asset(view, *tx, a);
                out[tx->asset_ids[a]] = endorsement_to_json(en);
            }
            reply_json(res, out);
        } catch (const std::exception& e) {
            reply_error(res, 400, e.what());
        }
    });
}

ParticipantService::~ParticipantService() { stop(); }

int ParticipantService::start() {
    port_ = impl_->server.bind_to_any_port("127.0.0.1");
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return port_;
}

void ParticipantService::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
    if (impl_ && impl_->thread.joinable()) impl_->thread.join();
}

std::string ParticipantService::base_url() const {
    return "http://127.0.0.1:" + std::to_string(port_);
}

// ---------------------------------------------------------------------------
// client
// ---------------------------------------------------------------------------

HostClient::HostClient(std::string base_url) : base_(std::move(base_url)) {}

namespace {

json must_json(const httplib::Result& r, const std::string& what) {
    if (!r) throw Error("host client: no response from " + what);
    json j = json::parse(r->body, nullptr, false);
    if (j.is_discarded()) throw Error("host client: bad json from " + what);
    if (r->status >= 400 && j.contains("error"))
        throw Error("host client: " + what + ": " + j.at("error").get<std::string>());
    return j;
}

}  // namespace

void HostClient::create_ledger(const CommitKey& ck, const Registry& reg,
                               const LedgerConfig& cfg) {
    httplib::Client client(base_);
    json body = {{"h", to_hex(ck.h.encode())},
                 {"registry", registry_to_json(reg)},
                 {"config", config_to_json(cfg)}};
    must_json(client.Post("/create-ledger", body.dump(), "application/json"), "create-ledger");
}

json HostClient::get_state() {
    httplib::Client client(base_);
    return must_json(client.Get("/state"), "state");
}

Ledger HostClient::fetch_ledger() { return Ledger::from_json(get_state()); }

void HostClient::register_callback(const std::string& participant_id, const std::string& url) {
    httplib::Client client(base_);
    json body = {{"participant", participant_id}, {"url", url}};
    must_json(client.Post("/register", body.dump(), "application/json"), "register");
}

json HostClient::broadcast(const Transaction& pre_tx) {
    httplib::Client client(base_);
    client.set_read_timeout(60, 0);
    return must_json(client.Post("/broadcast", tx_envelope(pre_tx).dump(), "application/json"),
                     "broadcast");
}

void HostClient::push_endorsement(const Bytes32& txid, uint32_t participant,
                                  const std::string& asset_id, const json& endorsement) {
    httplib::Client client(base_);
    json body = {{"txid", to_hex(txid)},
                 {"participant", participant},
                 {"asset", asset_id},
                 {"endorsement", endorsement}};
    must_json(client.Post("/endorse-callback", body.dump(), "application/json"),
              "endorse-callback");
}

json HostClient::endorsements(const Bytes32& txid) {
    httplib::Client client(base_);
    return must_json(client.Get(("/endorsements?txid=" + to_hex(txid)).c_str()), "endorsements");
}

std::pair<bool, std::string> HostClient::append(const Transaction& tx) {
    httplib::Client client(base_);
    client.set_read_timeout(60, 0);
    auto r = client.Post("/append", tx_envelope(tx).dump(), "application/json");
    if (!r) throw Error("host client: no response from append");
    json j = json::parse(r->body);
    return {j.at("accepted").get<bool>(),
            j.contains("reason") ? j.at("reason").get<std::string>() : ""};
}

bool HostClient::verify_audit(const std::string& kind, const json& audit) {
    httplib::Client client(base_);
    auto j = must_json(client.Post(("/audit/" + kind).c_str(), audit.dump(), "application/json"),
                       "audit");
    return j.at("accepted").get<bool>();
}

HostClient::RemoteSpendResult HostClient::remote_spend(const CommitKey& ck, const Registry& reg,
                                                       const LedgerConfig& cfg,
                                                       const ValueList& values,
                                                       Participant& sender, Rng& rng,
                                                       bool drop_missing) {
    RemoteSpendResult out;
    Ledger view = fetch_ledger();
    SpendDraft draft = build_draft(ck, reg, cfg, values, view.row_count(), false, rng);
    sender.mark_initiated(draft.pre_tx.txid);

    if (cfg.reduced_cells) {
        auto [accepted, reason] = append(draft.pre_tx);
        out.accepted = accepted;
        out.reason = reason;
        out.tx = draft.pre_tx;
        return out;
    }

    json collected = broadcast(draft.pre_tx);
    auto assemble = [&](const SpendDraft& d, const json& endorsements,
                        std::string& err) -> std::optional<Transaction> {
        Transaction tx = d.pre_tx;
        for (uint32_t s = 0; s < tx.participants.size(); s++) {
            const std::string& pid = reg.participants[tx.participants[s]].id;
            if (!endorsements.contains(pid)) {
                err = "missing endorsement from " + pid;
                return std::nullopt;
            }
            for (uint32_t a = 0; a < tx.asset_ids.size(); a++) {
                const json& je = endorsements.at(pid).at(tx.asset_ids[a]);
                Endorsement en = endorsement_from_json(je);
                if (std::holds_alternative<RefusalReason>(en)) {
                    err = pid + " refused " + tx.asset_ids[a] + " (" +
                          refusal_name(std::get<RefusalReason>(en)) + ")";
                    return std::nullopt;
                }
                auto& data = std::get<EndorsementData>(en);
                Cell& cell = tx.cells[a][s];
                cell.cm_prime = data.cm_prime;
                cell.tk_prime = data.tk_prime;
                cell.consistency_prime = data.consistency_prime;
                cell.equivalence = data.equivalence;
                cell.asset = data.asset;
            }
        }
        return tx;
    };

    SpendDraft active = draft;
    if (drop_missing && !collected.at("missing").empty()) {
        std::set<uint32_t> excluded;
        for (const auto& pid : collected.at("missing")) {
            auto idx = reg.participant_index(pid.get<std::string>());
            if (idx) excluded.insert(*idx);
        }
        active = exclude_and_rebalance(ck, reg, cfg, draft, excluded, sender.index(), rng);
        sender.mark_initiated(active.pre_tx.txid);
        collected = broadcast(active.pre_tx);
    }

    std::string err;
    auto tx = assemble(active, collected.at("endorsements"), err);
    if (!tx) {
        out.reason = err;
        return out;
    }
    auto [accepted, reason] = append(*tx);
    out.accepted = accepted;
    out.reason = reason;
    out.tx = *tx;
    return out;
}

}  // namespace padl
