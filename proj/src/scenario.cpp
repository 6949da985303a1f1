#include "padl/scenario.hpp"

#include <fstream>

using nlohmann::json;

namespace padl {

ScenarioScript ScenarioScript::from_json(const json& j) {
    ScenarioScript s;
    s.name = j.at("name").get<std::string>();
    s.seed = array_from_hex<32>(j.at("seed").get<std::string>());
    s.participants = j.at("participants").get<std::vector<std::string>>();
    for (const auto& a : j.at("assets"))
        s.assets.emplace_back(a.at("id").get<std::string>(), a.at("issuer").get<std::string>());
    if (j.contains("config")) {
        const json& c = j.at("config");
        if (c.contains("n_bits")) s.config.n_bits = c.at("n_bits").get<uint32_t>();
        if (c.contains("backend"))
            s.config.backend = c.at("backend").get<std::string>() == "bits"
                                   ? RangeBackend::BitDecomposition
                                   : RangeBackend::Bulletproof;
        if (c.contains("reduced_cells")) s.config.reduced_cells = c.at("reduced_cells").get<bool>();
        if (c.contains("extract_max")) s.config.extract_max = c.at("extract_max").get<uint64_t>();
        if (c.contains("audit_issuer")) {
            std::string issuer = c.at("audit_issuer").get<std::string>();
            for (uint32_t i = 0; i < s.participants.size(); i++)
                if (s.participants[i] == issuer) s.config.audit_issuer = i;
            if (!s.config.audit_issuer) throw InvalidInput("scenario: unknown audit issuer");
        }
    }
    s.steps = j.at("steps");
    return s;
}

ScenarioScript ScenarioScript::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("scenario: cannot open " + path);
    return from_json(json::parse(in));
}

json ScenarioReport::to_json() const {
    json j = {{"name", name},
              {"ok", ok},
              {"steps", steps},
              {"final_balances", final_balances},
              {"state_hash", state_hash}};
    if (!ok) {
        j["abort_reason"] = abort_reason;
        j["aborted_step"] = aborted_step;
    }
    return j;
}

namespace {

std::map<std::string, std::map<std::string, int64_t>> values_from_json(const json& j) {
    std::map<std::string, std::map<std::string, int64_t>> out;
    for (const auto& [asset, by_p] : j.items())
        for (const auto& [pid, v] : by_p.items()) out[asset][pid] = v.get<int64_t>();
    return out;
}

// Shared step interpreter; the `spend` and audit hooks differ between the
// in-process and remote drivers.
struct Driver {
    std::function<Desk::TransferResult(
        const std::string&, const std::map<std::string, std::map<std::string, int64_t>>&)>
        transfer;
    std::function<bool(const std::string&, const json&)> verify_audit;
};

ScenarioOutcome run_with_driver(const ScenarioScript& script,
                                const std::function<Driver(Desk&)>& make_driver,
                                const std::function<void(Desk&)>& after_init) {
    ScenarioOutcome out;
    out.report.name = script.name;
    out.desk = std::make_unique<Desk>(script.participants, script.assets, script.config,
                                      Rng(script.seed));
    Desk& desk = *out.desk;
    Driver driver = make_driver(desk);
    ShadowLedger shadow;
    std::map<std::string, uint64_t> labels;  // tx label -> row index
    Rng audit_rng = Rng(script.seed).fork("audits");

    auto resolve_rows = [&](const json& list) {
        std::vector<uint64_t> rows;
        for (const auto& item : list) {
            if (item.is_number())
                rows.push_back(item.get<uint64_t>());
            else
                rows.push_back(labels.at(item.get<std::string>()));
        }
        return rows;
    };

    int index = -1;
    for (const json& step : script.steps) {
        index++;
        std::string op = step.at("op").get<std::string>();
        json record = {{"op", op}};
        if (step.contains("label")) record["label"] = step.at("label");
        bool ok = true;
        std::string detail;

        try {
            if (op == "init") {
                auto holdings = values_from_json(step.at("holdings"));
                desk.init(holdings);
                after_init(desk);
                shadow.apply(desk.registry(), desk.make_values(holdings, true));
                if (step.contains("label")) labels[step.at("label").get<std::string>()] = 0;
                detail = "genesis at height 1";
            } else if (op == "issue" || op == "exchange" || op == "coupon" || op == "mature" ||
                       op == "transfer" || op == "spend") {
                auto values = values_from_json(step.at("values"));
                if (step.contains("consent"))
                    for (const auto& [pid, grants] : step.at("consent").items())
                        for (const auto& [asset, amount] : grants.items())
                            desk.participant(pid).grant_consent(asset, amount.get<int64_t>());
                auto res = driver.transfer(step.at("sender").get<std::string>(), values);
                bool expect_refuse = step.contains("expect") && step.at("expect") == "refuse";
                if (res.ok()) {
                    ok = !expect_refuse;
                    shadow.apply(desk.registry(), desk.make_values(values));
                    if (step.contains("label"))
                        labels[step.at("label").get<std::string>()] =
                            desk.ledger().row_count() - 1;
                    detail = "appended at row " + std::to_string(desk.ledger().row_count() - 1);
                } else {
                    ok = expect_refuse;
                    detail = res.status == Desk::TransferResult::Status::Refused
                                 ? std::string("refused: ") + refusal_name(res.refusal.reason)
                                 : "rejected: " + res.reject_reason;
                }
            } else if (op == "audit_balance") {
                std::string pid = step.at("participant").get<std::string>();
                uint32_t p = *desk.registry().participant_index(pid);
                int64_t claimed = step.contains("claimed")
                                      ? step.at("claimed").get<int64_t>()
                                      : shadow.balance(desk.registry(), pid,
                                                       step.at("asset").get<std::string>());
                auto audit = prove_balance(desk.ledger(), p, step.at("asset").get<std::string>(),
                                           desk.participant(pid).keys().sk, claimed, {},
                                           audit_rng);
                bool accepted = driver.verify_audit("balance", audit.to_json());
                bool expect_reject = step.contains("expect") && step.at("expect") == "reject";
                ok = accepted != expect_reject;
                detail = std::string("claimed ") + std::to_string(claimed) +
                         (accepted ? ", accepted" : ", rejected");
            } else if (op == "audit_liquidity") {
                std::string pid = step.at("participant").get<std::string>();
                uint64_t d = step.at("rate")[0].get<uint64_t>();
                uint64_t n = step.at("rate")[1].get<uint64_t>();
                bool expect_reject = step.contains("expect") && step.at("expect") == "reject";
                try {
                    auto audit =
                        prove_liquidity(desk.ledger(), desk.participant(pid),
                                        step.at("asset").get<std::string>(), d, n, audit_rng);
                    bool accepted = driver.verify_audit("liquidity", audit.to_json());
                    ok = accepted != expect_reject;
                    detail = accepted ? "accepted" : "rejected";
                } catch (const RangeError&) {
                    ok = expect_reject;
                    detail = "threshold violated, prover refused";
                }
            } else if (op == "audit_rate") {
                std::string pid = step.at("participant").get<std::string>();
                uint32_t p = *desk.registry().participant_index(pid);
                auto audit = prove_rate(
                    desk.ledger(), p, step.at("asset").get<std::string>(),
                    desk.participant(pid).keys().sk, resolve_rows(step.at("txs1")),
                    resolve_rows(step.at("txs2")), step.at("rate")[0].get<uint64_t>(),
                    step.at("rate")[1].get<uint64_t>(),
                    int8_t(step.at("signs")[0].get<int>()),
                    int8_t(step.at("signs")[1].get<int>()), audit_rng);
                bool accepted = driver.verify_audit("rate", audit.to_json());
                bool expect_reject = step.contains("expect") && step.at("expect") == "reject";
                ok = accepted != expect_reject;
                detail = accepted ? "accepted" : "rejected";
            } else if (op == "full_audit") {
                std::string pid = step.at("participant").get<std::string>();
                if (!desk.config().audit_issuer) throw InvalidInput("no audit issuer");
                const std::string& issuer_id =
                    desk.registry().participants[*desk.config().audit_issuer].id;
                const KeyPair& keys = desk.participant(issuer_id).keys();
                Extractor ex(desk.ck(), keys.sk, desk.config().extract_max);
                uint64_t row = step.at("row").is_number()
                                   ? step.at("row").get<uint64_t>()
                                   : labels.at(step.at("row").get<std::string>());
                int64_t value = full_audit_extract(
                    desk.ledger(), ex, keys.pk,
                    {row, *desk.registry().participant_index(pid),
                     step.at("asset").get<std::string>()});
                int64_t expected = step.at("expect_value").get<int64_t>();
                ok = value == expected;
                detail = "extracted " + std::to_string(value);
            } else if (op == "expect_balances") {
                for (const auto& [asset, by_p] : step.at("balances").items()) {
                    for (const auto& [pid, v] : by_p.items()) {
                        int64_t expected = v.get<int64_t>();
                        int64_t shadow_balance = shadow.balance(desk.registry(), pid, asset);
                        int64_t extracted = desk.balance_of(pid, asset);
                        if (expected != shadow_balance || expected != extracted) {
                            ok = false;
                            detail += pid + "/" + asset + ": expected " +
                                      std::to_string(expected) + ", shadow " +
                                      std::to_string(shadow_balance) + ", extracted " +
                                      std::to_string(extracted) + "; ";
                        }
                    }
                }
                if (ok) detail = "all balances match";
            } else {
                throw InvalidInput("scenario: unknown op " + op);
            }
        } catch (const std::exception& e) {
            ok = false;
            detail = std::string("exception: ") + e.what();
        }

        record["ok"] = ok;
        record["detail"] = detail;
        out.report.steps.push_back(record);
        if (!ok) {
            out.report.ok = false;
            out.report.aborted_step = index;
            out.report.abort_reason = detail;
            break;
        }
    }

    // every balance extraction goes into the report
    if (desk.has_ledger()) {
        json balances = json::object();
        for (const auto& asset : desk.registry().assets)
            for (const auto& p : desk.registry().participants)
                balances[asset.id][p.id] = desk.balance_of(p.id, asset.id);
        out.report.final_balances = balances;
        out.report.state_hash = to_hex(desk.ledger().state_hash());
    }
    return out;
}

}  // namespace

ScenarioOutcome run_scenario(const ScenarioScript& script) {
    return run_with_driver(
        script,
        [](Desk& desk) {
            Driver d;
            d.transfer = [&desk](const std::string& sender, const auto& values) {
                return desk.transfer(sender, values);
            };
            d.verify_audit = [&desk](const std::string& kind, const json& audit) {
                if (kind == "balance")
                    return verify_balance(desk.ledger(), BalanceAudit::from_json(audit));
                if (kind == "liquidity")
                    return verify_liquidity(desk.ledger(), LiquidityAudit::from_json(audit));
                return verify_rate(desk.ledger(), RateAudit::from_json(audit));
            };
            return d;
        },
        [](Desk&) {});
}

ScenarioOutcome run_scenario_remote(const ScenarioScript& script, HostService& host) {
    // participant endorsement services live for the duration of the run
    auto services = std::make_shared<std::vector<std::unique_ptr<ParticipantService>>>();
    return run_with_driver(
        script,
        [&](Desk& desk) {
            Driver d;
            d.transfer = [&host, &desk, services](const std::string& sender,
                                                  const auto& values) {
                HostClient client(host.base_url());
                Desk::TransferResult out;
                ValueList vl = desk.make_values(values);
                auto res = client.remote_spend(desk.ck(), desk.registry(), desk.config(), vl,
                                               desk.participant(sender), desk.rng());
                out.tx = res.tx;
                if (res.accepted) {
                    out.status = Desk::TransferResult::Status::Accepted;
                    // mirror the host's ledger locally so audits and
                    // extraction read the same state
                    auto local = desk.append(res.tx);
                    if (!local.accepted)
                        throw Error("remote/local ledgers diverged: " + local.reason);
                } else {
                    out.status = Desk::TransferResult::Status::Rejected;
                    out.reject_reason = res.reason;
                }
                return out;
            };
            d.verify_audit = [&host](const std::string& kind, const json& audit) {
                HostClient client(host.base_url());
                return client.verify_audit(kind, audit);
            };
            return d;
        },
        [&](Desk& desk) {
            // host adopts the same genesis; wallets register their endpoints
            host.adopt_ledger(Ledger::from_json(desk.ledger().to_json()));
            if (desk.approver()) host.set_approver(desk.approver());
            HostClient client(host.base_url());
            for (const auto& p : desk.registry().participants) {
                auto svc = std::make_unique<ParticipantService>(desk.participant(p.id),
                                                                host.base_url());
                svc->start();
                client.register_callback(p.id, svc->base_url());
                services->push_back(std::move(svc));
            }
        });
}

}  // namespace padl
