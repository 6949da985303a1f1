#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "padl/bench.hpp"
#include "padl/scenario.hpp"

namespace py = pybind11;
using namespace padl;
using nlohmann::json;

namespace {

Bytes32 seed_from_hex(const std::string& hex) {
    Bytes32 seed{};
    Bytes raw = from_hex(hex.size() % 2 ? "0" + hex : hex);
    std::copy(raw.begin(), raw.begin() + std::min<size_t>(raw.size(), 32), seed.begin());
    return seed;
}

LedgerConfig config_from_dict(const py::dict& d) {
    LedgerConfig cfg;
    if (d.contains("n_bits")) cfg.n_bits = d["n_bits"].cast<uint32_t>();
    if (d.contains("backend"))
        cfg.backend = d["backend"].cast<std::string>() == "bits" ? RangeBackend::BitDecomposition
                                                                 : RangeBackend::Bulletproof;
    if (d.contains("reduced_cells")) cfg.reduced_cells = d["reduced_cells"].cast<bool>();
    if (d.contains("audit_issuer")) cfg.audit_issuer = d["audit_issuer"].cast<uint32_t>();
    if (d.contains("extract_max")) cfg.extract_max = d["extract_max"].cast<uint64_t>();
    return cfg;
}

using ValuesMap = std::map<std::string, std::map<std::string, int64_t>>;

// Python-facing wrapper bundling a desk with its audit rng.
class PyDesk {
public:
    PyDesk(const std::vector<std::string>& participants,
           const std::vector<std::pair<std::string, std::string>>& assets, const py::dict& config,
           const std::string& seed_hex)
        : desk_(participants, assets, config_from_dict(config), Rng(seed_from_hex(seed_hex))),
          audit_rng_(Rng(seed_from_hex(seed_hex)).fork("py-audits")) {}

    void init(const ValuesMap& holdings) { desk_.init(holdings); }

    py::dict transfer(const std::string& sender, const ValuesMap& values) {
        auto res = desk_.transfer(sender, values);
        py::dict out;
        out["accepted"] = res.ok();
        if (res.status == Desk::TransferResult::Status::Refused) {
            out["refused_by"] = desk_.registry().participants[res.refusal.participant].id;
            out["asset"] = res.refusal.asset_id;
            out["reason"] = refusal_name(res.refusal.reason);
        } else if (res.status == Desk::TransferResult::Status::Rejected) {
            out["reason"] = res.reject_reason;
        } else {
            out["txid"] = to_hex(res.tx.txid);
            out["row"] = desk_.ledger().row_count() - 1;
        }
        return out;
    }

    void grant_consent(const std::string& participant, const std::string& asset,
                       int64_t amount) {
        desk_.participant(participant).grant_consent(asset, amount);
    }

    int64_t balance_of(const std::string& participant, const std::string& asset) {
        return desk_.balance_of(participant, asset);
    }

    uint64_t height() const { return desk_.ledger().row_count(); }
    std::string state_hash() const { return to_hex(desk_.ledger().state_hash()); }
    std::string ledger_json() const { return desk_.ledger().to_json().dump(); }

    std::string prove_balance_json(const std::string& participant, const std::string& asset,
                                   int64_t claimed) {
        uint32_t idx = *desk_.registry().participant_index(participant);
        auto audit = prove_balance(desk_.ledger(), idx, asset,
                                   desk_.participant(participant).keys().sk, claimed, {},
                                   audit_rng_);
        return audit.to_json().dump();
    }
    bool verify_balance_json(const std::string& audit_json) {
        return verify_balance(desk_.ledger(), BalanceAudit::from_json(json::parse(audit_json)));
    }
    std::string prove_liquidity_json(const std::string& participant, const std::string& asset,
                                     uint64_t d, uint64_t n) {
        auto audit = prove_liquidity(desk_.ledger(), desk_.participant(participant), asset, d, n,
                                     audit_rng_);
        return audit.to_json().dump();
    }
    bool verify_liquidity_json(const std::string& audit_json) {
        return verify_liquidity(desk_.ledger(),
                                LiquidityAudit::from_json(json::parse(audit_json)));
    }
    std::string prove_rate_json(const std::string& participant, const std::string& asset,
                                const std::vector<uint64_t>& txs1,
                                const std::vector<uint64_t>& txs2, uint64_t d, uint64_t n,
                                int sign1, int sign2) {
        uint32_t idx = *desk_.registry().participant_index(participant);
        auto audit = prove_rate(desk_.ledger(), idx, asset,
                                desk_.participant(participant).keys().sk, txs1, txs2, d, n,
                                int8_t(sign1), int8_t(sign2), audit_rng_);
        return audit.to_json().dump();
    }
    bool verify_rate_json(const std::string& audit_json) {
        return verify_rate(desk_.ledger(), RateAudit::from_json(json::parse(audit_json)));
    }

private:
    Desk desk_;
    Rng audit_rng_;
};

}  // namespace

PYBIND11_MODULE(_padl, m) {
    m.doc() = "private auditable multi-asset ledger";

    py::class_<PyDesk>(m, "Desk")
        .def(py::init<const std::vector<std::string>&,
                      const std::vector<std::pair<std::string, std::string>>&, const py::dict&,
                      const std::string&>(),
             py::arg("participants"), py::arg("assets"), py::arg("config") = py::dict(),
             py::arg("seed") = "00")
        .def("init", &PyDesk::init, py::arg("holdings"))
        .def("transfer", &PyDesk::transfer, py::arg("sender"), py::arg("values"))
        .def("grant_consent", &PyDesk::grant_consent, py::arg("participant"), py::arg("asset"),
             py::arg("amount"))
        .def("balance_of", &PyDesk::balance_of, py::arg("participant"), py::arg("asset"))
        .def("height", &PyDesk::height)
        .def("state_hash", &PyDesk::state_hash)
        .def("ledger_json", &PyDesk::ledger_json)
        .def("prove_balance", &PyDesk::prove_balance_json, py::arg("participant"),
             py::arg("asset"), py::arg("claimed"))
        .def("verify_balance", &PyDesk::verify_balance_json, py::arg("audit_json"))
        .def("prove_liquidity", &PyDesk::prove_liquidity_json, py::arg("participant"),
             py::arg("asset"), py::arg("d"), py::arg("n"))
        .def("verify_liquidity", &PyDesk::verify_liquidity_json, py::arg("audit_json"))
        .def("prove_rate", &PyDesk::prove_rate_json, py::arg("participant"), py::arg("asset"),
             py::arg("txs1"), py::arg("txs2"), py::arg("d"), py::arg("n"), py::arg("sign1") = 1,
             py::arg("sign2") = 1)
        .def("verify_rate", &PyDesk::verify_rate_json, py::arg("audit_json"));

    m.def(
        "run_scenario_file",
        [](const std::string& path) {
            auto outcome = run_scenario(ScenarioScript::from_file(path));
            return outcome.report.to_json().dump();
        },
        py::arg("path"), "run a scenario script, returns the report as json text");

    m.def(
        "run_scenario_json",
        [](const std::string& script_json) {
            auto outcome = run_scenario(ScenarioScript::from_json(json::parse(script_json)));
            return outcome.report.to_json().dump();
        },
        py::arg("script_json"));

    m.def(
        "run_integrity_battery",
        [](const std::string& seed_hex) {
            return run_integrity_battery(seed_from_hex(seed_hex), RangeBackend::Bulletproof)
                .to_json()
                .dump();
        },
        py::arg("seed") = "00");

    m.def(
        "run_bench",
        [](const std::vector<uint32_t>& participants, const std::vector<uint32_t>& assets,
           uint32_t reps) {
            return run_bench(participants, assets, reps, RangeBackend::Bulletproof).to_json()
                .dump();
        },
        py::arg("participants"), py::arg("assets"), py::arg("reps") = 1);
}
