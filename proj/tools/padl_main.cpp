#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "padl/bench.hpp"
#include "padl/scenario.hpp"

using namespace padl;
using nlohmann::json;

namespace {

Bytes32 parse_seed(const std::string& hex) {
    if (hex.empty()) return Rng::from_os_entropy().next_bytes32();
    if (hex.size() == 64) return array_from_hex<32>(hex);
    // short seeds are padded; convenient on the command line
    Bytes32 seed{};
    Bytes raw = from_hex(hex.size() % 2 ? "0" + hex : hex);
    std::copy(raw.begin(), raw.begin() + std::min<size_t>(raw.size(), 32), seed.begin());
    return seed;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return json::parse(in);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write " + path);
    out << text;
}

// Wallet files: one json per participant with the account secret.
struct Keystore {
    std::map<std::string, KeyPair> keys;

    static Keystore load(const std::string& dir, const Registry& reg) {
        Keystore ks;
        for (const auto& p : reg.participants) {
            std::string path = dir + "/" + p.id + ".json";
            if (!std::filesystem::exists(path)) continue;
            json j = read_json_file(path);
            auto sk = Scalar::from_bytes(array_from_hex<32>(j.at("sk").get<std::string>()));
            auto pk = GroupElement::decode(array_from_hex<32>(j.at("pk").get<std::string>()));
            if (!sk || !pk) throw Error("bad key file " + path);
            if (!(*pk == p.pk)) throw Error("key file " + path + " does not match the ledger");
            ks.keys[p.id] = KeyPair{*sk, *pk};
        }
        return ks;
    }
};

// Rebuilds wallets around a loaded ledger for endorsement/audit flows.
struct CliWorld {
    Ledger ledger;
    Keystore keystore;
    std::vector<std::unique_ptr<Participant>> wallets;

    CliWorld(const std::string& ledger_path, const std::string& keys_dir, const Bytes32& seed)
        : ledger(Ledger::load(ledger_path)) {
        keystore = Keystore::load(keys_dir, ledger.registry());
        Rng rng(seed);
        for (uint32_t i = 0; i < ledger.registry().participants.size(); i++) {
            const auto& spec = ledger.registry().participants[i];
            auto it = keystore.keys.find(spec.id);
            if (it == keystore.keys.end()) continue;
            wallets.push_back(std::make_unique<Participant>(
                ledger.commit_key(), ledger.registry(), ledger.config(), i, it->second,
                rng.fork("wallet/" + spec.id)));
        }
    }

    Participant& wallet(const std::string& id) {
        auto idx = ledger.registry().participant_index(id);
        if (!idx) throw Error("unknown participant " + id);
        for (auto& w : wallets)
            if (w->index() == *idx) return *w;
        throw Error("no key file for participant " + id);
    }

    std::vector<Participant*> endorsers() {
        std::vector<Participant*> out;
        for (auto& w : wallets) out.push_back(w.get());
        return out;
    }
};

std::map<std::string, std::map<std::string, int64_t>> values_from_json(const json& j) {
    std::map<std::string, std::map<std::string, int64_t>> out;
    for (const auto& [asset, by_p] : j.items())
        for (const auto& [pid, v] : by_p.items()) out[asset][pid] = v.get<int64_t>();
    return out;
}

int cmd_keygen(const std::string& seed_hex, const std::string& out_path) {
    Bytes32 seed = parse_seed(seed_hex);
    Rng rng(seed);
    // a lone key pair against the standard bases; ledger-bound keys are
    // produced by `padl init`
    CommitKey ck = setup(std::array{rng.fork("contribution").next_scalar()});
    KeyPair kp = keygen(ck, rng);
    json j = {{"sk", to_hex(kp.sk.to_bytes())},
              {"pk", to_hex(kp.pk.encode())},
              {"h", to_hex(ck.h.encode())}};
    if (out_path.empty())
        std::cout << j.dump(2) << "\n";
    else
        write_text(out_path, j.dump(2));
    return 0;
}

int cmd_init(const std::string& config_path, const std::string& ledger_path,
             const std::string& keys_dir, const std::string& seed_hex) {
    json cfg_json = read_json_file(config_path);
    ScenarioScript header = ScenarioScript::from_json(json{
        {"name", "init"},
        {"seed", to_hex(parse_seed(seed_hex))},
        {"participants", cfg_json.at("participants")},
        {"assets", cfg_json.at("assets")},
        {"config", cfg_json.value("config", json::object())},
        {"steps", json::array()}});

    Desk desk(header.participants, header.assets, header.config, Rng(header.seed));
    desk.init(values_from_json(cfg_json.at("holdings")));
    desk.ledger().save(ledger_path);

    if (!keys_dir.empty()) {
        std::filesystem::create_directories(keys_dir);
        for (const auto& p : desk.registry().participants) {
            const KeyPair& kp = desk.participant(p.id).keys();
            write_text(keys_dir + "/" + p.id + ".json",
                       json{{"sk", to_hex(kp.sk.to_bytes())}, {"pk", to_hex(kp.pk.encode())}}
                           .dump(2));
        }
    }
    std::cout << "ledger written to " << ledger_path << " (height "
              << desk.ledger().row_count() << ", state "
              << to_hex(desk.ledger().state_hash()) << ")\n";
    return 0;
}

int cmd_spend(const std::string& ledger_path, const std::string& keys_dir,
              const std::string& sender, const std::string& values_path,
              const std::string& seed_hex, const std::string& out_tx, bool do_append) {
    CliWorld world(ledger_path, keys_dir, parse_seed(seed_hex));
    json values_json = read_json_file(values_path);
    ValueList vl;
    {
        // consent grants may ride in the values file
        json values = values_json.contains("values") ? values_json.at("values") : values_json;
        if (values_json.contains("consent"))
            for (const auto& [pid, grants] : values_json.at("consent").items())
                for (const auto& [asset, amount] : grants.items())
                    world.wallet(pid).grant_consent(asset, amount.get<int64_t>());
        auto by_asset = values_from_json(values);
        for (const auto& [asset_id, by_p] : by_asset) {
            vl.asset_ids.push_back(asset_id);
            std::vector<int64_t> row(world.ledger.registry().participants.size(), 0);
            for (const auto& [pid, amount] : by_p) {
                auto idx = world.ledger.registry().participant_index(pid);
                if (!idx) throw Error("unknown participant " + pid);
                row[*idx] = amount;
            }
            vl.amounts.push_back(std::move(row));
        }
    }
    auto sender_idx = world.ledger.registry().participant_index(sender);
    if (!sender_idx) throw Error("unknown sender " + sender);
    Rng rng = Rng(parse_seed(seed_hex)).fork("spend");
    auto endorsers = world.endorsers();
    auto result = spend(world.ledger.commit_key(), world.ledger.registry(),
                        world.ledger.config(), vl, world.ledger, endorsers, *sender_idx, rng);
    if (std::holds_alternative<SpendRefused>(result)) {
        const auto& r = std::get<SpendRefused>(result);
        std::cerr << "refused by " << world.ledger.registry().participants[r.participant].id
                  << " on " << r.asset_id << ": " << refusal_name(r.reason) << "\n";
        return 1;
    }
    Transaction tx = std::get<Transaction>(result);
    if (!out_tx.empty()) {
        Bytes bytes = tx.to_bytes();
        std::ofstream out(out_tx, std::ios::binary | std::ios::trunc);
        out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    }
    if (do_append) {
        auto res = world.ledger.append(tx);
        if (!res.accepted) {
            std::cerr << "append rejected: " << res.reason << "\n";
            return 1;
        }
        world.ledger.save(ledger_path);
        std::cout << "appended row " << world.ledger.row_count() - 1 << ", state "
                  << to_hex(world.ledger.state_hash()) << "\n";
    } else {
        std::cout << "transaction " << to_hex(tx.txid) << " built"
                  << (out_tx.empty() ? "" : " -> " + out_tx) << "\n";
    }
    return 0;
}

Transaction read_tx(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    auto tx = Transaction::from_bytes(bytes);
    if (!tx) throw Error("malformed transaction file");
    return *tx;
}

int cmd_endorse(const std::string& ledger_path, const std::string& keys_dir,
                const std::string& participant, const std::string& tx_path,
                const std::string& seed_hex, const std::string& out_path) {
    CliWorld world(ledger_path, keys_dir, parse_seed(seed_hex));
    Transaction tx = read_tx(tx_path);
    auto& wallet = world.wallet(participant);
    json out = json::object();
    for (uint32_t a = 0; a < tx.asset_ids.size(); a++) {
        Endorsement en = wallet.fill_asset(world.ledger, tx, a);
        out[tx.asset_ids[a]] = endorsement_to_json(en);
    }
    if (out_path.empty())
        std::cout << out.dump(2) << "\n";
    else
        write_text(out_path, out.dump(2));
    return 0;
}

int cmd_verify(const std::string& ledger_path, const std::string& tx_path, bool do_append) {
    Ledger ledger = Ledger::load(ledger_path);
    Transaction tx = read_tx(tx_path);
    auto report = verify_transaction(ledger.commit_key(), ledger.registry(), ledger.config(),
                                     tx, ledger);
    if (report.ok && tx.bound_row_count != ledger.row_count()) {
        std::cout << "proofs valid but stale (bound to height " << tx.bound_row_count << ")\n";
        return 1;
    }
    if (!report.ok) {
        std::cout << "reject\n";
        for (const auto& f : report.failures)
            std::cout << "  " << f.asset_id << " participant=" << f.participant << " check="
                      << f.check << "\n";
        return 1;
    }
    std::cout << "accept\n";
    if (do_append) {
        auto res = ledger.append(tx);
        if (!res.accepted) {
            std::cerr << "append rejected: " << res.reason << "\n";
            return 1;
        }
        ledger.save(ledger_path);
        std::cout << "appended row " << ledger.row_count() - 1 << "\n";
    }
    return 0;
}

int cmd_audit(const std::string& kind, bool prove, const std::string& ledger_path,
              const std::string& keys_dir, const std::string& participant,
              const std::string& asset, int64_t claimed, const std::string& rate,
              const std::string& signs, std::vector<uint64_t> txs1, std::vector<uint64_t> txs2,
              const std::string& seed_hex, const std::string& in_path,
              const std::string& out_path) {
    Ledger ledger = Ledger::load(ledger_path);
    if (!prove) {
        json j = read_json_file(in_path);
        bool ok = false;
        if (kind == "balance") ok = verify_balance(ledger, BalanceAudit::from_json(j));
        if (kind == "liquidity") ok = verify_liquidity(ledger, LiquidityAudit::from_json(j));
        if (kind == "rate") ok = verify_rate(ledger, RateAudit::from_json(j));
        std::cout << (ok ? "accept" : "reject") << "\n";
        return ok ? 0 : 1;
    }
    CliWorld world(ledger_path, keys_dir, parse_seed(seed_hex));
    auto idx = ledger.registry().participant_index(participant);
    if (!idx) throw Error("unknown participant " + participant);
    Rng rng = Rng(parse_seed(seed_hex)).fork("audit");
    json out;
    if (kind == "balance") {
        out = prove_balance(ledger, *idx, asset, world.wallet(participant).keys().sk, claimed,
                            {}, rng)
                  .to_json();
    } else if (kind == "rate") {
        uint64_t d = 1, n = 1;
        if (sscanf(rate.c_str(), "%lu/%lu", &d, &n) != 2) throw Error("rate must be D/N");
        int8_t s1 = signs.size() > 0 && signs[0] == '-' ? -1 : 1;
        int8_t s2 = signs.size() > 2 && signs[2] == '-' ? -1 : 1;
        out = prove_rate(ledger, *idx, asset, world.wallet(participant).keys().sk,
                         std::move(txs1), std::move(txs2), d, n, s1, s2, rng)
                  .to_json();
    } else {
        // liquidity proving needs the wallet's complementary-randomness store,
        // which only lives inside a scenario run
        throw Error("liquidity proofs are produced by the wallet runtime; use "
                    "`padl scenario` (verification: --verify --in <file>)");
    }
    if (out_path.empty())
        std::cout << out.dump(2) << "\n";
    else
        write_text(out_path, out.dump(2));
    return 0;
}

int cmd_scenario(const std::string& script_path, const std::string& host_url, bool serve,
                 const std::string& report_path, const std::string& ledger_out) {
    ScenarioScript script = ScenarioScript::from_file(script_path);
    ScenarioOutcome outcome;
    if (serve) {
        HostService host;
        host.start();
        std::cout << "host on " << host.base_url() << "\n";
        outcome = run_scenario_remote(script, host);
        host.stop();
    } else if (!host_url.empty()) {
        throw Error("remote hosts need --serve in this build (single process)");
    } else {
        outcome = run_scenario(script);
    }
    json report = outcome.report.to_json();
    if (!report_path.empty()) write_text(report_path, report.dump(2));
    std::cout << report.dump(2) << "\n";
    if (outcome.report.ok && !ledger_out.empty() && outcome.desk->has_ledger())
        outcome.desk->ledger().save(ledger_out);
    return outcome.report.ok ? 0 : 1;
}

std::vector<uint32_t> parse_grid(const std::string& csv) {
    std::vector<uint32_t> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(uint32_t(std::stoul(item)));
    return out;
}

int cmd_bench(const std::string& participants, const std::string& assets, uint32_t reps,
              const std::string& backend, const std::string& json_path,
              const std::string& csv_path, const std::string& seed_hex) {
    auto p_grid = parse_grid(participants);
    auto a_grid = parse_grid(assets);
    RangeBackend kind =
        backend == "bits" ? RangeBackend::BitDecomposition : RangeBackend::Bulletproof;
    BenchReport report = run_bench(p_grid, a_grid, reps, kind, 4, parse_seed(seed_hex));
    if (!json_path.empty()) write_text(json_path, report.to_json().dump(2));
    if (!csv_path.empty()) write_text(csv_path, report.to_csv());
    std::cout << report.to_csv();
    std::cout << "audit proof bytes: balance=" << report.balance_audit_bytes
              << " rate=" << report.rate_audit_bytes
              << " liquidity=" << report.liquidity_audit_bytes << "\n";
    return 0;
}

int cmd_serve(const std::string& ledger_path, const std::string& bind, int port, int timeout_ms) {
    HostService host;
    host.set_endorse_timeout(timeout_ms);
    if (!ledger_path.empty()) host.adopt_ledger(Ledger::load(ledger_path));
    int bound = host.start(bind, port);
    std::cout << "serving on http://" << bind << ":" << bound << "\n";
    // block until interrupted
    while (true) std::this_thread::sleep_for(std::chrono::seconds(1));
    return 0;
}

int cmd_battery(const std::string& seed_hex, const std::string& backend,
                const std::string& json_path) {
    RangeBackend kind =
        backend == "bits" ? RangeBackend::BitDecomposition : RangeBackend::Bulletproof;
    Bytes32 seed = parse_seed(seed_hex);
    HarnessReport integrity = run_integrity_battery(seed, kind);
    HarnessReport anonymity = run_anonymity_mechanics(seed, kind);
    std::cout << integrity.to_table() << "\n" << anonymity.to_table();
    if (!json_path.empty())
        write_text(json_path,
                   json{{"integrity", integrity.to_json()}, {"anonymity", anonymity.to_json()}}
                       .dump(2));
    return integrity.all_pass() && anonymity.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"padl: private auditable multi-asset ledger"};
    app.require_subcommand(1);

    std::string seed, ledger_path, keys_dir, out_path, in_path;

    auto* keygen_cmd = app.add_subcommand("keygen", "generate an account key pair");
    keygen_cmd->add_option("--seed", seed, "hex seed (random when absent)");
    keygen_cmd->add_option("--out", out_path, "output file (stdout when absent)");

    std::string config_path;
    auto* init_cmd = app.add_subcommand("init", "create a ledger from a genesis config");
    init_cmd->add_option("--config", config_path, "genesis json")->required();
    init_cmd->add_option("--ledger", ledger_path, "ledger output path")->required();
    init_cmd->add_option("--keys", keys_dir, "directory for participant key files");
    init_cmd->add_option("--seed", seed, "hex seed");

    std::string sender, values_path, tx_path, participant;
    bool do_append = false;
    auto* spend_cmd = app.add_subcommand("spend", "build (and append) a transaction");
    spend_cmd->add_option("--ledger", ledger_path)->required();
    spend_cmd->add_option("--keys", keys_dir)->required();
    spend_cmd->add_option("--sender", sender)->required();
    spend_cmd->add_option("--values", values_path, "values json")->required();
    spend_cmd->add_option("--seed", seed);
    spend_cmd->add_option("--out", out_path, "write the transaction binary here");
    spend_cmd->add_flag("--append", do_append, "append to the ledger on success");

    auto* endorse_cmd = app.add_subcommand("endorse", "endorse a broadcast transaction");
    endorse_cmd->add_option("--ledger", ledger_path)->required();
    endorse_cmd->add_option("--keys", keys_dir)->required();
    endorse_cmd->add_option("--participant", participant)->required();
    endorse_cmd->add_option("--tx", tx_path)->required();
    endorse_cmd->add_option("--seed", seed);
    endorse_cmd->add_option("--out", out_path);

    auto* verify_cmd = app.add_subcommand("verify", "verify a transaction against a ledger");
    verify_cmd->add_option("--ledger", ledger_path)->required();
    verify_cmd->add_option("--tx", tx_path)->required();
    verify_cmd->add_flag("--append", do_append, "append when verification passes");

    std::string audit_kind, rate = "1/1", signs = "+,+", asset;
    std::vector<uint64_t> txs1, txs2;
    int64_t claimed = 0;
    bool prove = false, verify_audit_flag = false;
    auto* audit_cmd = app.add_subcommand("audit", "produce or verify audit proofs");
    audit_cmd->add_option("kind", audit_kind, "balance | liquidity | rate")->required();
    audit_cmd->add_flag("--prove", prove);
    audit_cmd->add_flag("--verify", verify_audit_flag);
    audit_cmd->add_option("--ledger", ledger_path)->required();
    audit_cmd->add_option("--keys", keys_dir);
    audit_cmd->add_option("--participant", participant);
    audit_cmd->add_option("--asset", asset);
    audit_cmd->add_option("--claimed", claimed);
    audit_cmd->add_option("--rate", rate, "D/N");
    audit_cmd->add_option("--signs", signs, "e.g. +,-");
    audit_cmd->add_option("--txs1", txs1)->delimiter(',');
    audit_cmd->add_option("--txs2", txs2)->delimiter(',');
    audit_cmd->add_option("--seed", seed);
    audit_cmd->add_option("--in", in_path, "audit json to verify");
    audit_cmd->add_option("--out", out_path);

    std::string script_path, host_url, report_path, ledger_out;
    bool serve_flag = false;
    auto* scenario_cmd = app.add_subcommand("scenario", "run a use-case script");
    scenario_cmd->add_option("--script", script_path)->required();
    scenario_cmd->add_option("--host", host_url, "drive a remote host");
    scenario_cmd->add_flag("--serve", serve_flag, "spin up a host and run through it");
    scenario_cmd->add_option("--report", report_path);
    scenario_cmd->add_option("--save-ledger", ledger_out);

    std::string participants_grid = "2,4,8,16", assets_grid = "1,2,4,8", backend = "bulletproof";
    std::string bench_json, bench_csv;
    uint32_t reps = 3;
    auto* bench_cmd = app.add_subcommand("bench", "timing and size benchmarks");
    bench_cmd->add_option("--participants", participants_grid);
    bench_cmd->add_option("--assets", assets_grid);
    bench_cmd->add_option("--reps", reps);
    bench_cmd->add_option("--backend", backend, "bulletproof | bits");
    bench_cmd->add_option("--json", bench_json);
    bench_cmd->add_option("--csv", bench_csv);
    bench_cmd->add_option("--seed", seed);

    std::string bind = "127.0.0.1";
    int port = 8080, timeout_ms = 2000;
    auto* serve_cmd = app.add_subcommand("serve", "run the ledger host");
    serve_cmd->add_option("--ledger", ledger_path);
    serve_cmd->add_option("--bind", bind);
    serve_cmd->add_option("--port", port);
    serve_cmd->add_option("--timeout-ms", timeout_ms);

    auto* battery_cmd = app.add_subcommand("battery", "run the integrity tamper battery");
    battery_cmd->add_option("--seed", seed);
    battery_cmd->add_option("--backend", backend);
    battery_cmd->add_option("--json", out_path);

    CLI11_PARSE(app, argc, argv);

    try {
        if (keygen_cmd->parsed()) return cmd_keygen(seed, out_path);
        if (init_cmd->parsed()) return cmd_init(config_path, ledger_path, keys_dir, seed);
        if (spend_cmd->parsed())
            return cmd_spend(ledger_path, keys_dir, sender, values_path, seed, out_path,
                             do_append);
        if (endorse_cmd->parsed())
            return cmd_endorse(ledger_path, keys_dir, participant, tx_path, seed, out_path);
        if (verify_cmd->parsed()) return cmd_verify(ledger_path, tx_path, do_append);
        if (audit_cmd->parsed()) {
            if (!prove && !verify_audit_flag)
                throw Error("audit: pass --prove or --verify");
            return cmd_audit(audit_kind, prove, ledger_path, keys_dir, participant, asset,
                             claimed, rate, signs, txs1, txs2, seed, in_path, out_path);
        }
        if (scenario_cmd->parsed())
            return cmd_scenario(script_path, host_url, serve_flag, report_path, ledger_out);
        if (bench_cmd->parsed())
            return cmd_bench(participants_grid, assets_grid, reps, backend, bench_json,
                             bench_csv, seed);
        if (serve_cmd->parsed()) return cmd_serve(ledger_path, bind, port, timeout_ms);
        if (battery_cmd->parsed()) return cmd_battery(seed, backend, out_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
