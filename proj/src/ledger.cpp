#include "padl/ledger.hpp"

#include <fstream>

#include "padl/serde.hpp"
#include "padl/sha512.hpp"

using nlohmann::json;

namespace padl {

// ---------------------------------------------------------------------------
// issuer approver (reduced-cell mode)
// ---------------------------------------------------------------------------

IssuerApprover::IssuerApprover(const CommitKey& ck, const Registry& reg, const LedgerConfig& cfg,
                               uint32_t issuer_index, KeyPair keys)
    : reg_(reg),
      cfg_(cfg),
      issuer_index_(issuer_index),
      keys_(std::move(keys)),
      extractor_(ck, keys_.sk, cfg.extract_max) {}

std::optional<int64_t> IssuerApprover::extract_cell(const Cell& cell) const {
    if (!cell.issuer) return std::nullopt;
    return extractor_.extract(cell.cm, cell.issuer->token);
}

IssuerApprover::LedgerState& IssuerApprover::sync(const Ledger& ledger) {
    LedgerState& state = states_[&ledger];
    const auto& rows = ledger.rows();
    if (state.synced_rows > rows.size()) state = LedgerState{};  // ledger was replaced
    for (uint64_t t = state.synced_rows; t < rows.size(); t++) {
        const Transaction& tx = rows[t];
        for (size_t a = 0; a < tx.asset_ids.size(); a++) {
            for (uint32_t s = 0; s < tx.participants.size(); s++) {
                auto v = extract_cell(tx.cells[a][s]);
                if (v) state.balances[{tx.participants[s], tx.asset_ids[a]}] += *v;
            }
        }
    }
    state.synced_rows = rows.size();
    return state;
}

IssuerApprover::Decision IssuerApprover::approve(const Ledger& ledger, const Transaction& tx) {
    if (!cfg_.audit_issuer || *cfg_.audit_issuer != issuer_index_)
        return {false, "approver is not the designated issuer"};
    if (keys_.pk != reg_.participants[issuer_index_].pk)
        return {false, "approver keys do not match the registry"};
    LedgerState& state = sync(ledger);

    for (size_t a = 0; a < tx.asset_ids.size(); a++) {
        const std::string& asset_id = tx.asset_ids[a];
        uint32_t asset_issuer = reg_.asset(asset_id).issuer;
        int64_t sum = 0;
        for (uint32_t s = 0; s < tx.participants.size(); s++) {
            uint32_t p = tx.participants[s];
            auto v = extract_cell(tx.cells[a][s]);
            if (!v) return {false, "cell value not extractable via issuer token"};
            if (tx.genesis && *v < 0) return {false, "negative genesis amount"};
            sum += *v;
            int64_t balance = state.balances[{p, asset_id}] + *v;
            int64_t floor = (p == asset_issuer) ? -int64_t(cfg_.issuer_shift()) : 0;
            if (balance < floor) return {false, "overspend by participant " +
                                                     reg_.participants[p].id};
            if (balance >= floor + (int64_t(1) << cfg_.n_bits))
                return {false, "balance bound exceeded"};
        }
        if (!tx.genesis && sum != 0) return {false, "asset does not sum to zero"};
    }
    return {true, ""};
}

// ---------------------------------------------------------------------------
// ledger
// ---------------------------------------------------------------------------

Ledger::Ledger(const CommitKey& ck, Registry reg, LedgerConfig cfg)
    : ck_(ck), reg_(std::move(reg)), cfg_(std::move(cfg)) {
    if (reg_.participants.empty()) throw InvalidInput("ledger: no participants");
    for (size_t i = 0; i < reg_.participants.size(); i++)
        for (size_t j = i + 1; j < reg_.participants.size(); j++) {
            if (reg_.participants[i].pk == reg_.participants[j].pk)
                throw InvalidInput("ledger: duplicate participant key");
            if (reg_.participants[i].id == reg_.participants[j].id)
                throw InvalidInput("ledger: duplicate participant id");
        }
    if (reg_.assets.empty()) throw InvalidInput("ledger: no assets");
    for (const auto& asset : reg_.assets)
        if (asset.issuer >= reg_.participants.size())
            throw InvalidInput("ledger: asset without a valid issuer");
    if (cfg_.audit_issuer && *cfg_.audit_issuer >= reg_.participants.size())
        throw InvalidInput("ledger: invalid audit issuer");
    if (cfg_.reduced_cells && !cfg_.audit_issuer)
        throw InvalidInput("ledger: reduced cells require an audit issuer");
    state_hash_.fill(0);
}

void Ledger::reconfigure(LedgerConfig cfg) {
    if (!rows_.empty()) throw InvalidInput("ledger: config is immutable after genesis");
    if (cfg.reduced_cells && !cfg.audit_issuer)
        throw InvalidInput("ledger: reduced cells require an audit issuer");
    cfg_ = std::move(cfg);
}

namespace {

Bytes32 next_state_hash(const Bytes32& prev, const Transaction& tx) {
    Sha512 h;
    h.update("padl/state/v1");
    h.update(std::span<const uint8_t>(prev.data(), prev.size()));
    for (const auto& row : tx.cells) {
        for (const auto& cell : row) {
            Bytes32 cm = cell.cm.point.encode();
            Bytes32 tk = cell.tk.point.encode();
            h.update(std::span<const uint8_t>(cm.data(), 32));
            h.update(std::span<const uint8_t>(tk.data(), 32));
        }
    }
    Bytes64 wide = h.finalize();
    Bytes32 out;
    std::memcpy(out.data(), wide.data(), 32);
    return out;
}

}  // namespace

Bytes32 Ledger::chain_state_hash(std::span<const Transaction> rows) {
    Bytes32 s{};
    for (const auto& tx : rows) s = next_state_hash(s, tx);
    return s;
}

Ledger::AppendResult Ledger::append(const Transaction& tx, IssuerApprover* approver) {
    AppendResult res;
    if (tx.bound_row_count != rows_.size()) {
        res.reason = "stale: endorsed against height " + std::to_string(tx.bound_row_count) +
                     ", ledger at " + std::to_string(rows_.size());
        return res;
    }
    if (tx.genesis != rows_.empty()) {
        res.reason = rows_.empty() ? "row 0 must be the genesis row"
                                   : "genesis row after initialization";
        return res;
    }
    res.report = verify_transaction(ck_, reg_, cfg_, tx, *this);
    if (!res.report.ok) {
        res.reason = "verification failed";
        return res;
    }
    if (cfg_.reduced_cells) {
        if (!approver) {
            res.reason = "reduced mode requires issuer approval";
            return res;
        }
        auto decision = approver->approve(*this, tx);
        if (!decision.approved) {
            res.reason = "issuer rejected: " + decision.reason;
            return res;
        }
    }
    state_hash_ = next_state_hash(state_hash_, tx);
    rows_.push_back(tx);
    res.accepted = true;
    return res;
}

ColumnHistory Ledger::column(uint32_t participant, std::string_view asset_id) const {
    ColumnHistory col;
    for (const auto& tx : rows_) {
        auto slot = tx.slot_of(participant);
        if (!slot) continue;
        for (size_t a = 0; a < tx.asset_ids.size(); a++) {
            if (tx.asset_ids[a] != asset_id) continue;
            col.cms.push_back(tx.cells[a][*slot].cm);
            col.tks.push_back(tx.cells[a][*slot].tk);
        }
    }
    return col;
}

std::vector<Commitment> Ledger::column_complementary(uint32_t participant,
                                                     std::string_view asset_id) const {
    std::vector<Commitment> out;
    for (const auto& tx : rows_) {
        auto slot = tx.slot_of(participant);
        if (!slot) continue;
        for (size_t a = 0; a < tx.asset_ids.size(); a++) {
            if (tx.asset_ids[a] != asset_id) continue;
            const Cell& cell = tx.cells[a][*slot];
            if (cell.cm_prime) out.push_back(*cell.cm_prime);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// genesis
// ---------------------------------------------------------------------------

Ledger init_ledger(const CommitKey& ck, Registry reg, LedgerConfig cfg, const ValueList& initial,
                   std::span<Participant* const> endorsers, Rng& rng,
                   IssuerApprover* approver) {
    Ledger ledger(ck, std::move(reg), std::move(cfg));
    SpendDraft draft = build_draft(ck, ledger.registry(), ledger.config(), initial, 0, true, rng);
    Transaction genesis_tx;
    if (ledger.config().reduced_cells) {
        genesis_tx = draft.pre_tx;
    } else {
        auto result = collect_endorsements(draft, ledger, endorsers);
        if (std::holds_alternative<SpendRefused>(result)) {
            const auto& r = std::get<SpendRefused>(result);
            throw Error("genesis endorsement refused by participant " +
                        std::to_string(r.participant) + " on " + r.asset_id + " (" +
                        refusal_name(r.reason) + ")");
        }
        genesis_tx = std::get<Transaction>(result);
    }
    auto res = ledger.append(genesis_tx, approver);
    if (!res.accepted) throw Error("genesis append rejected: " + res.reason);
    return ledger;
}

// ---------------------------------------------------------------------------
// persistence
// ---------------------------------------------------------------------------

json registry_to_json(const Registry& reg) {
    json parts = json::array();
    for (const auto& p : reg.participants)
        parts.push_back({{"id", p.id}, {"pk", to_hex(p.pk.encode())}});
    json assets = json::array();
    for (const auto& a : reg.assets) assets.push_back({{"id", a.id}, {"issuer", a.issuer}});
    return {{"participants", parts}, {"assets", assets}};
}

Registry registry_from_json(const json& j) {
    Registry reg;
    for (const auto& p : j.at("participants")) {
        auto raw = array_from_hex<32>(p.at("pk").get<std::string>());
        auto pk = GroupElement::decode(raw);
        if (!pk) throw DecodeError("registry: bad participant key");
        reg.participants.push_back({p.at("id").get<std::string>(), *pk});
    }
    for (const auto& a : j.at("assets"))
        reg.assets.push_back({a.at("id").get<std::string>(), a.at("issuer").get<uint32_t>()});
    return reg;
}

json config_to_json(const LedgerConfig& cfg) {
    json j = {{"n_bits", cfg.n_bits},
              {"backend", cfg.backend == RangeBackend::Bulletproof ? "bulletproof" : "bits"},
              {"reduced_cells", cfg.reduced_cells},
              {"extract_max", cfg.extract_max}};
    if (cfg.audit_issuer) j["audit_issuer"] = *cfg.audit_issuer;
    return j;
}

LedgerConfig config_from_json(const json& j) {
    LedgerConfig cfg;
    cfg.n_bits = j.at("n_bits").get<uint32_t>();
    cfg.backend = j.at("backend").get<std::string>() == "bits" ? RangeBackend::BitDecomposition
                                                               : RangeBackend::Bulletproof;
    cfg.reduced_cells = j.at("reduced_cells").get<bool>();
    cfg.extract_max = j.at("extract_max").get<uint64_t>();
    if (j.contains("audit_issuer")) cfg.audit_issuer = j.at("audit_issuer").get<uint32_t>();
    return cfg;
}

json transaction_to_json(const Transaction& tx) {
    json cells = json::array();
    for (const auto& row : tx.cells) {
        json jrow = json::array();
        for (const auto& cell : row) {
            json jc = {{"cm", to_hex(cell.cm.point.encode())},
                       {"tk", to_hex(cell.tk.point.encode())},
                       {"pi_c", to_hex(cell.consistency.to_bytes())}};
            if (cell.endorsed()) {
                jc["cm_prime"] = to_hex(cell.cm_prime->point.encode());
                jc["tk_prime"] = to_hex(cell.tk_prime->point.encode());
                jc["pi_c_prime"] = to_hex(cell.consistency_prime->to_bytes());
                jc["pi_e"] = to_hex(cell.equivalence->to_bytes());
                jc["pi_a"] = to_hex(cell.asset->to_bytes());
            }
            if (cell.issuer) {
                jc["tk_issuer"] = to_hex(cell.issuer->token.point.encode());
                jc["pi_c_issuer"] = to_hex(cell.issuer->consistency.to_bytes());
            }
            jrow.push_back(jc);
        }
        cells.push_back(jrow);
    }
    return {{"txid", to_hex(tx.txid)},
            {"genesis", tx.genesis},
            {"bound_rows", tx.bound_row_count},
            {"assets", tx.asset_ids},
            {"participants", tx.participants},
            {"cells", cells}};
}

Transaction transaction_from_json(const json& j) {
    Transaction tx;
    auto txid_hex = j.at("txid").get<std::string>();
    tx.txid = array_from_hex<32>(txid_hex);
    tx.genesis = j.at("genesis").get<bool>();
    tx.bound_row_count = j.at("bound_rows").get<uint64_t>();
    tx.asset_ids = j.at("assets").get<std::vector<std::string>>();
    tx.participants = j.at("participants").get<std::vector<uint32_t>>();

    auto decode_point = [](const std::string& hex) {
        auto p = GroupElement::decode(array_from_hex<32>(hex));
        if (!p) throw DecodeError("transaction json: bad point");
        return *p;
    };
    for (const auto& jrow : j.at("cells")) {
        std::vector<Cell> row;
        for (const auto& jc : jrow) {
            Cell cell;
            cell.cm = {decode_point(jc.at("cm").get<std::string>())};
            cell.tk = {decode_point(jc.at("tk").get<std::string>())};
            auto pc = ConsistencyProof::from_bytes(from_hex(jc.at("pi_c").get<std::string>()));
            if (!pc) throw DecodeError("transaction json: bad pi_c");
            cell.consistency = *pc;
            if (jc.contains("cm_prime")) {
                cell.cm_prime = {decode_point(jc.at("cm_prime").get<std::string>())};
                cell.tk_prime = {decode_point(jc.at("tk_prime").get<std::string>())};
                auto pcp =
                    ConsistencyProof::from_bytes(from_hex(jc.at("pi_c_prime").get<std::string>()));
                auto pe = EquivalenceProof::from_bytes(from_hex(jc.at("pi_e").get<std::string>()));
                auto pa = AssetProof::from_bytes(from_hex(jc.at("pi_a").get<std::string>()));
                if (!pcp || !pe || !pa) throw DecodeError("transaction json: bad proofs");
                cell.consistency_prime = *pcp;
                cell.equivalence = *pe;
                cell.asset = *pa;
            }
            if (jc.contains("tk_issuer")) {
                auto tok = decode_point(jc.at("tk_issuer").get<std::string>());
                auto pci =
                    ConsistencyProof::from_bytes(from_hex(jc.at("pi_c_issuer").get<std::string>()));
                if (!pci) throw DecodeError("transaction json: bad issuer proof");
                cell.issuer = IssuerToken{{tok}, *pci};
            }
            row.push_back(std::move(cell));
        }
        tx.cells.push_back(std::move(row));
    }
    return tx;
}

json Ledger::to_json() const {
    json rows = json::array();
    for (const auto& tx : rows_) rows.push_back(transaction_to_json(tx));
    return {{"version", 1},
            {"h", to_hex(ck_.h.encode())},
            {"registry", registry_to_json(reg_)},
            {"config", config_to_json(cfg_)},
            {"rows", rows},
            {"state_hash", to_hex(state_hash_)}};
}

Ledger Ledger::from_json(const json& j) {
    auto h_raw = array_from_hex<32>(j.at("h").get<std::string>());
    auto h = GroupElement::decode(h_raw);
    if (!h) throw DecodeError("ledger json: bad commit key");
    CommitKey ck{GroupElement::base(), *h};
    Ledger ledger(ck, registry_from_json(j.at("registry")), config_from_json(j.at("config")));
    for (const auto& jtx : j.at("rows")) {
        Transaction tx = transaction_from_json(jtx);
        ledger.state_hash_ = next_state_hash(ledger.state_hash_, tx);
        ledger.rows_.push_back(std::move(tx));
    }
    if (to_hex(ledger.state_hash_) != j.at("state_hash").get<std::string>())
        throw DecodeError("ledger json: state hash mismatch");
    return ledger;
}

void Ledger::save(const std::filesystem::path& path) const {
    ByteWriter header;
    json meta = {{"version", 1},
                 {"h", to_hex(ck_.h.encode())},
                 {"registry", registry_to_json(reg_)},
                 {"config", config_to_json(cfg_)}};
    std::string meta_str = meta.dump();

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open ledger file for writing");
    std::ofstream idx(path.string() + ".idx", std::ios::binary | std::ios::trunc);
    if (!idx) throw Error("cannot open ledger index for writing");

    auto write_u64 = [](std::ofstream& s, uint64_t v) {
        uint8_t enc[8];
        store_le64(enc, v);
        s.write(reinterpret_cast<const char*>(enc), 8);
    };

    out.write("PADL", 4);
    write_u64(out, meta_str.size());
    out.write(meta_str.data(), std::streamsize(meta_str.size()));

    idx.write("PIDX", 4);
    write_u64(idx, rows_.size());
    for (const auto& tx : rows_) {
        uint64_t offset = uint64_t(out.tellp());
        write_u64(idx, offset);
        Bytes bytes = tx.to_bytes();
        write_u64(out, bytes.size());
        out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    }
    if (!out || !idx) throw Error("ledger write failed");
}

Ledger Ledger::load(const std::filesystem::path& path, bool full_verify) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw Error("cannot open ledger file");
    char magic[4];
    probe.read(magic, 4);
    uint8_t enc[8];
    probe.read(reinterpret_cast<char*>(enc), 8);
    if (!probe || std::memcmp(magic, "PADL", 4) != 0) throw DecodeError("bad ledger magic");
    std::string meta_str(load_le64(enc), '\0');
    probe.read(meta_str.data(), std::streamsize(meta_str.size()));
    if (!probe) throw DecodeError("truncated ledger header");
    json meta = json::parse(meta_str);
    auto h = GroupElement::decode(array_from_hex<32>(meta.at("h").get<std::string>()));
    if (!h) throw DecodeError("ledger commit key unreadable");
    return load(CommitKey{GroupElement::base(), *h}, path, full_verify);
}

Ledger Ledger::load(const CommitKey& ck, const std::filesystem::path& path, bool full_verify) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open ledger file");
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "PADL", 4) != 0) throw DecodeError("bad ledger magic");
    auto read_u64 = [&]() {
        uint8_t enc[8];
        in.read(reinterpret_cast<char*>(enc), 8);
        if (!in) throw DecodeError("truncated ledger file");
        return load_le64(enc);
    };
    uint64_t meta_len = read_u64();
    std::string meta_str(meta_len, '\0');
    in.read(meta_str.data(), std::streamsize(meta_len));
    if (!in) throw DecodeError("truncated ledger header");
    json meta = json::parse(meta_str);

    auto h_raw = array_from_hex<32>(meta.at("h").get<std::string>());
    auto h = GroupElement::decode(h_raw);
    if (!h || !(ck.h == *h)) throw DecodeError("ledger commit key mismatch");

    Ledger ledger(ck, registry_from_json(meta.at("registry")),
                  config_from_json(meta.at("config")));
    while (in.peek() != EOF) {
        uint64_t len = read_u64();
        Bytes bytes(len);
        in.read(reinterpret_cast<char*>(bytes.data()), std::streamsize(len));
        if (!in) throw DecodeError("truncated ledger row");
        auto tx = Transaction::from_bytes(bytes);
        if (!tx) throw DecodeError("malformed ledger row");
        if (full_verify) {
            if (tx->bound_row_count != ledger.rows_.size() || tx->genesis != ledger.rows_.empty())
                throw DecodeError("ledger row fails verification: height binding");
            auto rep = verify_transaction(ck, ledger.reg_, ledger.cfg_, *tx, ledger);
            if (!rep.ok) throw DecodeError("ledger row fails verification");
        }
        ledger.state_hash_ = next_state_hash(ledger.state_hash_, *tx);
        ledger.rows_.push_back(std::move(*tx));
    }
    return ledger;
}

}  // namespace padl
