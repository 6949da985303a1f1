#include "padl/pact.hpp"
#include "padl/serde.hpp"

namespace padl {

namespace {

constexpr uint8_t kFlagGenesis = 0x01;
constexpr uint8_t kCellEndorsed = 0x01;
constexpr uint8_t kCellIssuer = 0x02;

void write_cell(ByteWriter& w, const Cell& cell) {
    uint8_t flags = 0;
    if (cell.endorsed()) flags |= kCellEndorsed;
    if (cell.issuer) flags |= kCellIssuer;
    w.u8(flags);
    w.point(cell.cm.point);
    w.point(cell.tk.point);
    w.raw(cell.consistency.to_bytes());
    if (cell.endorsed()) {
        w.point(cell.cm_prime->point);
        w.point(cell.tk_prime->point);
        w.raw(cell.consistency_prime->to_bytes());
        w.raw(cell.equivalence->to_bytes());
        w.var_bytes(cell.asset->to_bytes());
    }
    if (cell.issuer) {
        w.point(cell.issuer->token.point);
        w.raw(cell.issuer->consistency.to_bytes());
    }
}

std::optional<Cell> read_cell(ByteReader& r) {
    auto flags = r.u8();
    if (!flags) return std::nullopt;
    Cell cell;
    auto cm = r.point();
    auto tk = r.point();
    auto cons_raw = r.raw(128);
    if (!cm || !tk || !cons_raw) return std::nullopt;
    cell.cm = {*cm};
    cell.tk = {*tk};
    auto cons = ConsistencyProof::from_bytes(*cons_raw);
    if (!cons) return std::nullopt;
    cell.consistency = *cons;
    if (*flags & kCellEndorsed) {
        auto cmp = r.point();
        auto tkp = r.point();
        auto consp_raw = r.raw(128);
        auto eq_raw = r.raw(64);
        auto asset_raw = r.var_bytes();
        if (!cmp || !tkp || !consp_raw || !eq_raw || !asset_raw) return std::nullopt;
        auto consp = ConsistencyProof::from_bytes(*consp_raw);
        auto eq = EquivalenceProof::from_bytes(*eq_raw);
        auto asset = AssetProof::from_bytes(*asset_raw);
        if (!consp || !eq || !asset) return std::nullopt;
        cell.cm_prime = {*cmp};
        cell.tk_prime = {*tkp};
        cell.consistency_prime = *consp;
        cell.equivalence = *eq;
        cell.asset = *asset;
    }
    if (*flags & kCellIssuer) {
        auto tok = r.point();
        auto cons_i_raw = r.raw(128);
        if (!tok || !cons_i_raw) return std::nullopt;
        auto cons_i = ConsistencyProof::from_bytes(*cons_i_raw);
        if (!cons_i) return std::nullopt;
        cell.issuer = IssuerToken{{*tok}, *cons_i};
    }
    return cell;
}

}  // namespace

Bytes Transaction::to_bytes() const {
    ByteWriter w;
    w.bytes32(txid);
    w.u8(genesis ? kFlagGenesis : 0);
    w.u64(bound_row_count);
    w.u16(uint16_t(asset_ids.size()));
    w.u16(uint16_t(participants.size()));
    for (const auto& id : asset_ids) w.str(id);
    for (uint32_t p : participants) w.u32(p);
    for (const auto& row : cells)
        for (const auto& cell : row) write_cell(w, cell);
    return w.take();
}

std::optional<Transaction> Transaction::from_bytes(std::span<const uint8_t> data) {
    ByteReader r(data);
    Transaction tx;
    auto txid = r.bytes32();
    auto flags = r.u8();
    auto rows = r.u64();
    auto n_assets = r.u16();
    auto n_parts = r.u16();
    if (!txid || !flags || !rows || !n_assets || !n_parts) return std::nullopt;
    tx.txid = *txid;
    tx.genesis = (*flags & kFlagGenesis) != 0;
    tx.bound_row_count = *rows;
    for (uint16_t a = 0; a < *n_assets; a++) {
        auto id = r.str();
        if (!id) return std::nullopt;
        tx.asset_ids.push_back(*id);
    }
    for (uint16_t p = 0; p < *n_parts; p++) {
        auto idx = r.u32();
        if (!idx) return std::nullopt;
        tx.participants.push_back(*idx);
    }
    for (uint16_t a = 0; a < *n_assets; a++) {
        std::vector<Cell> row;
        for (uint16_t p = 0; p < *n_parts; p++) {
            auto cell = read_cell(r);
            if (!cell) return std::nullopt;
            row.push_back(std::move(*cell));
        }
        tx.cells.push_back(std::move(row));
    }
    if (!r.done()) return std::nullopt;
    return tx;
}

}  // namespace padl
