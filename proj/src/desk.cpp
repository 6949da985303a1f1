#include "padl/desk.hpp"

namespace padl {

namespace {

std::vector<std::pair<std::string, KeyPair>> derive_wallets(
    const std::vector<std::string>& ids, const Rng& rng, CommitKey& ck_out) {
    // every party contributes to the commit key randomness, then keys derive
    // from per-party streams
    std::vector<Scalar> contributions;
    for (const auto& id : ids) {
        Rng party = rng.fork("party/" + id);
        contributions.push_back(party.next_scalar());
    }
    ck_out = setup(contributions);
    std::vector<std::pair<std::string, KeyPair>> wallets;
    for (const auto& id : ids) {
        Rng party = rng.fork("keys/" + id);
        wallets.emplace_back(id, keygen(ck_out, party));
    }
    return wallets;
}

}  // namespace

Desk::Desk(const std::vector<std::string>& participant_ids,
           const std::vector<std::pair<std::string, std::string>>& assets_with_issuers,
           LedgerConfig cfg, Rng rng)
    : cfg_(std::move(cfg)), rng_(rng) {
    CommitKey ck;
    auto wallets = derive_wallets(participant_ids, rng_, ck);
    init_world(ck, wallets, assets_with_issuers);
}

Desk::Desk(const CommitKey& ck, const std::vector<std::pair<std::string, KeyPair>>& wallets,
           const std::vector<std::pair<std::string, std::string>>& assets_with_issuers,
           LedgerConfig cfg, Rng rng)
    : cfg_(std::move(cfg)), rng_(rng) {
    init_world(ck, wallets, assets_with_issuers);
}

void Desk::init_world(const CommitKey& ck,
                      const std::vector<std::pair<std::string, KeyPair>>& wallets,
                      const std::vector<std::pair<std::string, std::string>>& assets_with_issuers) {
    ck_ = ck;
    for (const auto& [id, kp] : wallets) reg_.participants.push_back({id, kp.pk});
    for (const auto& [asset_id, issuer_id] : assets_with_issuers) {
        bool found = false;
        for (uint32_t i = 0; i < reg_.participants.size(); i++) {
            if (reg_.participants[i].id == issuer_id) {
                reg_.assets.push_back({asset_id, i});
                found = true;
            }
        }
        if (!found) throw InvalidInput("desk: unknown issuer " + issuer_id);
    }
    for (uint32_t i = 0; i < reg_.participants.size(); i++)
        participants_.push_back(std::make_unique<Participant>(
            ck_, reg_, cfg_, i, wallets[i].second, rng_.fork("wallet/" + wallets[i].first)));
    if (cfg_.audit_issuer)
        approver_ = std::make_unique<IssuerApprover>(ck_, reg_, cfg_, *cfg_.audit_issuer,
                                                     wallets[*cfg_.audit_issuer].second);
}

ValueList Desk::make_values(const std::map<std::string, std::map<std::string, int64_t>>& values,
                            bool genesis) const {
    (void)genesis;
    ValueList out;
    for (const auto& [asset_id, by_participant] : values) {
        out.asset_ids.push_back(asset_id);
        std::vector<int64_t> row(reg_.participants.size(), 0);
        for (const auto& [pid, amount] : by_participant) {
            auto idx = reg_.participant_index(pid);
            if (!idx) throw InvalidInput("desk: unknown participant " + pid);
            row[*idx] = amount;
        }
        out.amounts.push_back(std::move(row));
    }
    return out;
}

void Desk::init(const std::map<std::string, std::map<std::string, int64_t>>& initial) {
    ValueList genesis_values = make_values(initial, true);
    ledger_.emplace(
        init_ledger(ck_, reg_, cfg_, genesis_values, endorsers(), rng_, approver()));
}

std::vector<Participant*> Desk::endorsers() {
    std::vector<Participant*> out;
    for (auto& p : participants_) out.push_back(p.get());
    return out;
}

Participant& Desk::participant(const std::string& id) {
    auto idx = reg_.participant_index(id);
    if (!idx) throw InvalidInput("desk: unknown participant " + id);
    return *participants_[*idx];
}

Desk::TransferResult Desk::transfer(
    const std::string& sender_id,
    const std::map<std::string, std::map<std::string, int64_t>>& values) {
    auto sender = reg_.participant_index(sender_id);
    if (!sender) throw InvalidInput("desk: unknown sender " + sender_id);
    ValueList vl = make_values(values);
    auto result = spend(ck_, reg_, cfg_, vl, *ledger_, endorsers(), *sender, rng_);
    TransferResult out;
    if (std::holds_alternative<SpendRefused>(result)) {
        out.status = TransferResult::Status::Refused;
        out.refusal = std::get<SpendRefused>(result);
        return out;
    }
    out.tx = std::get<Transaction>(result);
    auto res = ledger_->append(out.tx, approver());
    if (!res.accepted) {
        out.status = TransferResult::Status::Rejected;
        out.reject_reason = res.reason;
        return out;
    }
    out.status = TransferResult::Status::Accepted;
    return out;
}

Ledger::AppendResult Desk::append(const Transaction& tx) {
    return ledger_->append(tx, approver());
}

int64_t Desk::balance_of(const std::string& participant_id, const std::string& asset_id) const {
    auto idx = reg_.participant_index(participant_id);
    if (!idx) throw InvalidInput("desk: unknown participant " + participant_id);
    ColumnHistory col = ledger_->column(*idx, asset_id);
    int64_t balance = 0;
    for (size_t i = 0; i < col.cms.size(); i++) {
        auto v = participants_[*idx]->extract(col.cms[i], col.tks[i]);
        if (!v) throw Error("desk: owner extraction failed");
        balance += *v;
    }
    return balance;
}

}  // namespace padl
