#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "padl/desk.hpp"

using namespace padl;

namespace {

LedgerConfig cfg_with(uint64_t extract_max = uint64_t(1) << 14) {
    LedgerConfig cfg;
    cfg.extract_max = extract_max;
    return cfg;
}

}  // namespace

TEST_CASE("bond market genesis balances extract to the fixture values") {
    Desk desk({"custodian", "issuer", "broker", "m", "n"},
              {{"usd", "custodian"}, {"bond", "issuer"}}, cfg_with(), Rng(Bytes32{90}));
    desk.init({{"usd", {{"custodian", 3000}, {"issuer", 1000}}},
               {"bond", {{"issuer", 300}}}});
    CHECK(desk.balance_of("custodian", "usd") == 3000);
    CHECK(desk.balance_of("issuer", "usd") == 1000);
    CHECK(desk.balance_of("issuer", "bond") == 300);
    for (const char* who : {"broker", "m", "n"}) {
        CHECK(desk.balance_of(who, "usd") == 0);
        CHECK(desk.balance_of(who, "bond") == 0);
    }
}

TEST_CASE("registry validation") {
    CommitKey ck = setup(std::array{Scalar::from_u64(5)});
    Rng rng(Bytes32{91});
    KeyPair kp = keygen(ck, rng);

    Registry empty;
    empty.assets.push_back({"usd", 0});
    CHECK_THROWS_AS(Ledger(ck, empty, LedgerConfig{}), InvalidInput);

    Registry dup;
    dup.participants.push_back({"a", kp.pk});
    dup.participants.push_back({"b", kp.pk});
    dup.assets.push_back({"usd", 0});
    CHECK_THROWS_AS(Ledger(ck, dup, LedgerConfig{}), InvalidInput);

    Registry bad_issuer;
    bad_issuer.participants.push_back({"a", kp.pk});
    bad_issuer.assets.push_back({"usd", 7});
    CHECK_THROWS_AS(Ledger(ck, bad_issuer, LedgerConfig{}), InvalidInput);
}

TEST_CASE("all-zero genesis extracts zero everywhere") {
    Desk desk({"a", "b"}, {{"usd", "a"}}, cfg_with(), Rng(Bytes32{92}));
    desk.init({{"usd", {}}});
    CHECK(desk.balance_of("a", "usd") == 0);
    CHECK(desk.balance_of("b", "usd") == 0);
}

TEST_CASE("config immutability after genesis") {
    Desk desk({"a", "b"}, {{"usd", "a"}}, cfg_with(), Rng(Bytes32{93}));
    CommitKey ck = desk.ck();
    Ledger fresh(ck, desk.registry(), desk.config());
    LedgerConfig other = desk.config();
    other.n_bits = 16;
    fresh.reconfigure(other);  // fine before genesis
    desk.init({{"usd", {{"a", 10}}}});
    CHECK_THROWS_AS(desk.ledger().reconfigure(other), InvalidInput);
}

TEST_CASE("state hash chain detects omission and reorder") {
    Desk desk({"a", "b"}, {{"usd", "a"}}, cfg_with(), Rng(Bytes32{94}));
    desk.init({{"usd", {{"a", 900}}}});
    REQUIRE(desk.transfer("a", {{"usd", {{"a", -100}, {"b", 100}}}}).ok());
    REQUIRE(desk.transfer("a", {{"usd", {{"a", -50}, {"b", 50}}}}).ok());
    REQUIRE(desk.transfer("b", {{"usd", {{"a", 20}, {"b", -20}}}}).ok());

    const auto& rows = desk.ledger().rows();
    CHECK(Ledger::chain_state_hash(rows) == desk.ledger().state_hash());

    std::vector<Transaction> missing(rows.begin(), rows.end() - 1);
    CHECK(Ledger::chain_state_hash(missing) != desk.ledger().state_hash());

    std::vector<Transaction> skipped = {rows[0], rows[2], rows[3]};
    CHECK(Ledger::chain_state_hash(skipped) != desk.ledger().state_hash());

    std::vector<Transaction> reordered = {rows[0], rows[2], rows[1], rows[3]};
    CHECK(Ledger::chain_state_hash(reordered) != desk.ledger().state_hash());
}

TEST_CASE("ledger persistence round trips") {
    Desk desk({"a", "b"}, {{"usd", "a"}}, cfg_with(), Rng(Bytes32{95}));
    desk.init({{"usd", {{"a", 700}}}});
    REQUIRE(desk.transfer("a", {{"usd", {{"a", -300}, {"b", 300}}}}).ok());

    auto path = std::filesystem::temp_directory_path() / "padl_test_ledger.bin";
    desk.ledger().save(path);

    SUBCASE("binary round trip preserves rows and state hash") {
        Ledger loaded = Ledger::load(desk.ck(), path);
        CHECK(loaded.row_count() == desk.ledger().row_count());
        CHECK(loaded.state_hash() == desk.ledger().state_hash());
        CHECK(loaded.rows()[1].txid == desk.ledger().rows()[1].txid);
    }
    SUBCASE("full verification at load") {
        Ledger loaded = Ledger::load(desk.ck(), path, /*full_verify=*/true);
        CHECK(loaded.state_hash() == desk.ledger().state_hash());
    }
    SUBCASE("sidecar index matches row offsets") {
        std::ifstream idx(path.string() + ".idx", std::ios::binary);
        REQUIRE(idx.good());
        char magic[4];
        idx.read(magic, 4);
        CHECK(std::string(magic, 4) == "PIDX");
        uint8_t enc[8];
        idx.read(reinterpret_cast<char*>(enc), 8);
        CHECK(load_le64(enc) == desk.ledger().row_count());
    }
    SUBCASE("json round trip") {
        auto j = desk.ledger().to_json();
        Ledger loaded = Ledger::from_json(j);
        CHECK(loaded.row_count() == desk.ledger().row_count());
        CHECK(loaded.state_hash() == desk.ledger().state_hash());
        // tampering with a row breaks the recorded state hash
        auto bad = j;
        bad["rows"].erase(1);
        CHECK_THROWS_AS(Ledger::from_json(bad), DecodeError);
    }
    std::filesystem::remove(path);
    std::filesystem::remove(path.string() + ".idx");
}

TEST_CASE("issuer can run negative in its own asset only") {
    Desk desk({"bank", "client"}, {{"usd", "bank"}}, cfg_with(), Rng(Bytes32{96}));
    desk.init({{"usd", {{"bank", 1000}}}});
    // bank issues 3000 to the client: bank balance goes to -2000
    auto res = desk.transfer("bank", {{"usd", {{"bank", -3000}, {"client", 3000}}}});
    REQUIRE(res.ok());
    CHECK(desk.balance_of("bank", "usd") == -2000);
    CHECK(desk.balance_of("client", "usd") == 3000);
    // the client, not an issuer, cannot go negative
    auto res2 = desk.transfer("client", {{"usd", {{"bank", 3001}, {"client", -3001}}}});
    CHECK(res2.status == Desk::TransferResult::Status::Refused);
    CHECK(res2.refusal.reason == RefusalReason::InsufficientBalance);
}

namespace {

std::unique_ptr<Desk> settlement_desk() {
    LedgerConfig cfg = cfg_with(uint64_t(1) << 14);
    cfg.reduced_cells = true;
    cfg.audit_issuer = 0;  // the settlement bank
    auto desk = std::make_unique<Desk>(
        std::vector<std::string>{"settlement", "bank_a", "bank_b"},
        std::vector<std::pair<std::string, std::string>>{{"usd", "bank_b"}, {"mm", "bank_a"}},
        cfg, Rng(Bytes32{97}));
    desk->init({{"usd", {{"bank_b", 2000}}}, {"mm", {{"bank_a", 10}}}});
    return desk;
}

}  // namespace

TEST_CASE("reduced-cell settlement ledger") {
    auto desk = settlement_desk();

    SUBCASE("cells carry exactly the reduced field set") {
        const Transaction& genesis = desk->ledger().rows()[0];
        for (const auto& row : genesis.cells)
            for (const Cell& cell : row) {
                CHECK(!cell.endorsed());
                CHECK(!cell.cm_prime.has_value());
                REQUIRE(cell.issuer.has_value());
            }
    }
    SUBCASE("issuer extracts every value through its tokens") {
        const Transaction& genesis = desk->ledger().rows()[0];
        // usd row: settlement 0, bank_a 0, bank_b 2000
        auto* appr = desk->approver();
        REQUIRE(appr != nullptr);
        // spend moves 2000 from bank_b to bank_a
        auto res = desk->transfer("bank_b", {{"usd", {{"bank_a", 2000}, {"bank_b", -2000}}},
                                             {"mm", {{"bank_a", -10}, {"settlement", 10}}}});
        REQUIRE(res.ok());
        (void)genesis;
    }
    SUBCASE("issuer rejects a plaintext overspend") {
        auto res = desk->transfer("bank_a", {{"usd", {{"bank_a", -100}, {"bank_b", 100}}}});
        CHECK(res.status == Desk::TransferResult::Status::Rejected);
        CHECK(res.reject_reason.find("issuer rejected") != std::string::npos);
        CHECK(desk->ledger().row_count() == 1);
    }
    SUBCASE("append without approver is rejected") {
        ValueList vl = desk->make_values({{"usd", {{"bank_b", -5}, {"bank_a", 5}}}});
        auto result = spend(desk->ck(), desk->registry(), desk->config(), vl, desk->ledger(),
                            desk->endorsers(), 2, desk->rng());
        REQUIRE(std::holds_alternative<Transaction>(result));
        auto r = desk->ledger().append(std::get<Transaction>(result), nullptr);
        CHECK(!r.accepted);
        CHECK(r.reason.find("issuer approval") != std::string::npos);
    }
    SUBCASE("non-designated approver errors") {
        // an approver keyed by bank_a is not the configured audit issuer
        Rng rng(Bytes32{98});
        CommitKey ck = desk->ck();
        KeyPair foreign = keygen(ck, rng);
        IssuerApprover wrong(ck, desk->registry(), desk->config(), 1, foreign);
        ValueList vl = desk->make_values({{"usd", {{"bank_b", -5}, {"bank_a", 5}}}});
        auto result = spend(desk->ck(), desk->registry(), desk->config(), vl, desk->ledger(),
                            desk->endorsers(), 2, desk->rng());
        REQUIRE(std::holds_alternative<Transaction>(result));
        auto r = desk->ledger().append(std::get<Transaction>(result), &wrong);
        CHECK(!r.accepted);
    }
}

TEST_CASE("issuer token consistency is enforced in normal mode too") {
    LedgerConfig cfg = cfg_with();
    cfg.audit_issuer = 0;
    Desk desk({"auditor", "x", "y"}, {{"usd", "x"}}, cfg, Rng(Bytes32{99}));
    desk.init({{"usd", {{"x", 500}}}});
    auto res = desk.transfer("x", {{"usd", {{"x", -200}, {"y", 200}}}});
    REQUIRE(res.ok());

    // issuer (auditor) can extract through the audit token
    const Transaction& tx = desk.ledger().rows().back();
    const Cell& y_cell = tx.cells[0][2];
    REQUIRE(y_cell.issuer.has_value());
    auto v = extract_value(desk.ck(), y_cell.cm, y_cell.issuer->token,
                           desk.participant("auditor").keys().sk, 1 << 14);
    CHECK(v == 200);

    // a transaction missing its issuer token is rejected
    ValueList vl = desk.make_values({{"usd", {{"x", -5}, {"y", 5}}}});
    auto result = spend(desk.ck(), desk.registry(), desk.config(), vl, desk.ledger(),
                        desk.endorsers(), 1, desk.rng());
    REQUIRE(std::holds_alternative<Transaction>(result));
    Transaction bad = std::get<Transaction>(result);
    bad.cells[0][0].issuer.reset();
    auto r = desk.append(bad);
    CHECK(!r.accepted);
}
