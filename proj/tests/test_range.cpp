#include <doctest.h>

#include "padl/asset.hpp"
#include "padl/rangeproof.hpp"

using namespace padl;

namespace {

CommitKey test_ck() {
    Scalar c[1] = {Scalar::from_u64(7)};
    return setup(c);
}

Transcript ctx(uint64_t tag = 0) {
    Transcript t("padl/test/range");
    t.absorb_u64("tag", tag);
    return t;
}

}  // namespace

TEST_CASE("range proof boundaries, both backends") {
    CommitKey ck = test_ck();
    Rng rng(Bytes32{21});
    for (RangeBackend kind : {RangeBackend::BitDecomposition, RangeBackend::Bulletproof}) {
        CAPTURE(int(kind));
        const auto& backend = range_backend(kind);
        const uint32_t n = 8;

        Scalar r = rng.next_scalar();
        auto p0 = backend.prove(ck, Scalar::zero(), r, n, ctx(), rng);
        CHECK(backend.verify(ck, ck.commit(Scalar::zero(), r), n, p0, ctx()));

        Scalar top = Scalar::from_u64(255);
        auto p1 = backend.prove(ck, top, r, n, ctx(), rng);
        CHECK(backend.verify(ck, ck.commit(top, r), n, p1, ctx()));

        CHECK_THROWS_AS(backend.prove(ck, Scalar::from_u64(256), r, n, ctx(), rng), RangeError);
        CHECK_THROWS_AS(backend.prove(ck, -Scalar::one(), r, n, ctx(), rng), RangeError);
    }
}

TEST_CASE("32-bit boundary value accepted") {
    CommitKey ck = test_ck();
    Rng rng(Bytes32{22});
    Scalar v = Scalar::from_u64(0xffffffffULL);  // 2^32 - 1
    Scalar r = rng.next_scalar();
    for (RangeBackend kind : {RangeBackend::BitDecomposition, RangeBackend::Bulletproof}) {
        const auto& backend = range_backend(kind);
        auto proof = backend.prove(ck, v, r, 32, ctx(), rng);
        CHECK(backend.verify(ck, ck.commit(v, r), 32, proof, ctx()));
        CHECK_THROWS_AS(backend.prove(ck, Scalar::from_u64(1ULL << 32), r, 32, ctx(), rng),
                        RangeError);
    }
}

TEST_CASE("range proof rejection paths") {
    CommitKey ck = test_ck();
    Rng rng(Bytes32{23});
    for (RangeBackend kind : {RangeBackend::BitDecomposition, RangeBackend::Bulletproof}) {
        CAPTURE(int(kind));
        const auto& backend = range_backend(kind);
        Scalar v = Scalar::from_u64(123456);
        Scalar r = rng.next_scalar();
        Commitment cm = ck.commit(v, r);
        auto proof = backend.prove(ck, v, r, 32, ctx(), rng);
        REQUIRE(backend.verify(ck, cm, 32, proof, ctx()));

        // replay against a shifted commitment
        Commitment shifted{cm.point + ck.g};
        CHECK(!backend.verify(ck, shifted, 32, proof, ctx()));
        // wrong context
        CHECK(!backend.verify(ck, cm, 32, proof, ctx(1)));
        // truncated payload
        auto cut = proof;
        cut.payload.pop_back();
        CHECK(!backend.verify(ck, cm, 32, cut, ctx()));
        // bit width mismatch
        CHECK(!backend.verify(ck, cm, 16, proof, ctx()));
        // single byte corruptions across the payload
        for (size_t i = 0; i < proof.payload.size(); i += 97) {
            auto bad = proof;
            bad.payload[i] ^= 0x01;
            CHECK(!backend.verify(ck, cm, 32, bad, ctx()));
        }
        // wire round trip
        auto wire = proof.to_bytes();
        auto back = RangeProof::from_bytes(wire);
        REQUIRE(back.has_value());
        CHECK(*back == proof);
        wire.pop_back();
        CHECK(!RangeProof::from_bytes(wire).has_value());
    }
}

TEST_CASE("bulletproof sizes are logarithmic") {
    CommitKey ck = test_ck();
    Rng rng(Bytes32{24});
    const auto& bp = range_backend(RangeBackend::Bulletproof);
    auto p32 = bp.prove(ck, Scalar::from_u64(5), rng.next_scalar(), 32, ctx(), rng);
    // 4 points + 3 scalars + 2*log2(32) points + 2 scalars
    CHECK(p32.payload.size() == 32 * (4 + 3 + 10 + 2));
    auto p64 = bp.prove(ck, Scalar::from_u64(5), rng.next_scalar(), 64, ctx(), rng);
    CHECK(p64.payload.size() == 32 * (4 + 3 + 12 + 2));
    // power-of-two widths only for this backend
    CHECK_THROWS_AS(bp.prove(ck, Scalar::from_u64(5), rng.next_scalar(), 24, ctx(), rng),
                    RangeError);
}

TEST_CASE("random values round trip and batch agrees with sequential") {
    CommitKey ck = test_ck();
    Rng rng(Bytes32{25});
    const auto& bp = range_backend(RangeBackend::Bulletproof);
    CHECK(bp.supports_batch());

    std::vector<RangeProof> proofs;
    std::vector<Commitment> cms;
    for (int i = 0; i < 8; i++) {
        uint64_t value = rng.next_u64() & 0xffffffffULL;
        Scalar v = Scalar::from_u64(value);
        Scalar r = rng.next_scalar();
        cms.push_back(ck.commit(v, r));
        proofs.push_back(bp.prove(ck, v, r, 32, ctx(i), rng));
    }
    std::vector<RangeVerifyInstance> insts;
    for (int i = 0; i < 8; i++)
        insts.push_back(RangeVerifyInstance{cms[i], 32, &proofs[i], ctx(i)});
    CHECK(bp.verify_batch(ck, insts));
    for (int i = 0; i < 8; i++) CHECK(bp.verify(ck, cms[i], 32, proofs[i], ctx(i)));

    // batch with one corrupted member fails even though others are fine
    auto bad = proofs[3];
    bad.payload[40] ^= 0x10;
    insts[3].proof = &bad;
    CHECK(!bp.verify_batch(ck, insts));
    insts[3].proof = &proofs[3];
    insts[5].ctx = ctx(999);
    CHECK(!bp.verify_batch(ck, insts));
}

namespace {

struct AssetWorld {
    CommitKey ck;
    Rng rng;
    KeyPair kp;
    AssetWorld() : ck(test_ck()), rng(Bytes32{31}), kp(keygen(ck, rng)) {}

    // build a history of commitments to given values under fresh blindings
    ColumnHistory history(std::initializer_list<int64_t> values) {
        ColumnHistory h;
        for (int64_t v : values) {
            Scalar r = rng.next_scalar();
            h.cms.push_back(ck.commit_i64(v, r));
            h.tks.push_back(make_token(r, kp.pk));
        }
        return h;
    }
};

}  // namespace

TEST_CASE("asset proof accepts the true balance") {
    AssetWorld w;
    const auto& backend = range_backend(RangeBackend::Bulletproof);
    ColumnHistory hist = w.history({30, -10, 15});
    Scalar r = w.rng.next_scalar();
    Commitment cm = w.ck.commit_i64(7, r);
    Token tk = make_token(r, w.kp.pk);

    auto proof = prove_asset(w.ck, hist, cm, tk, 42, 0, w.kp.sk, w.kp.pk, 32, backend, ctx(),
                             w.rng);
    CHECK(verify_asset(w.ck, hist, cm, tk, w.kp.pk, proof, 0, 32, backend, ctx()));

    SUBCASE("independent extraction oracle agrees the balance is 42") {
        // brute force: walk candidate balances and compare the aggregate
        GroupElement agg = aggregate_commitments(hist.cms).point + cm.point;
        GroupElement g_sk = w.ck.g;  // base g with exponent = candidate value
        Token tk_pi = aggregate_tokens(hist.tks);
        tk_pi.point += tk.point;
        // cm_pi^sk / tk_pi = (g^sk)^balance
        GroupElement target = agg.mul(w.kp.sk) - tk_pi.point;
        GroupElement base = g_sk.mul(w.kp.sk);
        int64_t found = -1;
        GroupElement walk = GroupElement::identity();
        for (int64_t cand = 0; cand <= 100; cand++) {
            if (walk == target) {
                found = cand;
                break;
            }
            walk += base;
        }
        CHECK(found == 42);
    }
    SUBCASE("perturbed fresh commitment rejects") {
        auto bad = proof;
        bad.cm_agg.point += w.ck.g;
        CHECK(!verify_asset(w.ck, hist, cm, tk, w.kp.pk, bad, 0, 32, backend, ctx()));
    }
    SUBCASE("omitted history row rejects") {
        ColumnHistory shorter = hist;
        shorter.cms.pop_back();
        shorter.tks.pop_back();
        CHECK(!verify_asset(w.ck, shorter, cm, tk, w.kp.pk, proof, 0, 32, backend, ctx()));
    }
    SUBCASE("serialization round trip") {
        auto wire = proof.to_bytes();
        auto back = AssetProof::from_bytes(wire);
        REQUIRE(back.has_value());
        CHECK(*back == proof);
    }
}

TEST_CASE("asset proof boundary and error cases") {
    AssetWorld w;
    const auto& backend = range_backend(RangeBackend::Bulletproof);

    // empty history, current value 0: balance 0 accepted
    ColumnHistory empty;
    Scalar r = w.rng.next_scalar();
    Commitment cm = w.ck.commit_i64(0, r);
    Token tk = make_token(r, w.kp.pk);
    auto proof =
        prove_asset(w.ck, empty, cm, tk, 0, 0, w.kp.sk, w.kp.pk, 32, backend, ctx(), w.rng);
    CHECK(verify_asset(w.ck, empty, cm, tk, w.kp.pk, proof, 0, 32, backend, ctx()));

    // negative balance is a prove-time error
    CHECK_THROWS_AS(
        prove_asset(w.ck, empty, cm, tk, -1000, 0, w.kp.sk, w.kp.pk, 32, backend, ctx(), w.rng),
        RangeError);
}

TEST_CASE("forged aggregate token without consistency is rejected") {
    // A cheating owner picks tk' = tk_pi / b^sk so the bare equivalence
    // relation holds for a fabricated balance; the consistency proof on the
    // fresh pair is what rules this out.
    AssetWorld w;
    const auto& backend = range_backend(RangeBackend::Bulletproof);
    ColumnHistory hist = w.history({5});
    Scalar r = w.rng.next_scalar();
    Commitment cm = w.ck.commit_i64(-20, r);  // spend below balance
    Token tk = make_token(r, w.kp.pk);
    // true balance would be -15; fabricate 3
    int64_t fake_balance = 3;

    Commitment cm_pi = aggregate_commitments(hist.cms);
    cm_pi.point += cm.point;
    Token tk_pi = aggregate_tokens(hist.tks);
    tk_pi.point += tk.point;

    Scalar r_fake = w.rng.next_scalar();
    Commitment cm_fake = w.ck.commit_i64(fake_balance, r_fake);
    GroupElement b = cm_pi.point - cm_fake.point;
    Token tk_fake{tk_pi.point - b.mul(w.kp.sk)};  // forged, not pk^r_fake

    AssetProof forged;
    forged.cm_agg = cm_fake;
    forged.tk_agg = tk_fake;
    Transcript base = ctx();
    base.absorb_u64("asset/shift", 0);
    base.absorb_u64("asset/n", 32);
    // the forger can only prove consistency with its actual witness, which
    // does not match the forged token
    forged.consistency = prove_consistency(w.ck, cm_fake, tk_fake, w.kp.pk,
                                           Scalar::from_i64(fake_balance), r_fake,
                                           base.fork("asset/consistency"), w.rng);
    forged.equivalence = prove_equivalence(w.ck, cm_pi, cm_fake, tk_pi, tk_fake, w.kp.pk,
                                           w.kp.sk, base.fork("asset/equivalence"), w.rng);
    forged.range = backend.prove(w.ck, Scalar::from_i64(fake_balance), r_fake, 32,
                                 base.fork("asset/range"), w.rng);

    // equivalence and range alone would pass; the full check must not
    CHECK(verify_equivalence(w.ck, cm_pi, cm_fake, tk_pi, tk_fake, w.kp.pk, forged.equivalence,
                             base.fork("asset/equivalence")));
    CHECK(!verify_asset(w.ck, hist, cm, tk, w.kp.pk, forged, 0, 32, backend, ctx()));
}

TEST_CASE("issuer shift allows bounded negative balances") {
    AssetWorld w;
    const auto& backend = range_backend(RangeBackend::Bulletproof);
    ColumnHistory hist = w.history({1000});
    Scalar r = w.rng.next_scalar();
    Commitment cm = w.ck.commit_i64(-3000, r);
    Token tk = make_token(r, w.kp.pk);
    uint64_t shift = uint64_t(1) << 31;

    auto proof = prove_asset(w.ck, hist, cm, tk, -2000, shift, w.kp.sk, w.kp.pk, 32, backend,
                             ctx(), w.rng);
    CHECK(verify_asset(w.ck, hist, cm, tk, w.kp.pk, proof, shift, 32, backend, ctx()));
    // verifier that does not apply the shift rejects
    CHECK(!verify_asset(w.ck, hist, cm, tk, w.kp.pk, proof, 0, 32, backend, ctx()));
    // below the allowance is still an error
    CHECK_THROWS_AS(prove_asset(w.ck, hist, cm, tk, -int64_t(shift) - 1, shift, w.kp.sk,
                                w.kp.pk, 32, backend, ctx(), w.rng),
                    RangeError);
}

TEST_CASE("aggregation matches product over random histories") {
    AssetWorld w;
    for (int trial = 0; trial < 8; trial++) {
        ColumnHistory h;
        GroupElement prod = GroupElement::identity();
        for (int i = 0; i < 6; i++) {
            Scalar v = w.rng.next_scalar(), r = w.rng.next_scalar();
            h.cms.push_back(w.ck.commit(v, r));
            h.tks.push_back(make_token(r, w.kp.pk));
            prod += h.cms.back().point;
        }
        CHECK(aggregate_commitments(h.cms).point == prod);
    }
}
