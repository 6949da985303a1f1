#include <doctest.h>

#include "padl/sigma.hpp"

using namespace padl;

namespace {

struct World {
    CommitKey ck;
    Rng rng;
    KeyPair kp;

    World() : ck(make_ck()), rng(Bytes32{42}), kp(keygen(ck, rng)) {}

    static CommitKey make_ck() {
        Scalar c[2] = {Scalar::from_u64(101), Scalar::from_u64(202)};
        return setup(c);
    }

    Transcript ctx(uint64_t txid_stub = 1) {
        Transcript t("padl/test");
        t.absorb_u64("txid", txid_stub);
        return t;
    }
};

}  // namespace

TEST_CASE("transcript determinism and sensitivity") {
    Transcript a("tag");
    Transcript b("tag");
    a.absorb_u64("x", 5);
    b.absorb_u64("x", 5);
    CHECK(a.challenge_scalar("c") == b.challenge_scalar("c"));

    Transcript c("tag");
    c.absorb_u64("x", 6);
    Transcript d("tag");
    d.absorb_u64("y", 5);
    Transcript e("other");
    e.absorb_u64("x", 5);
    Transcript f("tag");
    f.absorb_u64("x", 5);
    Scalar base = f.challenge_scalar("c");
    CHECK(c.challenge_scalar("c") != base);
    CHECK(d.challenge_scalar("c") != base);
    CHECK(e.challenge_scalar("c") != base);

    // label of the challenge matters too
    Transcript g("tag");
    g.absorb_u64("x", 5);
    CHECK(g.challenge_scalar("c2") != base);

    // fork binds the parent state
    Transcript h1("tag");
    h1.absorb_u64("x", 5);
    Transcript h2("tag");
    h2.absorb_u64("x", 6);
    CHECK(h1.fork("sub").challenge_scalar("c") != h2.fork("sub").challenge_scalar("c"));
}

TEST_CASE("consistency proof round trip") {
    World w;
    Scalar v = Scalar::from_u64(100);
    Scalar r = w.rng.next_scalar();
    Commitment cm = w.ck.commit(v, r);
    Token tk = make_token(r, w.kp.pk);
    auto proof = prove_consistency(w.ck, cm, tk, w.kp.pk, v, r, w.ctx(), w.rng);
    CHECK(verify_consistency(w.ck, cm, tk, w.kp.pk, proof, w.ctx()));

    SUBCASE("statement perturbation rejects") {
        Commitment cm_bad{cm.point + w.ck.g};
        CHECK(!verify_consistency(w.ck, cm_bad, tk, w.kp.pk, proof, w.ctx()));
    }
    SUBCASE("different txid context rejects") {
        CHECK(!verify_consistency(w.ck, cm, tk, w.kp.pk, proof, w.ctx(2)));
    }
    SUBCASE("single-field mutations reject") {
        auto p = proof;
        p.s1 += Scalar::one();
        CHECK(!verify_consistency(w.ck, cm, tk, w.kp.pk, p, w.ctx()));
        p = proof;
        p.s2 += Scalar::one();
        CHECK(!verify_consistency(w.ck, cm, tk, w.kp.pk, p, w.ctx()));
        p = proof;
        p.t1 = GroupElement::identity();
        CHECK(!verify_consistency(w.ck, cm, tk, w.kp.pk, p, w.ctx()));
        p = proof;
        p.t2 = p.t2 + w.ck.g;
        CHECK(!verify_consistency(w.ck, cm, tk, w.kp.pk, p, w.ctx()));
    }
    SUBCASE("garbage witness fails verification") {
        auto bad = prove_consistency(w.ck, cm, tk, w.kp.pk, v + Scalar::one(), r, w.ctx(), w.rng);
        CHECK(!verify_consistency(w.ck, cm, tk, w.kp.pk, bad, w.ctx()));
    }
    SUBCASE("serialization") {
        Bytes bytes = proof.to_bytes();
        CHECK(bytes.size() == 128);
        auto back = ConsistencyProof::from_bytes(bytes);
        REQUIRE(back.has_value());
        CHECK(*back == proof);
        bytes.pop_back();
        CHECK(!ConsistencyProof::from_bytes(bytes).has_value());
    }
}

TEST_CASE("equivalence proof round trip") {
    World w;
    Scalar v = Scalar::from_u64(77);
    Scalar r = w.rng.next_scalar();
    Scalar r2 = w.rng.next_scalar();
    Commitment cm = w.ck.commit(v, r);
    Commitment cm2 = w.ck.commit(v, r2);
    Token tk = make_token(r, w.kp.pk);
    Token tk2 = make_token(r2, w.kp.pk);

    auto proof = prove_equivalence(w.ck, cm, cm2, tk, tk2, w.kp.pk, w.kp.sk, w.ctx(), w.rng);
    CHECK(verify_equivalence(w.ck, cm, cm2, tk, tk2, w.kp.pk, proof, w.ctx()));
    CHECK(proof.to_bytes().size() == 64);

    SUBCASE("different committed values cannot be proven honestly") {
        Commitment cm3 = w.ck.commit(v + Scalar::one(), r2);
        auto bad = prove_equivalence(w.ck, cm, cm3, tk, tk2, w.kp.pk, w.kp.sk, w.ctx(), w.rng);
        CHECK(!verify_equivalence(w.ck, cm, cm3, tk, tk2, w.kp.pk, bad, w.ctx()));
    }
    SUBCASE("degenerate base errors at prove time") {
        CHECK_THROWS_AS(
            prove_equivalence(w.ck, cm, cm, tk, tk, w.kp.pk, w.kp.sk, w.ctx(), w.rng),
            DegenerateStatement);
    }
    SUBCASE("swapped statement order rejects") {
        CHECK(!verify_equivalence(w.ck, cm2, cm, tk, tk2, w.kp.pk, proof, w.ctx()));
    }
    SUBCASE("replay under a different context rejects") {
        CHECK(!verify_equivalence(w.ck, cm, cm2, tk, tk2, w.kp.pk, proof, w.ctx(9)));
    }
    SUBCASE("field mutations reject") {
        auto p = proof;
        p.s += Scalar::one();
        CHECK(!verify_equivalence(w.ck, cm, cm2, tk, tk2, w.kp.pk, p, w.ctx()));
        p = proof;
        p.t = p.t + w.ck.h;
        CHECK(!verify_equivalence(w.ck, cm, cm2, tk, tk2, w.kp.pk, p, w.ctx()));
    }
}

TEST_CASE("dlog equality proof") {
    World w;
    // (h, pk, c1, c2) with c2 = c1^sk
    GroupElement c1 = w.ck.g.mul(w.rng.next_scalar()) + w.ck.h.mul(w.rng.next_scalar());
    GroupElement c2 = c1.mul(w.kp.sk);
    auto proof =
        prove_dlog_equality(w.ck.h, w.kp.pk, c1, c2, w.kp.sk, w.ctx(), w.rng);
    CHECK(verify_dlog_equality(w.ck.h, w.kp.pk, c1, c2, proof, w.ctx()));
    CHECK(proof.to_bytes().size() == 96);

    SUBCASE("wrong witness rejects") {
        auto bad = prove_dlog_equality(w.ck.h, w.kp.pk, c1, c2, w.kp.sk + Scalar::one(),
                                       w.ctx(), w.rng);
        CHECK(!verify_dlog_equality(w.ck.h, w.kp.pk, c1, c2, bad, w.ctx()));
    }
    SUBCASE("identity base errors") {
        CHECK_THROWS_AS(prove_dlog_equality(GroupElement::identity(), w.kp.pk, c1, c2, w.kp.sk,
                                            w.ctx(), w.rng),
                        DegenerateStatement);
        CHECK(!verify_dlog_equality(GroupElement::identity(), w.kp.pk, c1, c2, proof, w.ctx()));
    }
    SUBCASE("field mutations reject") {
        auto p = proof;
        p.s += Scalar::one();
        CHECK(!verify_dlog_equality(w.ck.h, w.kp.pk, c1, c2, p, w.ctx()));
        p = proof;
        p.t_a = p.t_a + w.ck.g;
        CHECK(!verify_dlog_equality(w.ck.h, w.kp.pk, c1, c2, p, w.ctx()));
        p = proof;
        p.t_b = p.t_b + w.ck.g;
        CHECK(!verify_dlog_equality(w.ck.h, w.kp.pk, c1, c2, p, w.ctx()));
    }
}

TEST_CASE("completeness over many random statements") {
    World w;
    for (int i = 0; i < 250; i++) {
        Scalar v = Scalar::from_u64(w.rng.next_u64() >> 32);
        Scalar r = w.rng.next_scalar();
        Commitment cm = w.ck.commit(v, r);
        Token tk = make_token(r, w.kp.pk);
        auto cons = prove_consistency(w.ck, cm, tk, w.kp.pk, v, r, w.ctx(i), w.rng);
        CHECK(verify_consistency(w.ck, cm, tk, w.kp.pk, cons, w.ctx(i)));

        Scalar r2 = w.rng.next_scalar();
        Commitment cm2 = w.ck.commit(v, r2);
        Token tk2 = make_token(r2, w.kp.pk);
        auto eq = prove_equivalence(w.ck, cm, cm2, tk, tk2, w.kp.pk, w.kp.sk, w.ctx(i), w.rng);
        CHECK(verify_equivalence(w.ck, cm, cm2, tk, tk2, w.kp.pk, eq, w.ctx(i)));
    }
}
