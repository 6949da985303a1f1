#include "padl/sigma.hpp"

#include <cstring>

namespace padl {

namespace {

void put_point(Bytes& out, const GroupElement& p) {
    Bytes32 enc = p.encode();
    out.insert(out.end(), enc.begin(), enc.end());
}

void put_scalar(Bytes& out, const Scalar& s) {
    Bytes32 enc = s.to_bytes();
    out.insert(out.end(), enc.begin(), enc.end());
}

std::optional<GroupElement> take_point(std::span<const uint8_t>& data) {
    if (data.size() < 32) return std::nullopt;
    Bytes32 raw;
    std::memcpy(raw.data(), data.data(), 32);
    data = data.subspan(32);
    return GroupElement::decode(raw);
}

std::optional<Scalar> take_scalar(std::span<const uint8_t>& data) {
    if (data.size() < 32) return std::nullopt;
    Bytes32 raw;
    std::memcpy(raw.data(), data.data(), 32);
    data = data.subspan(32);
    return Scalar::from_bytes(raw);
}

void absorb_consistency_statement(Transcript& ctx, const CommitKey& ck, const Commitment& cm,
                                  const Token& tk, const GroupElement& pk) {
    ctx.absorb("proof", std::span<const uint8_t>(
                            reinterpret_cast<const uint8_t*>("consistency"), 11));
    ctx.absorb_point("g", ck.g);
    ctx.absorb_point("h", ck.h);
    ctx.absorb_point("pk", pk);
    ctx.absorb_point("cm", cm.point);
    ctx.absorb_point("tk", tk.point);
}

void absorb_equivalence_statement(Transcript& ctx, const CommitKey& ck, const Commitment& cm,
                                  const Commitment& cm_prime, const Token& tk,
                                  const Token& tk_prime, const GroupElement& pk) {
    ctx.absorb("proof", std::span<const uint8_t>(
                            reinterpret_cast<const uint8_t*>("equivalence"), 11));
    ctx.absorb_point("g", ck.g);
    ctx.absorb_point("h", ck.h);
    ctx.absorb_point("pk", pk);
    ctx.absorb_point("cm", cm.point);
    ctx.absorb_point("tk", tk.point);
    ctx.absorb_point("cm'", cm_prime.point);
    ctx.absorb_point("tk'", tk_prime.point);
}

void absorb_dlog_statement(Transcript& ctx, const GroupElement& base1, const GroupElement& elem1,
                           const GroupElement& base2, const GroupElement& elem2) {
    ctx.absorb("proof", std::span<const uint8_t>(
                            reinterpret_cast<const uint8_t*>("dlog-equality"), 13));
    ctx.absorb_point("base1", base1);
    ctx.absorb_point("elem1", elem1);
    ctx.absorb_point("base2", base2);
    ctx.absorb_point("elem2", elem2);
}

}  // namespace

Bytes ConsistencyProof::to_bytes() const {
    Bytes out;
    out.reserve(128);
    put_point(out, t1);
    put_point(out, t2);
    put_scalar(out, s1);
    put_scalar(out, s2);
    return out;
}

std::optional<ConsistencyProof> ConsistencyProof::from_bytes(std::span<const uint8_t> data) {
    if (data.size() != 128) return std::nullopt;
    auto t1 = take_point(data);
    auto t2 = take_point(data);
    auto s1 = take_scalar(data);
    auto s2 = take_scalar(data);
    if (!t1 || !t2 || !s1 || !s2) return std::nullopt;
    return ConsistencyProof{*t1, *t2, *s1, *s2};
}

bool ConsistencyProof::operator==(const ConsistencyProof& o) const {
    return t1 == o.t1 && t2 == o.t2 && s1 == o.s1 && s2 == o.s2;
}

ConsistencyProof prove_consistency(const CommitKey& ck, const Commitment& cm, const Token& tk,
                                   const GroupElement& pk, const Scalar& v, const Scalar& r,
                                   Transcript ctx, Rng& rng) {
    Scalar u1 = rng.next_scalar();
    Scalar u2 = rng.next_scalar();
    ConsistencyProof proof;
    proof.t1 = ck.g.mul(u1) + ck.h.mul(u2);
    proof.t2 = pk.mul(u2);

    absorb_consistency_statement(ctx, ck, cm, tk, pk);
    ctx.absorb_point("t1", proof.t1);
    ctx.absorb_point("t2", proof.t2);
    Scalar c = ctx.challenge_scalar("c");

    proof.s1 = u1 + c * v;
    proof.s2 = u2 + c * r;
    return proof;
}

bool verify_consistency(const CommitKey& ck, const Commitment& cm, const Token& tk,
                        const GroupElement& pk, const ConsistencyProof& proof, Transcript ctx) {
    absorb_consistency_statement(ctx, ck, cm, tk, pk);
    ctx.absorb_point("t1", proof.t1);
    ctx.absorb_point("t2", proof.t2);
    Scalar c = ctx.challenge_scalar("c");

    // t1 * cm^c == g^s1 h^s2  and  t2 * tk^c == pk^s2
    GroupElement lhs1 = proof.t1 + cm.point.mul(c);
    GroupElement rhs1 = ck.g.mul(proof.s1) + ck.h.mul(proof.s2);
    if (lhs1 != rhs1) return false;
    GroupElement lhs2 = proof.t2 + tk.point.mul(c);
    GroupElement rhs2 = pk.mul(proof.s2);
    return lhs2 == rhs2;
}

Bytes EquivalenceProof::to_bytes() const {
    Bytes out;
    out.reserve(64);
    put_point(out, t);
    put_scalar(out, s);
    return out;
}

std::optional<EquivalenceProof> EquivalenceProof::from_bytes(std::span<const uint8_t> data) {
    if (data.size() != 64) return std::nullopt;
    auto t = take_point(data);
    auto s = take_scalar(data);
    if (!t || !s) return std::nullopt;
    return EquivalenceProof{*t, *s};
}

bool EquivalenceProof::operator==(const EquivalenceProof& o) const {
    return t == o.t && s == o.s;
}

EquivalenceProof prove_equivalence(const CommitKey& ck, const Commitment& cm,
                                   const Commitment& cm_prime, const Token& tk,
                                   const Token& tk_prime, const GroupElement& pk,
                                   const Scalar& sk, Transcript ctx, Rng& rng) {
    GroupElement b = cm.point - cm_prime.point;
    if (b.is_identity())
        throw DegenerateStatement("prove_equivalence: cm/cm' is the identity (r == r')");
    Scalar u = rng.next_scalar();
    EquivalenceProof proof;
    proof.t = b.mul(u);

    absorb_equivalence_statement(ctx, ck, cm, cm_prime, tk, tk_prime, pk);
    ctx.absorb_point("t", proof.t);
    Scalar c = ctx.challenge_scalar("c");
    proof.s = u + c * sk;
    return proof;
}

bool verify_equivalence(const CommitKey& ck, const Commitment& cm, const Commitment& cm_prime,
                        const Token& tk, const Token& tk_prime, const GroupElement& pk,
                        const EquivalenceProof& proof, Transcript ctx) {
    GroupElement a = tk.point - tk_prime.point;
    GroupElement b = cm.point - cm_prime.point;
    if (b.is_identity()) return false;

    absorb_equivalence_statement(ctx, ck, cm, cm_prime, tk, tk_prime, pk);
    ctx.absorb_point("t", proof.t);
    Scalar c = ctx.challenge_scalar("c");

    // t * a^c == b^s
    return proof.t + a.mul(c) == b.mul(proof.s);
}

Bytes DlogEqualityProof::to_bytes() const {
    Bytes out;
    out.reserve(96);
    put_point(out, t_a);
    put_point(out, t_b);
    put_scalar(out, s);
    return out;
}

std::optional<DlogEqualityProof> DlogEqualityProof::from_bytes(std::span<const uint8_t> data) {
    if (data.size() != 96) return std::nullopt;
    auto ta = take_point(data);
    auto tb = take_point(data);
    auto s = take_scalar(data);
    if (!ta || !tb || !s) return std::nullopt;
    return DlogEqualityProof{*ta, *tb, *s};
}

bool DlogEqualityProof::operator==(const DlogEqualityProof& o) const {
    return t_a == o.t_a && t_b == o.t_b && s == o.s;
}

DlogEqualityProof prove_dlog_equality(const GroupElement& base1, const GroupElement& elem1,
                                      const GroupElement& base2, const GroupElement& elem2,
                                      const Scalar& x, Transcript ctx, Rng& rng) {
    if (base1.is_identity() || base2.is_identity())
        throw DegenerateStatement("prove_dlog_equality: identity base");
    Scalar u = rng.next_scalar();
    DlogEqualityProof proof;
    proof.t_a = base1.mul(u);
    proof.t_b = base2.mul(u);

    absorb_dlog_statement(ctx, base1, elem1, base2, elem2);
    ctx.absorb_point("t_a", proof.t_a);
    ctx.absorb_point("t_b", proof.t_b);
    Scalar c = ctx.challenge_scalar("c");
    proof.s = u + c * x;
    return proof;
}

bool verify_dlog_equality(const GroupElement& base1, const GroupElement& elem1,
                          const GroupElement& base2, const GroupElement& elem2,
                          const DlogEqualityProof& proof, Transcript ctx) {
    if (base1.is_identity() || base2.is_identity()) return false;

    absorb_dlog_statement(ctx, base1, elem1, base2, elem2);
    ctx.absorb_point("t_a", proof.t_a);
    ctx.absorb_point("t_b", proof.t_b);
    Scalar c = ctx.challenge_scalar("c");

    // t_a * elem1^c == base1^s  and  t_b * elem2^c == base2^s
    return proof.t_a + elem1.mul(c) == base1.mul(proof.s) &&
           proof.t_b + elem2.mul(c) == base2.mul(proof.s);
}

}  // namespace padl
