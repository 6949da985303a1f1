#pragma once

#include "padl/group.hpp"
#include "padl/transcript.hpp"

namespace padl {

// Sigma-protocol NIZKs (Fiat-Shamir). Every prove/verify pair takes a
// transcript already seeded with the transaction context; the statement
// elements are absorbed in a fixed order before the challenge is drawn.

// Proves one r underlies both cm = g^v h^r and tk = pk^r.
struct ConsistencyProof {
    GroupElement t1, t2;
    Scalar s1, s2;

    Bytes to_bytes() const;  // 128 bytes
    static std::optional<ConsistencyProof> from_bytes(std::span<const uint8_t> data);
    bool operator==(const ConsistencyProof& o) const;
};

ConsistencyProof prove_consistency(const CommitKey& ck, const Commitment& cm, const Token& tk,
                                   const GroupElement& pk, const Scalar& v, const Scalar& r,
                                   Transcript ctx, Rng& rng);
bool verify_consistency(const CommitKey& ck, const Commitment& cm, const Token& tk,
                        const GroupElement& pk, const ConsistencyProof& proof, Transcript ctx);

// Proves cm and cm' commit to the same value, witnessed by the account key:
// Schnorr over base b = cm/cm' with a = tk/tk' = b^sk.
struct EquivalenceProof {
    GroupElement t;
    Scalar s;

    Bytes to_bytes() const;  // 64 bytes
    static std::optional<EquivalenceProof> from_bytes(std::span<const uint8_t> data);
    bool operator==(const EquivalenceProof& o) const;
};

EquivalenceProof prove_equivalence(const CommitKey& ck, const Commitment& cm,
                                   const Commitment& cm_prime, const Token& tk,
                                   const Token& tk_prime, const GroupElement& pk,
                                   const Scalar& sk, Transcript ctx, Rng& rng);
bool verify_equivalence(const CommitKey& ck, const Commitment& cm, const Commitment& cm_prime,
                        const Token& tk, const Token& tk_prime, const GroupElement& pk,
                        const EquivalenceProof& proof, Transcript ctx);

// Proves log_base1(elem1) == log_base2(elem2), the audit workhorse.
struct DlogEqualityProof {
    GroupElement t_a, t_b;
    Scalar s;

    Bytes to_bytes() const;  // 96 bytes
    static std::optional<DlogEqualityProof> from_bytes(std::span<const uint8_t> data);
    bool operator==(const DlogEqualityProof& o) const;
};

DlogEqualityProof prove_dlog_equality(const GroupElement& base1, const GroupElement& elem1,
                                      const GroupElement& base2, const GroupElement& elem2,
                                      const Scalar& x, Transcript ctx, Rng& rng);
bool verify_dlog_equality(const GroupElement& base1, const GroupElement& elem1,
                          const GroupElement& base2, const GroupElement& elem2,
                          const DlogEqualityProof& proof, Transcript ctx);

}  // namespace padl
