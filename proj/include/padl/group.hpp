#pragma once

#include <span>

#include "padl/errors.hpp"
#include "padl/ristretto.hpp"
#include "padl/rng.hpp"
#include "padl/scalar.hpp"

namespace padl {

// Pedersen commitment g^v * h^r.
struct Commitment {
    GroupElement point;

    Commitment operator*(const Commitment& o) const { return {point + o.point}; }
    bool operator==(const Commitment& o) const { return point == o.point; }
    bool operator!=(const Commitment& o) const { return point != o.point; }
};

// pk^r beside a commitment; anchors consistency proofs and value extraction.
struct Token {
    GroupElement point;

    Token operator*(const Token& o) const { return {point + o.point}; }
    bool operator==(const Token& o) const { return point == o.point; }
    bool operator!=(const Token& o) const { return point != o.point; }
};

// Commitment bases. g is the standard generator; h comes out of a
// hash-to-group over contributed randomness so nobody knows log_g(h).
struct CommitKey {
    GroupElement g;
    GroupElement h;

    Commitment commit(const Scalar& v, const Scalar& r) const {
        return {GroupElement::double_mul(v, g, r, h)};
    }
    Commitment commit_i64(int64_t v, const Scalar& r) const {
        return commit(Scalar::from_i64(v), r);
    }
};

struct KeyPair {
    Scalar sk;
    GroupElement pk;  // h^sk, the account address
};

// Derives the ledger commit key from per-party randomness contributions.
// Deterministic in the contribution multiset.
CommitKey setup(std::span<const Scalar> contributions);

KeyPair keygen(const CommitKey& ck, Rng& rng);

Token make_token(const Scalar& r, const GroupElement& pk);

}  // namespace padl
