#pragma once

#include <string_view>

#include "padl/bytes.hpp"
#include "padl/ristretto.hpp"
#include "padl/scalar.hpp"
#include "padl/sha512.hpp"

namespace padl {

// Fiat-Shamir transcript: a chained hash over length-framed labeled messages.
// Same absorption sequence gives the same challenges; any byte difference
// anywhere upstream changes every later challenge.
class Transcript {
public:
    explicit Transcript(std::string_view domain_tag);

    void absorb(std::string_view label, std::span<const uint8_t> data);
    void absorb_point(std::string_view label, const GroupElement& p) {
        Bytes32 enc = p.encode();
        absorb(label, enc);
    }
    void absorb_scalar(std::string_view label, const Scalar& s) {
        Bytes32 enc = s.to_bytes();
        absorb(label, enc);
    }
    void absorb_u64(std::string_view label, uint64_t v) {
        uint8_t enc[8];
        store_le64(enc, v);
        absorb(label, std::span<const uint8_t>(enc, 8));
    }

    Scalar challenge_scalar(std::string_view label);
    Bytes32 challenge_bytes(std::string_view label);

    // Child transcript for a sub-proof, bound to everything absorbed so far.
    Transcript fork(std::string_view label) const;

private:
    void ratchet(uint8_t op, std::string_view label, std::span<const uint8_t> data);

    Bytes64 state_;
};

}  // namespace padl
