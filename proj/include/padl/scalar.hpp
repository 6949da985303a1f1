#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "padl/bytes.hpp"

namespace padl {

// Integer modulo the ristretto255 group order
// l = 2^252 + 27742317777372353535851937790883648493.
// Stored canonically reduced, little-endian limbs. Arithmetic is branch-free
// on secret values (Montgomery multiplication, masked conditional moves).
class Scalar {
public:
    Scalar() : limb_{0, 0, 0, 0} {}

    static Scalar zero() { return Scalar(); }
    static Scalar one() { return from_u64(1); }
    static Scalar from_u64(uint64_t v);
    // Signed amounts ride in the exponent as l - |v|.
    static Scalar from_i64(int64_t v);

    // Canonical 32-byte little-endian decoding; rejects values >= l.
    static std::optional<Scalar> from_bytes(const Bytes32& bytes);
    // Reduces an arbitrary 64-byte string mod l (for hashes / wide randomness).
    static Scalar from_bytes_wide(const Bytes64& bytes);
    // Reduces an arbitrary 32-byte string mod l.
    static Scalar reduce_from_bytes(const Bytes32& bytes);

    Bytes32 to_bytes() const;

    Scalar operator+(const Scalar& o) const;
    Scalar operator-(const Scalar& o) const;
    Scalar operator*(const Scalar& o) const;
    Scalar operator-() const;
    Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
    Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
    Scalar& operator*=(const Scalar& o) { return *this = *this * o; }

    bool operator==(const Scalar& o) const;
    bool operator!=(const Scalar& o) const { return !(*this == o); }

    bool is_zero() const;
    // Multiplicative inverse; zero maps to zero.
    Scalar invert() const;

    // Canonical limbs, little-endian, value < l.
    const uint64_t* limbs() const { return limb_; }

private:
    uint64_t limb_[4];
};

}  // namespace padl
