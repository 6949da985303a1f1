#pragma once

#include <optional>
#include <span>
#include <vector>

#include "padl/bytes.hpp"
#include "padl/fe25519.hpp"
#include "padl/scalar.hpp"

namespace padl {

// Element of the ristretto255 prime-order group. Canonical 32-byte encoding;
// decoding rejects non-canonical strings. Internally an extended-coordinate
// point on the twisted Edwards curve; equality is coset equality.
class GroupElement {
public:
    GroupElement() : GroupElement(identity()) {}

    static const GroupElement& identity();
    static const GroupElement& base();  // standard generator

    static std::optional<GroupElement> decode(const Bytes32& bytes);
    // Deterministic hash-to-group from 64 uniform bytes (two Elligator maps).
    static GroupElement from_uniform_bytes(const Bytes64& bytes);

    Bytes32 encode() const;

    GroupElement operator+(const GroupElement& o) const;
    GroupElement operator-(const GroupElement& o) const;
    GroupElement operator-() const;
    GroupElement& operator+=(const GroupElement& o) { return *this = *this + o; }
    GroupElement& operator-=(const GroupElement& o) { return *this = *this - o; }

    GroupElement dbl() const;

    // Fixed-window scalar multiplication, branch-free table selection.
    GroupElement mul(const Scalar& s) const;

    // a*P + b*Q with shared doublings, branch-free lookups (commitment path).
    static GroupElement double_mul(const Scalar& a, const GroupElement& P, const Scalar& b,
                                   const GroupElement& Q);

    bool operator==(const GroupElement& o) const;
    bool operator!=(const GroupElement& o) const { return !(*this == o); }
    bool is_identity() const { return *this == identity(); }

    // exposed for multiscalar internals
    Fe25519 X, Y, Z, T;

private:
    GroupElement(const Fe25519& x, const Fe25519& y, const Fe25519& z, const Fe25519& t)
        : X(x), Y(y), Z(z), T(t) {}
    friend GroupElement ext_from_parts(const Fe25519&, const Fe25519&, const Fe25519&,
                                       const Fe25519&);
};

inline GroupElement operator*(const Scalar& s, const GroupElement& p) { return p.mul(s); }

// sum_i scalars[i] * points[i], variable-time (verification paths only).
GroupElement multiscalar_mul_vartime(std::span<const Scalar> scalars,
                                     std::span<const GroupElement> points);

// Torsion-independent lookup key: affine (x, sign(y)) of 4*P. Two group-equal
// elements always map to the same key, distinct elements never collide.
using PointKey = std::array<uint8_t, 33>;
PointKey point_key(const GroupElement& p);
std::vector<PointKey> batch_point_keys(std::span<const GroupElement> pts);

}  // namespace padl
