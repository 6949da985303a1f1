#include "padl/scalar.hpp"

#include <cstring>

namespace padl {

namespace {

using u128 = unsigned __int128;

constexpr uint64_t kL[4] = {0x5812631a5cf5d3edULL, 0x14def9dea2f79cd6ULL, 0x0000000000000000ULL,
                            0x1000000000000000ULL};
// -l^-1 mod 2^64
constexpr uint64_t kLPrime = 0xd2b51da312547e1bULL;
// 2^512 mod l
constexpr uint64_t kR2[4] = {0xa40611e3449c0f01ULL, 0xd00e1ba768859347ULL, 0xceec73d217f5be65ULL,
                             0x0399411b7c309a3dULL};

// r = a + b, returns carry
inline uint64_t add4(uint64_t r[4], const uint64_t a[4], const uint64_t b[4]) {
    u128 c = 0;
    for (int i = 0; i < 4; i++) {
        c += (u128)a[i] + b[i];
        r[i] = (uint64_t)c;
        c >>= 64;
    }
    return (uint64_t)c;
}

// r = a - b, returns borrow (1 if a < b)
inline uint64_t sub4(uint64_t r[4], const uint64_t a[4], const uint64_t b[4]) {
    u128 borrow = 0;
    for (int i = 0; i < 4; i++) {
        u128 d = (u128)a[i] - b[i] - borrow;
        r[i] = (uint64_t)d;
        borrow = (d >> 64) & 1;
    }
    return (uint64_t)borrow;
}

// if mask (all-ones) then r = b else r = a
inline void cmov4(uint64_t r[4], const uint64_t a[4], const uint64_t b[4], uint64_t mask) {
    for (int i = 0; i < 4; i++) r[i] = a[i] ^ (mask & (a[i] ^ b[i]));
}

// reduce a value < 2l into [0, l)
inline void cond_sub_l(uint64_t r[4]) {
    uint64_t t[4];
    uint64_t borrow = sub4(t, r, kL);
    cmov4(r, t, r, (uint64_t)0 - borrow);  // borrow==1 -> keep r, borrow==0 -> t
}

// Montgomery product: r = a * b * 2^-256 mod l (CIOS). Requires a < 2^256, b < l.
void mont_mul(uint64_t r[4], const uint64_t a[4], const uint64_t b[4]) {
    uint64_t t[6] = {0, 0, 0, 0, 0, 0};
    for (int i = 0; i < 4; i++) {
        u128 carry = 0;
        for (int j = 0; j < 4; j++) {
            carry += (u128)t[j] + (u128)a[i] * b[j];
            t[j] = (uint64_t)carry;
            carry >>= 64;
        }
        carry += t[4];
        t[4] = (uint64_t)carry;
        t[5] = (uint64_t)(carry >> 64);

        uint64_t m = t[0] * kLPrime;
        carry = 0;
        carry += (u128)t[0] + (u128)m * kL[0];
        carry >>= 64;
        for (int j = 1; j < 4; j++) {
            carry += (u128)t[j] + (u128)m * kL[j];
            t[j - 1] = (uint64_t)carry;
            carry >>= 64;
        }
        carry += t[4];
        t[3] = (uint64_t)carry;
        t[4] = t[5] + (uint64_t)(carry >> 64);
        t[5] = 0;
    }
    // t < 2l here
    uint64_t out[4] = {t[0], t[1], t[2], t[3]};
    uint64_t over = t[4];
    uint64_t sub[4];
    uint64_t borrow = sub4(sub, out, kL);
    // subtract l when the 5th limb is set or out >= l
    uint64_t take = over | (1 - borrow);
    cmov4(out, out, sub, (uint64_t)0 - (take != 0));
    std::memcpy(r, out, 32);
}

inline void mont_one(uint64_t r[4]) {
    r[0] = 1;
    r[1] = r[2] = r[3] = 0;
}

// canonical product a*b mod l via two Montgomery passes
void mul_canonical(uint64_t r[4], const uint64_t a[4], const uint64_t b[4]) {
    uint64_t am[4];
    mont_mul(am, a, kR2);  // a * 2^256
    mont_mul(r, am, b);    // a * b
}

}  // namespace

Scalar Scalar::from_u64(uint64_t v) {
    Scalar s;
    s.limb_[0] = v;
    return s;
}

Scalar Scalar::from_i64(int64_t v) {
    if (v >= 0) return from_u64(uint64_t(v));
    return -from_u64(uint64_t(-(v + 1)) + 1);
}

std::optional<Scalar> Scalar::from_bytes(const Bytes32& bytes) {
    Scalar s;
    for (int i = 0; i < 4; i++) s.limb_[i] = load_le64(bytes.data() + 8 * i);
    uint64_t tmp[4];
    if (sub4(tmp, s.limb_, kL) == 0) return std::nullopt;  // >= l
    return s;
}

Scalar Scalar::reduce_from_bytes(const Bytes32& bytes) {
    uint64_t x[4];
    for (int i = 0; i < 4; i++) x[i] = load_le64(bytes.data() + 8 * i);
    Scalar s;
    uint64_t xm[4];
    mont_mul(xm, x, kR2);  // x * 2^256 mod l
    uint64_t one[4];
    mont_one(one);
    mont_mul(s.limb_, xm, one);  // x mod l
    return s;
}

Scalar Scalar::from_bytes_wide(const Bytes64& bytes) {
    uint64_t lo[4], hi[4];
    for (int i = 0; i < 4; i++) lo[i] = load_le64(bytes.data() + 8 * i);
    for (int i = 0; i < 4; i++) hi[i] = load_le64(bytes.data() + 32 + 8 * i);
    // x = hi*2^256 + lo;  hi*2^256 mod l = mont_mul(hi, R2)
    Scalar r;
    uint64_t hi_part[4];
    mont_mul(hi_part, hi, kR2);
    Bytes32 lo_bytes;
    for (int i = 0; i < 4; i++) store_le64(lo_bytes.data() + 8 * i, lo[i]);
    Scalar lo_red = reduce_from_bytes(lo_bytes);
    uint64_t sum[4];
    uint64_t carry = add4(sum, hi_part, lo_red.limb_);
    (void)carry;  // hi_part, lo_red < l so sum < 2l and carry == 0
    cond_sub_l(sum);
    std::memcpy(r.limb_, sum, 32);
    return r;
}

Bytes32 Scalar::to_bytes() const {
    Bytes32 out;
    for (int i = 0; i < 4; i++) store_le64(out.data() + 8 * i, limb_[i]);
    return out;
}

Scalar Scalar::operator+(const Scalar& o) const {
    Scalar r;
    add4(r.limb_, limb_, o.limb_);
    cond_sub_l(r.limb_);
    return r;
}

Scalar Scalar::operator-(const Scalar& o) const {
    Scalar r;
    uint64_t borrow = sub4(r.limb_, limb_, o.limb_);
    uint64_t fixed[4];
    add4(fixed, r.limb_, kL);
    cmov4(r.limb_, r.limb_, fixed, (uint64_t)0 - borrow);
    return r;
}

Scalar Scalar::operator*(const Scalar& o) const {
    Scalar r;
    mul_canonical(r.limb_, limb_, o.limb_);
    return r;
}

Scalar Scalar::operator-() const { return Scalar::zero() - *this; }

bool Scalar::operator==(const Scalar& o) const {
    uint64_t d = 0;
    for (int i = 0; i < 4; i++) d |= limb_[i] ^ o.limb_[i];
    return d == 0;
}

bool Scalar::is_zero() const { return *this == Scalar::zero(); }

Scalar Scalar::invert() const {
    // a^(l-2) by square-and-multiply over the fixed exponent
    uint64_t exp[4] = {kL[0] - 2, kL[1], kL[2], kL[3]};
    Scalar result = Scalar::one();
    Scalar base = *this;
    for (int i = 0; i < 256; i++) {
        if ((exp[i >> 6] >> (i & 63)) & 1) result = result * base;
        base = base * base;
    }
    return result;
}

}  // namespace padl
