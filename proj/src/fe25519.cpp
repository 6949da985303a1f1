#include "padl/fe25519.hpp"

#include <cstring>

namespace padl {

namespace {

using u128 = unsigned __int128;

constexpr uint64_t kMask51 = (1ULL << 51) - 1;

Fe25519 reduce(Fe25519 h) {
    uint64_t c;
    c = h.v[0] >> 51; h.v[1] += c; h.v[0] &= kMask51;
    c = h.v[1] >> 51; h.v[2] += c; h.v[1] &= kMask51;
    c = h.v[2] >> 51; h.v[3] += c; h.v[2] &= kMask51;
    c = h.v[3] >> 51; h.v[4] += c; h.v[3] &= kMask51;
    c = h.v[4] >> 51; h.v[0] += c * 19; h.v[4] &= kMask51;
    c = h.v[0] >> 51; h.v[1] += c; h.v[0] &= kMask51;
    return h;
}

}  // namespace

Fe25519 fe_zero() { return {{0, 0, 0, 0, 0}}; }
Fe25519 fe_one() { return {{1, 0, 0, 0, 0}}; }

Fe25519 fe_add(const Fe25519& f, const Fe25519& g) {
    Fe25519 h;
    for (int i = 0; i < 5; i++) h.v[i] = f.v[i] + g.v[i];
    return reduce(h);
}

Fe25519 fe_sub(const Fe25519& f, const Fe25519& g) {
    // add 2p before subtracting to keep limbs nonnegative
    Fe25519 h;
    h.v[0] = (f.v[0] + ((1ULL << 52) - 38)) - g.v[0];
    h.v[1] = (f.v[1] + ((1ULL << 52) - 2)) - g.v[1];
    h.v[2] = (f.v[2] + ((1ULL << 52) - 2)) - g.v[2];
    h.v[3] = (f.v[3] + ((1ULL << 52) - 2)) - g.v[3];
    h.v[4] = (f.v[4] + ((1ULL << 52) - 2)) - g.v[4];
    return reduce(h);
}

Fe25519 fe_neg(const Fe25519& f) { return fe_sub(fe_zero(), f); }

Fe25519 fe_mul(const Fe25519& f, const Fe25519& g) {
    uint64_t g19_1 = 19 * g.v[1], g19_2 = 19 * g.v[2], g19_3 = 19 * g.v[3], g19_4 = 19 * g.v[4];
    u128 t0 = (u128)f.v[0] * g.v[0] + (u128)f.v[1] * g19_4 + (u128)f.v[2] * g19_3 +
              (u128)f.v[3] * g19_2 + (u128)f.v[4] * g19_1;
    u128 t1 = (u128)f.v[0] * g.v[1] + (u128)f.v[1] * g.v[0] + (u128)f.v[2] * g19_4 +
              (u128)f.v[3] * g19_3 + (u128)f.v[4] * g19_2;
    u128 t2 = (u128)f.v[0] * g.v[2] + (u128)f.v[1] * g.v[1] + (u128)f.v[2] * g.v[0] +
              (u128)f.v[3] * g19_4 + (u128)f.v[4] * g19_3;
    u128 t3 = (u128)f.v[0] * g.v[3] + (u128)f.v[1] * g.v[2] + (u128)f.v[2] * g.v[1] +
              (u128)f.v[3] * g.v[0] + (u128)f.v[4] * g19_4;
    u128 t4 = (u128)f.v[0] * g.v[4] + (u128)f.v[1] * g.v[3] + (u128)f.v[2] * g.v[2] +
              (u128)f.v[3] * g.v[1] + (u128)f.v[4] * g.v[0];

    Fe25519 h;
    uint64_t c;
    h.v[0] = (uint64_t)t0 & kMask51; c = (uint64_t)(t0 >> 51);
    t1 += c; h.v[1] = (uint64_t)t1 & kMask51; c = (uint64_t)(t1 >> 51);
    t2 += c; h.v[2] = (uint64_t)t2 & kMask51; c = (uint64_t)(t2 >> 51);
    t3 += c; h.v[3] = (uint64_t)t3 & kMask51; c = (uint64_t)(t3 >> 51);
    t4 += c; h.v[4] = (uint64_t)t4 & kMask51; c = (uint64_t)(t4 >> 51);
    h.v[0] += c * 19;
    c = h.v[0] >> 51; h.v[1] += c; h.v[0] &= kMask51;
    return h;
}

Fe25519 fe_sq(const Fe25519& f) { return fe_mul(f, f); }

Fe25519 fe_pow_p58(const Fe25519& z) {
    // z^(2^252 - 3)
    Fe25519 t0, t1, t2;
    t0 = fe_sq(z);
    t1 = fe_sq(t0); t1 = fe_sq(t1);
    t1 = fe_mul(z, t1);
    t0 = fe_mul(t0, t1);
    t0 = fe_sq(t0);
    t0 = fe_mul(t1, t0);
    t1 = fe_sq(t0);
    for (int i = 1; i < 5; i++) t1 = fe_sq(t1);
    t0 = fe_mul(t1, t0);
    t1 = fe_sq(t0);
    for (int i = 1; i < 10; i++) t1 = fe_sq(t1);
    t1 = fe_mul(t1, t0);
    t2 = fe_sq(t1);
    for (int i = 1; i < 20; i++) t2 = fe_sq(t2);
    t1 = fe_mul(t2, t1);
    t1 = fe_sq(t1);
    for (int i = 1; i < 10; i++) t1 = fe_sq(t1);
    t0 = fe_mul(t1, t0);
    t1 = fe_sq(t0);
    for (int i = 1; i < 50; i++) t1 = fe_sq(t1);
    t1 = fe_mul(t1, t0);
    t2 = fe_sq(t1);
    for (int i = 1; i < 100; i++) t2 = fe_sq(t2);
    t1 = fe_mul(t2, t1);
    t1 = fe_sq(t1);
    for (int i = 1; i < 50; i++) t1 = fe_sq(t1);
    t0 = fe_mul(t1, t0);
    t0 = fe_sq(t0); t0 = fe_sq(t0);
    t0 = fe_mul(t0, z);
    return t0;
}

Fe25519 fe_invert(const Fe25519& z) {
    // z^(p-2) = z^(2^255 - 21)
    Fe25519 t = fe_pow_p58(z);
    t = fe_sq(t); t = fe_sq(t); t = fe_sq(t);
    Fe25519 z2 = fe_sq(z);
    Fe25519 z3 = fe_mul(z, z2);
    return fe_mul(t, z3);
}

Fe25519 fe_from_bytes(const uint8_t s[32]) {
    uint64_t h0 = load_le64(s) & kMask51;
    uint64_t h1 = (load_le64(s + 6) >> 3) & kMask51;
    uint64_t h2 = (load_le64(s + 12) >> 6) & kMask51;
    uint64_t h3 = (load_le64(s + 19) >> 1) & kMask51;
    uint64_t h4 = (load_le64(s + 24) >> 12) & kMask51;
    return reduce(Fe25519{{h0, h1, h2, h3, h4}});
}

void fe_to_bytes(uint8_t s[32], const Fe25519& f) {
    Fe25519 h = reduce(f);
    // canonicalize: add 19 and see whether it carries out of 2^255
    uint64_t q = (h.v[0] + 19) >> 51;
    q = (h.v[1] + q) >> 51;
    q = (h.v[2] + q) >> 51;
    q = (h.v[3] + q) >> 51;
    q = (h.v[4] + q) >> 51;
    h.v[0] += 19 * q;
    uint64_t c;
    c = h.v[0] >> 51; h.v[1] += c; h.v[0] &= kMask51;
    c = h.v[1] >> 51; h.v[2] += c; h.v[1] &= kMask51;
    c = h.v[2] >> 51; h.v[3] += c; h.v[2] &= kMask51;
    c = h.v[3] >> 51; h.v[4] += c; h.v[3] &= kMask51;
    h.v[4] &= kMask51;

    uint64_t bits[4];
    bits[0] = h.v[0] | (h.v[1] << 51);
    bits[1] = (h.v[1] >> 13) | (h.v[2] << 38);
    bits[2] = (h.v[2] >> 26) | (h.v[3] << 25);
    bits[3] = (h.v[3] >> 39) | (h.v[4] << 12);
    for (int i = 0; i < 4; i++) store_le64(s + 8 * i, bits[i]);
}

bool fe_is_zero(const Fe25519& f) {
    uint8_t s[32];
    fe_to_bytes(s, f);
    uint8_t d = 0;
    for (int i = 0; i < 32; i++) d |= s[i];
    return d == 0;
}

bool fe_is_negative(const Fe25519& f) {
    uint8_t s[32];
    fe_to_bytes(s, f);
    return s[0] & 1;
}

Fe25519 fe_cmov(const Fe25519& f, const Fe25519& g, bool b) {
    uint64_t mask = (uint64_t)0 - (uint64_t)b;
    Fe25519 h;
    for (int i = 0; i < 5; i++) h.v[i] = f.v[i] ^ (mask & (f.v[i] ^ g.v[i]));
    return h;
}

Fe25519 fe_cneg(const Fe25519& f, bool b) { return fe_cmov(f, fe_neg(f), b); }

Fe25519 fe_abs(const Fe25519& f) { return fe_cneg(f, fe_is_negative(f)); }

bool fe_equal(const Fe25519& f, const Fe25519& g) { return fe_is_zero(fe_sub(f, g)); }

std::pair<bool, Fe25519> fe_sqrt_ratio_m1(const Fe25519& u, const Fe25519& v) {
    Fe25519 v3 = fe_mul(fe_sq(v), v);
    Fe25519 v7 = fe_mul(fe_sq(v3), v);
    Fe25519 r = fe_mul(fe_mul(u, v3), fe_pow_p58(fe_mul(u, v7)));
    Fe25519 check = fe_mul(v, fe_sq(r));

    Fe25519 u_neg = fe_neg(u);
    bool correct = fe_equal(check, u);
    bool flipped = fe_equal(check, u_neg);
    bool flipped_i = fe_equal(check, fe_mul(u_neg, fe_sqrt_m1()));

    Fe25519 r_prime = fe_mul(r, fe_sqrt_m1());
    r = fe_cmov(r, r_prime, flipped || flipped_i);
    r = fe_abs(r);
    return {correct || flipped, r};
}

namespace {

Fe25519 fe_from_hex_le(const char* hex) {
    auto raw = array_from_hex<32>(hex);
    return fe_from_bytes(raw.data());
}

struct Constants {
    Fe25519 d, d2, sqrt_m1, invsqrt_a_minus_d, sqrt_ad_minus_one, one_minus_d_sq, d_minus_one_sq;
    Constants() {
        d = fe_from_hex_le("a3785913ca4deb75abd841414d0a700098e879777940c78c73fe6f2bee6c0352");
        d2 = fe_add(d, d);
        sqrt_m1 = fe_from_hex_le("b0a00e4a271beec478e42fad0618432fa7d7fb3d99004d2b0bdfc14f8024832b");
        invsqrt_a_minus_d =
            fe_from_hex_le("ea405d80aafdc899be72415a17162f9d40d801fe917bc216a2fcafcf05896c78");
        sqrt_ad_minus_one =
            fe_from_hex_le("1b2e7b49a0f6977ebd54781b0c8e9daffdd1f531c9fc3c0fac48832bbf316937");
        one_minus_d_sq = fe_sub(fe_one(), fe_sq(d));
        Fe25519 dm1 = fe_sub(d, fe_one());
        d_minus_one_sq = fe_sq(dm1);
    }
};

const Constants& constants() {
    static const Constants k;
    return k;
}

}  // namespace

const Fe25519& fe_d() { return constants().d; }
const Fe25519& fe_d2() { return constants().d2; }
const Fe25519& fe_sqrt_m1() { return constants().sqrt_m1; }
const Fe25519& fe_invsqrt_a_minus_d() { return constants().invsqrt_a_minus_d; }
const Fe25519& fe_sqrt_ad_minus_one() { return constants().sqrt_ad_minus_one; }
const Fe25519& fe_one_minus_d_sq() { return constants().one_minus_d_sq; }
const Fe25519& fe_d_minus_one_sq() { return constants().d_minus_one_sq; }

}  // namespace padl
