#pragma once

#include <cstdint>
#include <utility>

#include "padl/bytes.hpp"

namespace padl {

// Field element mod 2^255 - 19, five 51-bit limbs.
struct Fe25519 {
    uint64_t v[5];
};

Fe25519 fe_zero();
Fe25519 fe_one();
Fe25519 fe_from_bytes(const uint8_t s[32]);  // masks the top bit
void fe_to_bytes(uint8_t s[32], const Fe25519& h);

Fe25519 fe_add(const Fe25519& f, const Fe25519& g);
Fe25519 fe_sub(const Fe25519& f, const Fe25519& g);
Fe25519 fe_neg(const Fe25519& f);
Fe25519 fe_mul(const Fe25519& f, const Fe25519& g);
Fe25519 fe_sq(const Fe25519& f);
Fe25519 fe_invert(const Fe25519& z);
Fe25519 fe_pow_p58(const Fe25519& z);  // z^((p-5)/8)

bool fe_is_zero(const Fe25519& f);
bool fe_is_negative(const Fe25519& f);  // lsb of canonical encoding
Fe25519 fe_cmov(const Fe25519& f, const Fe25519& g, bool b);
Fe25519 fe_cneg(const Fe25519& f, bool b);
Fe25519 fe_abs(const Fe25519& f);
bool fe_equal(const Fe25519& f, const Fe25519& g);

// (was_square, r) with r = sqrt(u/v) or sqrt(i*u/v), r nonnegative.
std::pair<bool, Fe25519> fe_sqrt_ratio_m1(const Fe25519& u, const Fe25519& v);

// curve constants
const Fe25519& fe_d();
const Fe25519& fe_d2();
const Fe25519& fe_sqrt_m1();
const Fe25519& fe_invsqrt_a_minus_d();
const Fe25519& fe_sqrt_ad_minus_one();
const Fe25519& fe_one_minus_d_sq();
const Fe25519& fe_d_minus_one_sq();

}  // namespace padl
