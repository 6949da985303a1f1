#include "padl/ristretto.hpp"

#include <cstring>

namespace padl {

namespace {

struct Ext {
    Fe25519 X, Y, Z, T;
};

Ext ext_identity() { return {fe_zero(), fe_one(), fe_one(), fe_zero()}; }

// unified twisted Edwards addition (a = -1), valid for all inputs
Ext ext_add(const Ext& P, const Ext& Q) {
    Fe25519 A = fe_mul(fe_sub(P.Y, P.X), fe_sub(Q.Y, Q.X));
    Fe25519 B = fe_mul(fe_add(P.Y, P.X), fe_add(Q.Y, Q.X));
    Fe25519 C = fe_mul(fe_mul(P.T, Q.T), fe_d2());
    Fe25519 D = fe_mul(fe_add(P.Z, P.Z), Q.Z);
    Fe25519 E = fe_sub(B, A);
    Fe25519 F = fe_sub(D, C);
    Fe25519 G = fe_add(D, C);
    Fe25519 H = fe_add(B, A);
    return {fe_mul(E, F), fe_mul(G, H), fe_mul(F, G), fe_mul(E, H)};
}

Ext ext_double(const Ext& P) {
    Fe25519 A = fe_sq(P.X);
    Fe25519 B = fe_sq(P.Y);
    Fe25519 C = fe_add(fe_sq(P.Z), fe_sq(P.Z));
    Fe25519 D = fe_neg(A);
    Fe25519 E = fe_sub(fe_sq(fe_add(P.X, P.Y)), fe_add(A, B));
    Fe25519 G = fe_add(D, B);
    Fe25519 F = fe_sub(G, C);
    Fe25519 H = fe_sub(D, B);
    return {fe_mul(E, F), fe_mul(G, H), fe_mul(F, G), fe_mul(E, H)};
}

Ext ext_neg(const Ext& P) { return {fe_neg(P.X), P.Y, P.Z, fe_neg(P.T)}; }

Ext to_ext(const GroupElement& p) { return {p.X, p.Y, p.Z, p.T}; }

Ext ext_cmov(const Ext& f, const Ext& g, bool b) {
    return {fe_cmov(f.X, g.X, b), fe_cmov(f.Y, g.Y, b), fe_cmov(f.Z, g.Z, b),
            fe_cmov(f.T, g.T, b)};
}

}  // namespace

GroupElement ext_from_parts(const Fe25519& x, const Fe25519& y, const Fe25519& z,
                            const Fe25519& t) {
    GroupElement p = GroupElement::identity();
    p.X = x;
    p.Y = y;
    p.Z = z;
    p.T = t;
    return p;
}

const GroupElement& GroupElement::identity() {
    static const GroupElement id = [] {
        Ext e = ext_identity();
        GroupElement p(e.X, e.Y, e.Z, e.T);
        return p;
    }();
    return id;
}

const GroupElement& GroupElement::base() {
    static const GroupElement b = [] {
        auto bx = array_from_hex<32>("1ad5258f602d56c9b2a7259560c72c695cdcd6fd31e2a4c0fe536ecdd3366921");
        auto by = array_from_hex<32>("5866666666666666666666666666666666666666666666666666666666666666");
        Fe25519 x = fe_from_bytes(bx.data());
        Fe25519 y = fe_from_bytes(by.data());
        return GroupElement(x, y, fe_one(), fe_mul(x, y));
    }();
    return b;
}

std::optional<GroupElement> GroupElement::decode(const Bytes32& bytes) {
    Fe25519 s = fe_from_bytes(bytes.data());
    // encoding must be canonical and nonnegative
    uint8_t check[32];
    fe_to_bytes(check, s);
    if (std::memcmp(check, bytes.data(), 32) != 0) return std::nullopt;
    if (fe_is_negative(s)) return std::nullopt;

    Fe25519 ss = fe_sq(s);
    Fe25519 u1 = fe_sub(fe_one(), ss);
    Fe25519 u2 = fe_add(fe_one(), ss);
    Fe25519 u2_sq = fe_sq(u2);
    // v = -(d*u1^2) - u2^2
    Fe25519 v = fe_sub(fe_neg(fe_mul(fe_d(), fe_sq(u1))), u2_sq);
    auto [was_square, invsqrt] = fe_sqrt_ratio_m1(fe_one(), fe_mul(v, u2_sq));
    if (!was_square) return std::nullopt;

    Fe25519 den_x = fe_mul(invsqrt, u2);
    Fe25519 den_y = fe_mul(fe_mul(invsqrt, den_x), v);
    Fe25519 x = fe_abs(fe_mul(fe_add(s, s), den_x));
    Fe25519 y = fe_mul(u1, den_y);
    Fe25519 t = fe_mul(x, y);
    if (fe_is_negative(t) || fe_is_zero(y)) return std::nullopt;
    return GroupElement(x, y, fe_one(), t);
}

Bytes32 GroupElement::encode() const {
    Fe25519 u1 = fe_mul(fe_add(Z, Y), fe_sub(Z, Y));
    Fe25519 u2 = fe_mul(X, Y);
    auto [ok, invsqrt] = fe_sqrt_ratio_m1(fe_one(), fe_mul(u1, fe_sq(u2)));
    (void)ok;
    Fe25519 den1 = fe_mul(invsqrt, u1);
    Fe25519 den2 = fe_mul(invsqrt, u2);
    Fe25519 z_inv = fe_mul(fe_mul(den1, den2), T);

    Fe25519 ix = fe_mul(X, fe_sqrt_m1());
    Fe25519 iy = fe_mul(Y, fe_sqrt_m1());
    Fe25519 enchanted = fe_mul(den1, fe_invsqrt_a_minus_d());
    bool rotate = fe_is_negative(fe_mul(T, z_inv));

    Fe25519 x = fe_cmov(X, iy, rotate);
    Fe25519 y = fe_cmov(Y, ix, rotate);
    Fe25519 den_inv = fe_cmov(den2, enchanted, rotate);

    y = fe_cneg(y, fe_is_negative(fe_mul(x, z_inv)));
    Fe25519 s = fe_abs(fe_mul(den_inv, fe_sub(Z, y)));

    Bytes32 out;
    fe_to_bytes(out.data(), s);
    return out;
}

GroupElement GroupElement::operator+(const GroupElement& o) const {
    Ext r = ext_add(to_ext(*this), to_ext(o));
    return GroupElement(r.X, r.Y, r.Z, r.T);
}

GroupElement GroupElement::operator-(const GroupElement& o) const {
    Ext r = ext_add(to_ext(*this), ext_neg(to_ext(o)));
    return GroupElement(r.X, r.Y, r.Z, r.T);
}

GroupElement GroupElement::operator-() const {
    Ext r = ext_neg(to_ext(*this));
    return GroupElement(r.X, r.Y, r.Z, r.T);
}

GroupElement GroupElement::dbl() const {
    Ext r = ext_double(to_ext(*this));
    return GroupElement(r.X, r.Y, r.Z, r.T);
}

GroupElement GroupElement::mul(const Scalar& s) const {
    // 4-bit fixed window, branch-free table lookup
    Ext table[16];
    table[0] = ext_identity();
    table[1] = to_ext(*this);
    for (int i = 2; i < 16; i++) table[i] = ext_add(table[i - 1], table[1]);

    Bytes32 sb = s.to_bytes();
    Ext r = ext_identity();
    for (int i = 63; i >= 0; i--) {
        if (i != 63) {
            r = ext_double(r);
            r = ext_double(r);
            r = ext_double(r);
            r = ext_double(r);
        }
        uint8_t byte = sb[i >> 1];
        uint8_t nib = (i & 1) ? (byte >> 4) : (byte & 0x0f);
        Ext sel = table[0];
        for (int k = 1; k < 16; k++) sel = ext_cmov(sel, table[k], k == nib);
        r = ext_add(r, sel);
    }
    return GroupElement(r.X, r.Y, r.Z, r.T);
}

GroupElement GroupElement::double_mul(const Scalar& a, const GroupElement& P, const Scalar& b,
                                      const GroupElement& Q) {
    Ext tp[16], tq[16];
    tp[0] = ext_identity();
    tq[0] = ext_identity();
    tp[1] = to_ext(P);
    tq[1] = to_ext(Q);
    for (int i = 2; i < 16; i++) {
        tp[i] = ext_add(tp[i - 1], tp[1]);
        tq[i] = ext_add(tq[i - 1], tq[1]);
    }
    Bytes32 ab = a.to_bytes();
    Bytes32 bb = b.to_bytes();
    Ext r = ext_identity();
    for (int i = 63; i >= 0; i--) {
        if (i != 63) {
            r = ext_double(r);
            r = ext_double(r);
            r = ext_double(r);
            r = ext_double(r);
        }
        uint8_t na = (i & 1) ? (ab[i >> 1] >> 4) : (ab[i >> 1] & 0x0f);
        uint8_t nb = (i & 1) ? (bb[i >> 1] >> 4) : (bb[i >> 1] & 0x0f);
        Ext sa = tp[0], sb = tq[0];
        for (int k = 1; k < 16; k++) {
            sa = ext_cmov(sa, tp[k], k == na);
            sb = ext_cmov(sb, tq[k], k == nb);
        }
        r = ext_add(r, sa);
        r = ext_add(r, sb);
    }
    return ext_from_parts(r.X, r.Y, r.Z, r.T);
}

bool GroupElement::operator==(const GroupElement& o) const {
    bool a = fe_equal(fe_mul(X, o.Y), fe_mul(Y, o.X));
    bool b = fe_equal(fe_mul(Y, o.Y), fe_mul(X, o.X));
    return a || b;
}

GroupElement multiscalar_mul_vartime(std::span<const Scalar> scalars,
                                     std::span<const GroupElement> points) {
    size_t n = scalars.size();
    if (n != points.size()) throw std::invalid_argument("multiscalar size mismatch");
    if (n == 0) return GroupElement::identity();

    // Straus with 4-bit windows
    std::vector<Ext> tables(n * 16);
    for (size_t p = 0; p < n; p++) {
        tables[p * 16] = ext_identity();
        tables[p * 16 + 1] = to_ext(points[p]);
        for (int i = 2; i < 16; i++)
            tables[p * 16 + i] = ext_add(tables[p * 16 + i - 1], tables[p * 16 + 1]);
    }
    std::vector<Bytes32> sb(n);
    for (size_t p = 0; p < n; p++) sb[p] = scalars[p].to_bytes();

    Ext r = ext_identity();
    for (int i = 63; i >= 0; i--) {
        if (i != 63) {
            r = ext_double(r);
            r = ext_double(r);
            r = ext_double(r);
            r = ext_double(r);
        }
        for (size_t p = 0; p < n; p++) {
            uint8_t byte = sb[p][i >> 1];
            uint8_t nib = (i & 1) ? (byte >> 4) : (byte & 0x0f);
            if (nib != 0) r = ext_add(r, tables[p * 16 + nib]);
        }
    }
    return ext_from_parts(r.X, r.Y, r.Z, r.T);
}

namespace {

// Elligator-style map from one field element to a point
Ext elligator_map(const Fe25519& t) {
    Fe25519 r = fe_mul(fe_sqrt_m1(), fe_sq(t));
    Fe25519 u = fe_mul(fe_add(r, fe_one()), fe_one_minus_d_sq());
    Fe25519 minus_one = fe_neg(fe_one());
    Fe25519 v = fe_mul(fe_sub(minus_one, fe_mul(r, fe_d())), fe_add(r, fe_d()));
    auto [was_square, s] = fe_sqrt_ratio_m1(u, v);
    Fe25519 s_prime = fe_neg(fe_abs(fe_mul(s, t)));
    s = fe_cmov(s_prime, s, was_square);
    Fe25519 c = fe_cmov(r, minus_one, was_square);
    Fe25519 n = fe_sub(fe_mul(fe_mul(c, fe_sub(r, fe_one())), fe_d_minus_one_sq()), v);
    Fe25519 w0 = fe_mul(fe_add(s, s), v);
    Fe25519 w1 = fe_mul(n, fe_sqrt_ad_minus_one());
    Fe25519 w2 = fe_sub(fe_one(), fe_sq(s));
    Fe25519 w3 = fe_add(fe_one(), fe_sq(s));
    return {fe_mul(w0, w3), fe_mul(w2, w1), fe_mul(w1, w3), fe_mul(w0, w2)};
}

}  // namespace

GroupElement GroupElement::from_uniform_bytes(const Bytes64& bytes) {
    uint8_t lo[32], hi[32];
    std::memcpy(lo, bytes.data(), 32);
    std::memcpy(hi, bytes.data() + 32, 32);
    Ext p1 = elligator_map(fe_from_bytes(lo));
    Ext p2 = elligator_map(fe_from_bytes(hi));
    Ext r = ext_add(p1, p2);
    return ext_from_parts(r.X, r.Y, r.Z, r.T);
}

PointKey point_key(const GroupElement& p) {
    GroupElement arr[1] = {p};
    return batch_point_keys(std::span<const GroupElement>(arr, 1))[0];
}

std::vector<PointKey> batch_point_keys(std::span<const GroupElement> pts) {
    size_t n = pts.size();
    std::vector<Ext> quad(n);
    for (size_t i = 0; i < n; i++)
        quad[i] = ext_double(ext_double(to_ext(pts[i])));  // 4*P kills torsion

    // batch inversion of Z's (Montgomery trick)
    std::vector<Fe25519> prefix(n);
    Fe25519 acc = fe_one();
    for (size_t i = 0; i < n; i++) {
        prefix[i] = acc;
        acc = fe_mul(acc, quad[i].Z);
    }
    Fe25519 inv_all = fe_invert(acc);
    std::vector<PointKey> out(n);
    for (size_t i = n; i-- > 0;) {
        Fe25519 z_inv = fe_mul(inv_all, prefix[i]);
        inv_all = fe_mul(inv_all, quad[i].Z);
        Fe25519 ax = fe_mul(quad[i].X, z_inv);
        Fe25519 ay = fe_mul(quad[i].Y, z_inv);
        fe_to_bytes(out[i].data(), ax);
        out[i][32] = fe_is_negative(ay) ? 1 : 0;
    }
    return out;
}

}  // namespace padl
