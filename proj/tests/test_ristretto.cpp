#include <doctest.h>

#include "padl/ristretto.hpp"
#include "padl/rng.hpp"
#include "padl/sha512.hpp"

using namespace padl;

// encodings of 0*B .. 15*B, cross-checked against an independent
// implementation of the group
static const char* kSmallMultiples[16] = {
    "0000000000000000000000000000000000000000000000000000000000000000",
    "e2f2ae0a6abc4e71a884a961c500515f58e30b6aa582dd8db6a65945e08d2d76",
    "6a493210f7499cd17fecb510ae0cea23a110e8d5b901f8acadd3095c73a3b919",
    "94741f5d5d52755ece4f23f044ee27d5d1ea1e2bd196b462166b16152a9d0259",
    "da80862773358b466ffadfe0b3293ab3d9fd53c5ea6c955358f568322daf6a57",
    "e882b131016b52c1d3337080187cf768423efccbb517bb495ab812c4160ff44e",
    "f64746d3c92b13050ed8d80236a7f0007c3b3f962f5ba793d19a601ebb1df403",
    "44f53520926ec81fbd5a387845beb7df85a96a24ece18738bdcfa6a7822a176d",
    "903293d8f2287ebe10e2374dc1a53e0bc887e592699f02d077d5263cdd55601c",
    "02622ace8f7303a31cafc63f8fc48fdc16e1c8c8d234b2f0d6685282a9076031",
    "20706fd788b2720a1ed2a5dad4952b01f413bcf0e7564de8cdc816689e2db95f",
    "bce83f8ba5dd2fa572864c24ba1810f9522bc6004afe95877ac73241cafdab42",
    "e4549ee16b9aa03099ca208c67adafcafa4c3f3e4e5303de6026e3ca8ff84460",
    "aa52e000df2e16f55fb1032fc33bc42742dad6bd5a8fc0be0167436c5948501f",
    "46376b80f409b29dc2b5f6f0c52591990896e5716f41477cd30085ab7f10301e",
    "e0c418f7c8d9c4cdd7395b93ea124f3ad99021bb681dfc3302a9d99a2e53e64e",
};

TEST_CASE("small multiples of the base point") {
    GroupElement p = GroupElement::identity();
    for (int i = 0; i < 16; i++) {
        CHECK(to_hex(p.encode()) == kSmallMultiples[i]);
        // scalar multiplication agrees with repeated addition
        CHECK(GroupElement::base().mul(Scalar::from_u64(uint64_t(i))) == p);
        p += GroupElement::base();
    }
}

TEST_CASE("decode/encode round trip and rejection") {
    for (int i = 0; i < 16; i++) {
        auto bytes = array_from_hex<32>(kSmallMultiples[i]);
        auto p = GroupElement::decode(bytes);
        REQUIRE(p.has_value());
        CHECK(to_hex(p->encode()) == kSmallMultiples[i]);
    }
    // non-canonical: s = p (field order) encodes as zero but is not canonical
    auto bad = array_from_hex<32>("edffffffffffffffffffffffffffffffffffffffffffffffffffffffffffff7f");
    CHECK(!GroupElement::decode(bad).has_value());
    // negative s
    auto neg = array_from_hex<32>("0100000000000000000000000000000000000000000000000000000000000000");
    CHECK(!GroupElement::decode(neg).has_value());
    // random junk rarely decodes; tamper each byte of a valid encoding
    auto enc = array_from_hex<32>(kSmallMultiples[2]);
    int rejected = 0;
    for (int i = 0; i < 32; i++) {
        auto t = enc;
        t[i] ^= 0x40;
        auto maybe = GroupElement::decode(t);
        if (!maybe.has_value()) {
            rejected++;
        } else {
            CHECK(maybe->encode() == t);  // canonical if accepted
            CHECK(*maybe != *GroupElement::decode(enc));
        }
    }
    CHECK(rejected > 0);
}

TEST_CASE("hash to group vectors") {
    // frozen from an independent implementation of the one-way map
    struct Vec {
        const char* label;
        const char* expect;
    } vecs[] = {
        {"padl/h2g/vec0", "e074cc2f5668d32d6f451266e52707b57e4712a20dc8d749efd1ca2a8dd14435"},
        {"padl/h2g/vec1", "0e2cb6af9ff0a9ab90d24db4dc36d286bb7636d5b557c89d6a3034dfe5c85f56"},
        {"padl/h2g/vec2", "a0706a59efb7a51aafdf5f175add983c56a920ca8dc9133816631d98865a9375"},
    };
    for (const auto& v : vecs) {
        Sha512 h;
        h.update(v.label);
        GroupElement p = GroupElement::from_uniform_bytes(h.finalize());
        CHECK(to_hex(p.encode()) == v.expect);
    }
}

TEST_CASE("group laws under random scalars") {
    Rng rng(Bytes32{7});
    const GroupElement B = GroupElement::base();
    for (int i = 0; i < 32; i++) {
        Scalar a = rng.next_scalar();
        Scalar b = rng.next_scalar();
        GroupElement P = B.mul(a);
        GroupElement Q = B.mul(b);
        CHECK(P + Q == B.mul(a + b));
        CHECK(P - Q == B.mul(a - b));
        CHECK(P.mul(b) == Q.mul(a));
        CHECK(P + GroupElement::identity() == P);
        CHECK(P - P == GroupElement::identity());
        // encoding round trip after arithmetic
        auto enc = (P + Q).encode();
        CHECK(*GroupElement::decode(enc) == P + Q);
    }
}

TEST_CASE("multiscalar agrees with naive sum") {
    Rng rng(Bytes32{9});
    std::vector<Scalar> scalars;
    std::vector<GroupElement> points;
    GroupElement naive = GroupElement::identity();
    for (int i = 0; i < 17; i++) {
        scalars.push_back(rng.next_scalar());
        points.push_back(GroupElement::base().mul(rng.next_scalar()));
        naive += points.back().mul(scalars.back());
    }
    CHECK(multiscalar_mul_vartime(scalars, points) == naive);
    CHECK(multiscalar_mul_vartime({}, {}) == GroupElement::identity());
}

TEST_CASE("point keys identify group elements across representatives") {
    Rng rng(Bytes32{11});
    for (int i = 0; i < 16; i++) {
        Scalar a = rng.next_scalar();
        GroupElement P = GroupElement::base().mul(a);
        // round trip through bytes can change the internal representative
        GroupElement Q = *GroupElement::decode(P.encode());
        CHECK(point_key(P) == point_key(Q));
        GroupElement R = P + GroupElement::base();
        CHECK(point_key(P) != point_key(R));
        CHECK(point_key(P) != point_key(-P));
    }
    // batch matches singles
    std::vector<GroupElement> pts;
    for (int i = 0; i < 9; i++) pts.push_back(GroupElement::base().mul(rng.next_scalar()));
    auto keys = batch_point_keys(pts);
    for (size_t i = 0; i < pts.size(); i++) CHECK(keys[i] == point_key(pts[i]));
}
