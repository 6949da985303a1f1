#include "padl/group.hpp"

#include "padl/sha512.hpp"

namespace padl {

CommitKey setup(std::span<const Scalar> contributions) {
    if (contributions.empty()) throw InvalidInput("setup: need at least one contribution");
    Scalar sum = Scalar::zero();
    for (const Scalar& c : contributions) sum += c;

    Sha512 h;
    h.update("padl/setup/h/v1");
    uint8_t count[8];
    store_le64(count, contributions.size());
    h.update(std::span<const uint8_t>(count, 8));
    Bytes32 sum_bytes = sum.to_bytes();
    h.update(std::span<const uint8_t>(sum_bytes.data(), sum_bytes.size()));

    CommitKey ck;
    ck.g = GroupElement::base();
    ck.h = GroupElement::from_uniform_bytes(h.finalize());
    return ck;
}

KeyPair keygen(const CommitKey& ck, Rng& rng) {
    KeyPair kp;
    kp.sk = rng.next_scalar();
    kp.pk = ck.h.mul(kp.sk);
    return kp;
}

Token make_token(const Scalar& r, const GroupElement& pk) {
    if (pk.is_identity()) throw InvalidInput("token: identity public key");
    return {pk.mul(r)};
}

}  // namespace padl
