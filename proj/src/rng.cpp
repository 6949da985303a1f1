#include "padl/rng.hpp"

#include <cstring>
#include <random>

namespace padl {

Rng Rng::from_os_entropy() {
    std::random_device rd;
    Bytes32 seed;
    for (size_t i = 0; i < seed.size(); i += 4) store_le32(seed.data() + i, rd());
    return Rng(seed);
}

Bytes64 Rng::next_bytes64() {
    uint8_t block[51];
    std::memcpy(block, "padl/rng/v1", 11);
    std::memcpy(block + 11, seed_.data(), 32);
    store_le64(block + 43, counter_);
    counter_++;
    return Sha512::hash(std::span<const uint8_t>(block, 51));
}

Bytes32 Rng::next_bytes32() {
    Bytes64 wide = next_bytes64();
    Bytes32 out;
    std::memcpy(out.data(), wide.data(), 32);
    return out;
}

Scalar Rng::next_scalar() { return Scalar::from_bytes_wide(next_bytes64()); }

uint64_t Rng::next_u64() { return load_le64(next_bytes64().data()); }

Rng Rng::fork(std::string_view label) const {
    Sha512 h;
    h.update("padl/rng/fork");
    h.update(std::span<const uint8_t>(seed_.data(), seed_.size()));
    uint8_t ctr[8];
    store_le64(ctr, counter_);
    h.update(std::span<const uint8_t>(ctr, 8));
    h.update(label);
    Bytes64 wide = h.finalize();
    Bytes32 child;
    std::memcpy(child.data(), wide.data(), 32);
    return Rng(child);
}

}  // namespace padl
