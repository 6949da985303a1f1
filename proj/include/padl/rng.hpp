#pragma once

#include <cstdint>
#include <string_view>

#include "padl/bytes.hpp"
#include "padl/scalar.hpp"
#include "padl/sha512.hpp"

namespace padl {

// Deterministic, seedable randomness source (hash counter mode). Everything
// that draws randomness takes one of these so a fixed seed replays the exact
// same ledger bytes. Not thread-safe; fork() children for parallel owners.
class Rng {
public:
    explicit Rng(const Bytes32& seed) : seed_(seed) {}

    // Seeded from the OS for interactive use.
    static Rng from_os_entropy();

    Bytes64 next_bytes64();
    Bytes32 next_bytes32();
    Scalar next_scalar();
    uint64_t next_u64();

    // Independent child stream, deterministic in (seed, label).
    Rng fork(std::string_view label) const;

private:
    Bytes32 seed_;
    uint64_t counter_ = 0;
};

}  // namespace padl
