#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "padl/bytes.hpp"

namespace padl {

// Incremental SHA-512 (FIPS 180-4).
class Sha512 {
public:
    Sha512() { reset(); }

    void reset();
    Sha512& update(std::span<const uint8_t> data);
    Sha512& update(std::string_view s) {
        return update(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(s.data()), s.size()));
    }
    Bytes64 finalize();

    static Bytes64 hash(std::span<const uint8_t> data) {
        Sha512 h;
        h.update(data);
        return h.finalize();
    }

private:
    void compress(const uint8_t block[128]);

    uint64_t state_[8];
    uint8_t buf_[128];
    size_t buf_len_ = 0;
    uint64_t total_len_ = 0;
};

}  // namespace padl
