#include "padl/transcript.hpp"

#include <cstring>

namespace padl {

Transcript::Transcript(std::string_view domain_tag) {
    state_.fill(0);
    ratchet(0x00, domain_tag, {});
}

void Transcript::ratchet(uint8_t op, std::string_view label, std::span<const uint8_t> data) {
    Sha512 h;
    h.update(std::span<const uint8_t>(state_.data(), state_.size()));
    uint8_t head[17];
    head[0] = op;
    store_le64(head + 1, label.size());
    store_le64(head + 9, data.size());
    h.update(std::span<const uint8_t>(head, 17));
    h.update(label);
    h.update(data);
    state_ = h.finalize();
}

void Transcript::absorb(std::string_view label, std::span<const uint8_t> data) {
    ratchet(0x01, label, data);
}

Scalar Transcript::challenge_scalar(std::string_view label) {
    ratchet(0x02, label, {});
    return Scalar::from_bytes_wide(state_);
}

Bytes32 Transcript::challenge_bytes(std::string_view label) {
    ratchet(0x03, label, {});
    Bytes32 out;
    std::memcpy(out.data(), state_.data(), 32);
    return out;
}

Transcript Transcript::fork(std::string_view label) const {
    Transcript child = *this;
    child.ratchet(0x04, label, {});
    return child;
}

}  // namespace padl
