#pragma once

#include <cstring>
#include <optional>
#include <string>

#include "padl/bytes.hpp"
#include "padl/ristretto.hpp"
#include "padl/scalar.hpp"

namespace padl {

class ByteWriter {
public:
    Bytes take() { return std::move(buf_); }
    const Bytes& bytes() const { return buf_; }

    void u8(uint8_t v) { buf_.push_back(v); }
    void u16(uint16_t v) {
        buf_.push_back(uint8_t(v));
        buf_.push_back(uint8_t(v >> 8));
    }
    void u32(uint32_t v) {
        uint8_t enc[4];
        store_le32(enc, v);
        buf_.insert(buf_.end(), enc, enc + 4);
    }
    void u64(uint64_t v) {
        uint8_t enc[8];
        store_le64(enc, v);
        buf_.insert(buf_.end(), enc, enc + 8);
    }
    void raw(std::span<const uint8_t> data) { buf_.insert(buf_.end(), data.begin(), data.end()); }
    void bytes32(const Bytes32& b) { raw(b); }
    void point(const GroupElement& p) { bytes32(p.encode()); }
    void scalar(const Scalar& s) { bytes32(s.to_bytes()); }
    void str(const std::string& s) {
        u16(uint16_t(s.size()));
        raw(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(s.data()), s.size()));
    }
    void var_bytes(const Bytes& b) {
        u32(uint32_t(b.size()));
        raw(b);
    }

private:
    Bytes buf_;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}

    bool done() const { return data_.empty(); }
    size_t remaining() const { return data_.size(); }

    std::optional<uint8_t> u8() {
        if (data_.size() < 1) return std::nullopt;
        uint8_t v = data_[0];
        data_ = data_.subspan(1);
        return v;
    }
    std::optional<uint16_t> u16() {
        if (data_.size() < 2) return std::nullopt;
        uint16_t v = uint16_t(data_[0]) | uint16_t(data_[1]) << 8;
        data_ = data_.subspan(2);
        return v;
    }
    std::optional<uint32_t> u32() {
        if (data_.size() < 4) return std::nullopt;
        uint32_t v = load_le32(data_.data());
        data_ = data_.subspan(4);
        return v;
    }
    std::optional<uint64_t> u64() {
        if (data_.size() < 8) return std::nullopt;
        uint64_t v = load_le64(data_.data());
        data_ = data_.subspan(8);
        return v;
    }
    std::optional<Bytes32> bytes32() {
        if (data_.size() < 32) return std::nullopt;
        Bytes32 out;
        std::memcpy(out.data(), data_.data(), 32);
        data_ = data_.subspan(32);
        return out;
    }
    std::optional<GroupElement> point() {
        auto raw = bytes32();
        if (!raw) return std::nullopt;
        return GroupElement::decode(*raw);
    }
    std::optional<Scalar> scalar() {
        auto raw = bytes32();
        if (!raw) return std::nullopt;
        return Scalar::from_bytes(*raw);
    }
    std::optional<std::string> str() {
        auto len = u16();
        if (!len || data_.size() < *len) return std::nullopt;
        std::string out(reinterpret_cast<const char*>(data_.data()), *len);
        data_ = data_.subspan(*len);
        return out;
    }
    std::optional<Bytes> var_bytes() {
        auto len = u32();
        if (!len || data_.size() < *len) return std::nullopt;
        Bytes out(data_.begin(), data_.begin() + *len);
        data_ = data_.subspan(*len);
        return out;
    }
    std::optional<Bytes> raw(size_t count) {
        if (data_.size() < count) return std::nullopt;
        Bytes out(data_.begin(), data_.begin() + count);
        data_ = data_.subspan(count);
        return out;
    }

private:
    std::span<const uint8_t> data_;
};

}  // namespace padl
