#pragma once

#include <memory>
#include <vector>

#include "padl/group.hpp"
#include "padl/transcript.hpp"

namespace padl {

enum class RangeBackend : uint8_t {
    BitDecomposition = 1,  // reference: per-bit commitments + OR proofs, linear size
    Bulletproof = 2,       // optimized: inner-product argument, logarithmic size
};

// Backend-tagged opaque range proof for a Pedersen commitment:
// accepts only if the committed value lies in [0, 2^n_bits - 1].
struct RangeProof {
    RangeBackend backend;
    uint32_t n_bits = 0;
    Bytes payload;

    Bytes to_bytes() const;
    static std::optional<RangeProof> from_bytes(std::span<const uint8_t> data);
    bool operator==(const RangeProof& o) const {
        return backend == o.backend && n_bits == o.n_bits && payload == o.payload;
    }
};

struct RangeVerifyInstance {
    Commitment cm;
    uint32_t n_bits;
    const RangeProof* proof;
    Transcript ctx;
};

class RangeProofBackendIface {
public:
    virtual ~RangeProofBackendIface() = default;
    virtual RangeBackend kind() const = 0;

    // v must already be reduced to a small nonnegative integer < 2^n_bits,
    // otherwise throws RangeError.
    virtual RangeProof prove(const CommitKey& ck, const Scalar& v, const Scalar& r,
                             uint32_t n_bits, Transcript ctx, Rng& rng) const = 0;
    virtual bool verify(const CommitKey& ck, const Commitment& cm, uint32_t n_bits,
                        const RangeProof& proof, Transcript ctx) const = 0;

    virtual bool supports_batch() const { return false; }
    // Default: sequential verification of each instance.
    virtual bool verify_batch(const CommitKey& ck,
                              std::span<const RangeVerifyInstance> instances) const;
};

const RangeProofBackendIface& range_backend(RangeBackend kind);

// Interprets a scalar as a small nonnegative integer if possible.
std::optional<uint64_t> scalar_to_u64(const Scalar& s);

// Shared generator vectors for the bulletproof backend.
std::span<const GroupElement> bp_gens_G(size_t n);
std::span<const GroupElement> bp_gens_H(size_t n);

}  // namespace padl
