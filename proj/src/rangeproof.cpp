#include "padl/rangeproof.hpp"

#include <cstring>
#include <mutex>

#include "padl/errors.hpp"
#include "padl/sha512.hpp"

namespace padl {

namespace {

constexpr uint32_t kMaxBits = 64;

void put_point(Bytes& out, const GroupElement& p) {
    Bytes32 enc = p.encode();
    out.insert(out.end(), enc.begin(), enc.end());
}

void put_scalar(Bytes& out, const Scalar& s) {
    Bytes32 enc = s.to_bytes();
    out.insert(out.end(), enc.begin(), enc.end());
}

struct Reader {
    std::span<const uint8_t> data;

    std::optional<GroupElement> point() {
        if (data.size() < 32) return std::nullopt;
        Bytes32 raw;
        std::memcpy(raw.data(), data.data(), 32);
        data = data.subspan(32);
        return GroupElement::decode(raw);
    }
    std::optional<Scalar> scalar() {
        if (data.size() < 32) return std::nullopt;
        Bytes32 raw;
        std::memcpy(raw.data(), data.data(), 32);
        data = data.subspan(32);
        return Scalar::from_bytes(raw);
    }
    bool done() const { return data.empty(); }
};

uint64_t checked_value(const Scalar& v, uint32_t n_bits) {
    auto small = scalar_to_u64(v);
    if (!small) throw RangeError("range prove: value is not a small nonnegative integer");
    if (n_bits < 1 || n_bits > kMaxBits) throw RangeError("range prove: unsupported bit width");
    if (n_bits < 64 && *small >> n_bits) throw RangeError("range prove: value out of range");
    return *small;
}

}  // namespace

std::optional<uint64_t> scalar_to_u64(const Scalar& s) {
    Bytes32 b = s.to_bytes();
    for (size_t i = 8; i < 32; i++)
        if (b[i] != 0) return std::nullopt;
    return load_le64(b.data());
}

Bytes RangeProof::to_bytes() const {
    Bytes out;
    out.reserve(7 + payload.size());
    out.push_back(uint8_t(backend));
    out.push_back(uint8_t(n_bits));
    out.push_back(uint8_t(n_bits >> 8));
    uint8_t len[4];
    store_le32(len, uint32_t(payload.size()));
    out.insert(out.end(), len, len + 4);
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

std::optional<RangeProof> RangeProof::from_bytes(std::span<const uint8_t> data) {
    if (data.size() < 7) return std::nullopt;
    RangeProof p;
    if (data[0] != uint8_t(RangeBackend::BitDecomposition) &&
        data[0] != uint8_t(RangeBackend::Bulletproof))
        return std::nullopt;
    p.backend = RangeBackend(data[0]);
    p.n_bits = uint32_t(data[1]) | uint32_t(data[2]) << 8;
    uint32_t len = load_le32(data.data() + 3);
    if (data.size() != 7 + size_t(len)) return std::nullopt;
    p.payload.assign(data.begin() + 7, data.end());
    return p;
}

bool RangeProofBackendIface::verify_batch(const CommitKey& ck,
                                          std::span<const RangeVerifyInstance> instances) const {
    for (const auto& inst : instances)
        if (!verify(ck, inst.cm, inst.n_bits, *inst.proof, inst.ctx)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Reference backend: commit to each bit, prove each is 0/1 with a two-branch
// OR proof, and let the verifier recombine prod C_i^(2^i) == cm.
// ---------------------------------------------------------------------------

namespace {

class BitDecompositionBackend final : public RangeProofBackendIface {
public:
    RangeBackend kind() const override { return RangeBackend::BitDecomposition; }

    RangeProof prove(const CommitKey& ck, const Scalar& v, const Scalar& r, uint32_t n_bits,
                     Transcript ctx, Rng& rng) const override {
        uint64_t value = checked_value(v, n_bits);
        const uint32_t n = n_bits;

        // bit blindings with sum_i 2^i r_i == r
        std::vector<Scalar> r_bits(n);
        Scalar acc = Scalar::zero();
        Scalar pow2 = Scalar::one() + Scalar::one();
        Scalar coeff = pow2;  // 2^i for i >= 1
        for (uint32_t i = 1; i < n; i++) {
            r_bits[i] = rng.next_scalar();
            acc += coeff * r_bits[i];
            coeff += coeff;
        }
        r_bits[0] = r - acc;

        std::vector<GroupElement> bit_cms(n);
        for (uint32_t i = 0; i < n; i++) {
            Scalar bit = Scalar::from_u64((value >> i) & 1);
            bit_cms[i] = ck.commit(bit, r_bits[i]).point;
        }

        // per-bit OR proofs: C = h^r  or  C/g = h^r
        struct BitProof {
            GroupElement t0, t1;
            Scalar c0, s0, s1;
        };
        std::vector<BitProof> proofs(n);
        std::vector<Scalar> u_real(n), c_sim(n), s_sim(n);
        for (uint32_t i = 0; i < n; i++) {
            u_real[i] = rng.next_scalar();
            c_sim[i] = rng.next_scalar();
            s_sim[i] = rng.next_scalar();
            bool bit = (value >> i) & 1;
            GroupElement X0 = bit_cms[i];
            GroupElement X1 = bit_cms[i] - ck.g;
            GroupElement t_real = ck.h.mul(u_real[i]);
            // simulated branch: t = h^s * X^-c
            GroupElement X_sim = bit ? X0 : X1;
            GroupElement t_sim = ck.h.mul(s_sim[i]) - X_sim.mul(c_sim[i]);
            proofs[i].t0 = bit ? t_sim : t_real;
            proofs[i].t1 = bit ? t_real : t_sim;
        }

        ctx.absorb("proof", std::span<const uint8_t>(
                                reinterpret_cast<const uint8_t*>("range/bits"), 10));
        ctx.absorb_u64("n", n);
        ctx.absorb_point("cm", ck.commit(v, r).point);
        for (uint32_t i = 0; i < n; i++) ctx.absorb_point("C", bit_cms[i]);
        for (uint32_t i = 0; i < n; i++) {
            ctx.absorb_point("t0", proofs[i].t0);
            ctx.absorb_point("t1", proofs[i].t1);
        }
        for (uint32_t i = 0; i < n; i++) {
            Scalar c = ctx.challenge_scalar("c");
            bool bit = (value >> i) & 1;
            Scalar c_real = c - c_sim[i];
            Scalar s_real = u_real[i] + c_real * r_bits[i];
            if (bit) {
                proofs[i].c0 = c_sim[i];
                proofs[i].s0 = s_sim[i];
                proofs[i].s1 = s_real;
            } else {
                proofs[i].c0 = c_real;
                proofs[i].s0 = s_real;
                proofs[i].s1 = s_sim[i];
            }
        }

        RangeProof out;
        out.backend = kind();
        out.n_bits = n;
        out.payload.reserve(size_t(n) * 192);
        for (uint32_t i = 0; i < n; i++) put_point(out.payload, bit_cms[i]);
        for (uint32_t i = 0; i < n; i++) {
            put_point(out.payload, proofs[i].t0);
            put_point(out.payload, proofs[i].t1);
            put_scalar(out.payload, proofs[i].c0);
            put_scalar(out.payload, proofs[i].s0);
            put_scalar(out.payload, proofs[i].s1);
        }
        return out;
    }

    bool verify(const CommitKey& ck, const Commitment& cm, uint32_t n_bits,
                const RangeProof& proof, Transcript ctx) const override {
        if (proof.backend != kind() || proof.n_bits != n_bits) return false;
        if (n_bits < 1 || n_bits > kMaxBits) return false;
        const uint32_t n = n_bits;
        if (proof.payload.size() != size_t(n) * 192) return false;

        Reader rd{proof.payload};
        std::vector<GroupElement> bit_cms(n);
        for (uint32_t i = 0; i < n; i++) {
            auto p = rd.point();
            if (!p) return false;
            bit_cms[i] = *p;
        }
        struct BitProof {
            GroupElement t0, t1;
            Scalar c0, s0, s1;
        };
        std::vector<BitProof> proofs(n);
        for (uint32_t i = 0; i < n; i++) {
            auto t0 = rd.point();
            auto t1 = rd.point();
            auto c0 = rd.scalar();
            auto s0 = rd.scalar();
            auto s1 = rd.scalar();
            if (!t0 || !t1 || !c0 || !s0 || !s1) return false;
            proofs[i] = {*t0, *t1, *c0, *s0, *s1};
        }
        if (!rd.done()) return false;

        // recombination: prod C_i^(2^i) == cm
        GroupElement recombined = GroupElement::identity();
        Scalar coeff = Scalar::one();
        for (uint32_t i = 0; i < n; i++) {
            recombined += bit_cms[i].mul(coeff);
            coeff += coeff;
        }
        if (recombined != cm.point) return false;

        ctx.absorb("proof", std::span<const uint8_t>(
                                reinterpret_cast<const uint8_t*>("range/bits"), 10));
        ctx.absorb_u64("n", n);
        ctx.absorb_point("cm", cm.point);
        for (uint32_t i = 0; i < n; i++) ctx.absorb_point("C", bit_cms[i]);
        for (uint32_t i = 0; i < n; i++) {
            ctx.absorb_point("t0", proofs[i].t0);
            ctx.absorb_point("t1", proofs[i].t1);
        }
        for (uint32_t i = 0; i < n; i++) {
            Scalar c = ctx.challenge_scalar("c");
            Scalar c1 = c - proofs[i].c0;
            // h^s0 == t0 * C^c0 and h^s1 == t1 * (C/g)^c1
            if (ck.h.mul(proofs[i].s0) != proofs[i].t0 + bit_cms[i].mul(proofs[i].c0))
                return false;
            if (ck.h.mul(proofs[i].s1) != proofs[i].t1 + (bit_cms[i] - ck.g).mul(c1))
                return false;
        }
        return true;
    }
};

}  // namespace

// ---------------------------------------------------------------------------
// Optimized backend: single-value bulletproof with logarithmic inner-product
// argument. n_bits must be a power of two (2..64).
// ---------------------------------------------------------------------------

namespace {

std::vector<GroupElement> derive_gens(const char* tag, size_t count) {
    std::vector<GroupElement> out;
    out.reserve(count);
    for (size_t i = 0; i < count; i++) {
        Sha512 h;
        h.update(tag);
        uint8_t idx[8];
        store_le64(idx, i);
        h.update(std::span<const uint8_t>(idx, 8));
        out.push_back(GroupElement::from_uniform_bytes(h.finalize()));
    }
    return out;
}

const std::vector<GroupElement>& gens_G() {
    static const std::vector<GroupElement> g = derive_gens("padl/bp/G/v1", kMaxBits);
    return g;
}

const std::vector<GroupElement>& gens_H() {
    static const std::vector<GroupElement> h = derive_gens("padl/bp/H/v1", kMaxBits);
    return h;
}

Scalar inner_product(std::span<const Scalar> a, std::span<const Scalar> b) {
    Scalar acc = Scalar::zero();
    for (size_t i = 0; i < a.size(); i++) acc += a[i] * b[i];
    return acc;
}

bool is_pow2(uint32_t n) { return n >= 2 && (n & (n - 1)) == 0; }

struct BpProof {
    GroupElement A, S, T1, T2;
    Scalar tau_x, mu, t_hat;
    std::vector<GroupElement> L, R;
    Scalar a, b;
};

class BulletproofBackend final : public RangeProofBackendIface {
public:
    RangeBackend kind() const override { return RangeBackend::Bulletproof; }
    bool supports_batch() const override { return true; }

    RangeProof prove(const CommitKey& ck, const Scalar& v, const Scalar& r, uint32_t n_bits,
                     Transcript ctx, Rng& rng) const override {
        uint64_t value = checked_value(v, n_bits);
        if (!is_pow2(n_bits))
            throw RangeError("bulletproof: bit width must be a power of two");
        const size_t n = n_bits;
        auto G = bp_gens_G(n);
        auto H = bp_gens_H(n);

        Commitment V = ck.commit(v, r);
        ctx.absorb("proof", std::span<const uint8_t>(
                                reinterpret_cast<const uint8_t*>("range/bp"), 8));
        ctx.absorb_u64("n", n_bits);
        ctx.absorb_point("V", V.point);

        std::vector<Scalar> aL(n), aR(n);
        Scalar minus_one = -Scalar::one();
        for (size_t i = 0; i < n; i++) {
            aL[i] = Scalar::from_u64((value >> i) & 1);
            aR[i] = aL[i] + minus_one;
        }

        Scalar alpha = rng.next_scalar();
        // A = h^alpha G^aL H^aR
        std::vector<Scalar> scalars;
        std::vector<GroupElement> points;
        auto emit = [&](const Scalar& s, const GroupElement& p) {
            scalars.push_back(s);
            points.push_back(p);
        };
        emit(alpha, ck.h);
        for (size_t i = 0; i < n; i++) emit(aL[i], G[i]);
        for (size_t i = 0; i < n; i++) emit(aR[i], H[i]);
        GroupElement A = multiscalar_mul_vartime(scalars, points);

        Scalar rho = rng.next_scalar();
        std::vector<Scalar> sL(n), sR(n);
        for (size_t i = 0; i < n; i++) sL[i] = rng.next_scalar();
        for (size_t i = 0; i < n; i++) sR[i] = rng.next_scalar();
        scalars.clear();
        points.clear();
        emit(rho, ck.h);
        for (size_t i = 0; i < n; i++) emit(sL[i], G[i]);
        for (size_t i = 0; i < n; i++) emit(sR[i], H[i]);
        GroupElement S = multiscalar_mul_vartime(scalars, points);

        ctx.absorb_point("A", A);
        ctx.absorb_point("S", S);
        Scalar y = ctx.challenge_scalar("y");
        Scalar z = ctx.challenge_scalar("z");
        Scalar zz = z * z;

        std::vector<Scalar> y_pow(n), two_pow(n);
        y_pow[0] = Scalar::one();
        two_pow[0] = Scalar::one();
        for (size_t i = 1; i < n; i++) {
            y_pow[i] = y_pow[i - 1] * y;
            two_pow[i] = two_pow[i - 1] + two_pow[i - 1];
        }

        // l(X) = aL - z*1 + sL X ; r(X) = y^n o (aR + z*1 + sR X) + z^2 2^n
        std::vector<Scalar> l0(n), l1(n), r0(n), r1(n);
        for (size_t i = 0; i < n; i++) {
            l0[i] = aL[i] - z;
            l1[i] = sL[i];
            r0[i] = y_pow[i] * (aR[i] + z) + zz * two_pow[i];
            r1[i] = y_pow[i] * sR[i];
        }
        Scalar t0 = inner_product(l0, r0);
        Scalar t2 = inner_product(l1, r1);
        Scalar t1 = inner_product(l0, r1) + inner_product(l1, r0);
        (void)t0;

        Scalar tau1 = rng.next_scalar();
        Scalar tau2 = rng.next_scalar();
        GroupElement T1 = ck.g.mul(t1) + ck.h.mul(tau1);
        GroupElement T2 = ck.g.mul(t2) + ck.h.mul(tau2);
        ctx.absorb_point("T1", T1);
        ctx.absorb_point("T2", T2);
        Scalar x = ctx.challenge_scalar("x");
        Scalar xx = x * x;

        std::vector<Scalar> l(n), rr(n);
        for (size_t i = 0; i < n; i++) {
            l[i] = l0[i] + l1[i] * x;
            rr[i] = r0[i] + r1[i] * x;
        }
        Scalar t_hat = inner_product(l, rr);
        Scalar tau_x = tau1 * x + tau2 * xx + zz * r;
        Scalar mu = alpha + rho * x;

        ctx.absorb_scalar("tau_x", tau_x);
        ctx.absorb_scalar("mu", mu);
        ctx.absorb_scalar("t_hat", t_hat);
        Scalar w = ctx.challenge_scalar("w");
        GroupElement Q = ck.g.mul(w);

        // inner-product argument over (G, H' = H^(y^-i))
        Scalar y_inv = y.invert();
        std::vector<GroupElement> gv(G.begin(), G.end());
        std::vector<GroupElement> hv(H.begin(), H.end());
        {
            Scalar yi = Scalar::one();
            for (size_t i = 0; i < n; i++) {
                hv[i] = hv[i].mul(yi);
                yi *= y_inv;
            }
        }
        std::vector<Scalar> av = l, bv = rr;

        BpProof proof{A, S, T1, T2, tau_x, mu, t_hat, {}, {}, Scalar::zero(), Scalar::zero()};
        size_t len = n;
        while (len > 1) {
            size_t half = len / 2;
            auto a_lo = std::span<const Scalar>(av).subspan(0, half);
            auto a_hi = std::span<const Scalar>(av).subspan(half, half);
            auto b_lo = std::span<const Scalar>(bv).subspan(0, half);
            auto b_hi = std::span<const Scalar>(bv).subspan(half, half);

            scalars.clear();
            points.clear();
            for (size_t i = 0; i < half; i++) emit(a_lo[i], gv[half + i]);
            for (size_t i = 0; i < half; i++) emit(b_hi[i], hv[i]);
            emit(inner_product(a_lo, b_hi), Q);
            GroupElement L = multiscalar_mul_vartime(scalars, points);

            scalars.clear();
            points.clear();
            for (size_t i = 0; i < half; i++) emit(a_hi[i], gv[i]);
            for (size_t i = 0; i < half; i++) emit(b_lo[i], hv[half + i]);
            emit(inner_product(a_hi, b_lo), Q);
            GroupElement R = multiscalar_mul_vartime(scalars, points);

            ctx.absorb_point("L", L);
            ctx.absorb_point("R", R);
            Scalar u = ctx.challenge_scalar("u");
            Scalar u_inv = u.invert();
            proof.L.push_back(L);
            proof.R.push_back(R);

            for (size_t i = 0; i < half; i++) {
                av[i] = a_lo[i] * u + a_hi[i] * u_inv;
                bv[i] = b_lo[i] * u_inv + b_hi[i] * u;
                Scalar gs[2] = {u_inv, u};
                GroupElement gp[2] = {gv[i], gv[half + i]};
                gv[i] = multiscalar_mul_vartime(gs, gp);
                Scalar hs[2] = {u, u_inv};
                GroupElement hp[2] = {hv[i], hv[half + i]};
                hv[i] = multiscalar_mul_vartime(hs, hp);
            }
            av.resize(half);
            bv.resize(half);
            gv.resize(half);
            hv.resize(half);
            len = half;
        }
        proof.a = av[0];
        proof.b = bv[0];

        RangeProof out;
        out.backend = kind();
        out.n_bits = n_bits;
        put_point(out.payload, proof.A);
        put_point(out.payload, proof.S);
        put_point(out.payload, proof.T1);
        put_point(out.payload, proof.T2);
        put_scalar(out.payload, proof.tau_x);
        put_scalar(out.payload, proof.mu);
        put_scalar(out.payload, proof.t_hat);
        for (size_t j = 0; j < proof.L.size(); j++) {
            put_point(out.payload, proof.L[j]);
            put_point(out.payload, proof.R[j]);
        }
        put_scalar(out.payload, proof.a);
        put_scalar(out.payload, proof.b);
        return out;
    }

    bool verify(const CommitKey& ck, const Commitment& cm, uint32_t n_bits,
                const RangeProof& proof, Transcript ctx) const override {
        RangeVerifyInstance inst{cm, n_bits, &proof, ctx};
        return verify_batch(ck, std::span<const RangeVerifyInstance>(&inst, 1));
    }

    bool verify_batch(const CommitKey& ck,
                      std::span<const RangeVerifyInstance> instances) const override;
};

struct ParsedBp {
    BpProof p;
    Scalar y, z, x, w;
    std::vector<Scalar> u, u_inv;
    uint32_t n_bits;
    GroupElement V;
};

// parse + transcript replay; nullopt on malformed input
std::optional<ParsedBp> parse_and_challenge(const Commitment& cm, uint32_t n_bits,
                                            const RangeProof& proof, Transcript& ctx) {
    if (proof.backend != RangeBackend::Bulletproof || proof.n_bits != n_bits) return std::nullopt;
    if (!is_pow2(n_bits) || n_bits > kMaxBits) return std::nullopt;
    size_t rounds = 0;
    for (size_t m = n_bits; m > 1; m /= 2) rounds++;
    if (proof.payload.size() != 32 * (4 + 3 + 2 * rounds + 2)) return std::nullopt;

    Reader rd{proof.payload};
    ParsedBp out;
    out.n_bits = n_bits;
    out.V = cm.point;
    auto A = rd.point();
    auto S = rd.point();
    auto T1 = rd.point();
    auto T2 = rd.point();
    auto tau_x = rd.scalar();
    auto mu = rd.scalar();
    auto t_hat = rd.scalar();
    if (!A || !S || !T1 || !T2 || !tau_x || !mu || !t_hat) return std::nullopt;
    out.p.A = *A;
    out.p.S = *S;
    out.p.T1 = *T1;
    out.p.T2 = *T2;
    out.p.tau_x = *tau_x;
    out.p.mu = *mu;
    out.p.t_hat = *t_hat;

    ctx.absorb("proof", std::span<const uint8_t>(
                            reinterpret_cast<const uint8_t*>("range/bp"), 8));
    ctx.absorb_u64("n", n_bits);
    ctx.absorb_point("V", cm.point);
    ctx.absorb_point("A", out.p.A);
    ctx.absorb_point("S", out.p.S);
    out.y = ctx.challenge_scalar("y");
    out.z = ctx.challenge_scalar("z");
    ctx.absorb_point("T1", out.p.T1);
    ctx.absorb_point("T2", out.p.T2);
    out.x = ctx.challenge_scalar("x");
    ctx.absorb_scalar("tau_x", out.p.tau_x);
    ctx.absorb_scalar("mu", out.p.mu);
    ctx.absorb_scalar("t_hat", out.p.t_hat);
    out.w = ctx.challenge_scalar("w");

    for (size_t j = 0; j < rounds; j++) {
        auto L = rd.point();
        auto R = rd.point();
        if (!L || !R) return std::nullopt;
        out.p.L.push_back(*L);
        out.p.R.push_back(*R);
        ctx.absorb_point("L", *L);
        ctx.absorb_point("R", *R);
        Scalar u = ctx.challenge_scalar("u");
        if (u.is_zero()) return std::nullopt;
        out.u.push_back(u);
        out.u_inv.push_back(u.invert());
    }
    auto a = rd.scalar();
    auto b = rd.scalar();
    if (!a || !b || !rd.done()) return std::nullopt;
    out.p.a = *a;
    out.p.b = *b;
    return out;
}

bool BulletproofBackend::verify_batch(const CommitKey& ck,
                                      std::span<const RangeVerifyInstance> instances) const {
    if (instances.empty()) return true;

    // One combined multiscalar equation; per-instance weights come out of a
    // hash over all statements and proofs, so verification stays
    // deterministic while forged components cannot cancel across instances.
    std::vector<ParsedBp> parsed;
    parsed.reserve(instances.size());
    Transcript weigh("padl/bp/batch-weights/v1");
    for (const auto& inst : instances) {
        Transcript ctx = inst.ctx;
        auto p = parse_and_challenge(inst.cm, inst.n_bits, *inst.proof, ctx);
        if (!p) return false;
        parsed.push_back(std::move(*p));
        weigh.absorb_point("V", inst.cm.point);
        weigh.absorb("proof", inst.proof->payload);
    }

    std::vector<Scalar> scalars;
    std::vector<GroupElement> points;
    Scalar g_coeff = Scalar::zero();
    Scalar h_coeff = Scalar::zero();
    size_t max_n = 0;
    for (const auto& pb : parsed) max_n = std::max(max_n, size_t(pb.n_bits));
    std::vector<Scalar> gi_coeff(max_n, Scalar::zero());
    std::vector<Scalar> hi_coeff(max_n, Scalar::zero());

    for (const auto& pb : parsed) {
        const size_t n = pb.n_bits;
        const Scalar& y = pb.y;
        const Scalar& z = pb.z;
        const Scalar& x = pb.x;
        Scalar zz = z * z;
        Scalar weight = weigh.challenge_scalar("rho");
        Scalar weight2 = weigh.challenge_scalar("rho2");

        std::vector<Scalar> y_pow(n), two_pow(n);
        y_pow[0] = Scalar::one();
        two_pow[0] = Scalar::one();
        for (size_t i = 1; i < n; i++) {
            y_pow[i] = y_pow[i - 1] * y;
            two_pow[i] = two_pow[i - 1] + two_pow[i - 1];
        }
        Scalar sum_y = Scalar::zero(), sum_2 = Scalar::zero();
        for (size_t i = 0; i < n; i++) {
            sum_y += y_pow[i];
            sum_2 += two_pow[i];
        }
        Scalar delta = (z - zz) * sum_y - z * zz * sum_2;

        // equation 1: g^(t_hat - delta) h^tau_x V^-zz T1^-x T2^-xx == 1
        g_coeff += weight2 * (pb.p.t_hat - delta);
        h_coeff += weight2 * pb.p.tau_x;
        scalars.push_back(-(weight2 * zz));
        points.push_back(pb.V);
        scalars.push_back(-(weight2 * x));
        points.push_back(pb.p.T1);
        scalars.push_back(-(weight2 * x * x));
        points.push_back(pb.p.T2);

        // equation 2 (inner-product argument, unrolled):
        // A S^x h^-mu Q^(t_hat - ab) prod L^(u^2) prod R^(u^-2)
        //   prod G_i^(-z - a s_i) prod H_i^( y^-i (z y^i + zz 2^i - b/s_i) ) == 1
        size_t rounds = pb.u.size();
        std::vector<Scalar> s(n);
        for (size_t i = 0; i < n; i++) {
            Scalar acc = Scalar::one();
            for (size_t j = 0; j < rounds; j++) {
                bool bit = (i >> (rounds - 1 - j)) & 1;
                acc *= bit ? pb.u[j] : pb.u_inv[j];
            }
            s[i] = acc;
        }
        Scalar y_inv = y.invert();
        Scalar y_inv_pow = Scalar::one();
        for (size_t i = 0; i < n; i++) {
            gi_coeff[i] += weight * (-z - pb.p.a * s[i]);
            Scalar b_over_s = pb.p.b * s[n - 1 - i];  // 1/s_i = s_(n-1-i)
            hi_coeff[i] += weight * (y_inv_pow * (z * y_pow[i] + zz * two_pow[i] - b_over_s));
            y_inv_pow *= y_inv;
        }
        scalars.push_back(weight);
        points.push_back(pb.p.A);
        scalars.push_back(weight * x);
        points.push_back(pb.p.S);
        h_coeff += -(weight * pb.p.mu);
        g_coeff += weight * pb.w * (pb.p.t_hat - pb.p.a * pb.p.b);
        for (size_t j = 0; j < rounds; j++) {
            scalars.push_back(weight * pb.u[j] * pb.u[j]);
            points.push_back(pb.p.L[j]);
            scalars.push_back(weight * pb.u_inv[j] * pb.u_inv[j]);
            points.push_back(pb.p.R[j]);
        }
    }

    scalars.push_back(g_coeff);
    points.push_back(ck.g);
    scalars.push_back(h_coeff);
    points.push_back(ck.h);
    auto G = bp_gens_G(max_n);
    auto H = bp_gens_H(max_n);
    for (size_t i = 0; i < max_n; i++) {
        scalars.push_back(gi_coeff[i]);
        points.push_back(G[i]);
        scalars.push_back(hi_coeff[i]);
        points.push_back(H[i]);
    }
    return multiscalar_mul_vartime(scalars, points).is_identity();
}

}  // namespace

std::span<const GroupElement> bp_gens_G(size_t n) {
    if (n > kMaxBits) throw InvalidInput("bp generators: n too large");
    return std::span<const GroupElement>(gens_G().data(), n);
}

std::span<const GroupElement> bp_gens_H(size_t n) {
    if (n > kMaxBits) throw InvalidInput("bp generators: n too large");
    return std::span<const GroupElement>(gens_H().data(), n);
}

const RangeProofBackendIface& range_backend(RangeBackend kind) {
    static const BitDecompositionBackend bits;
    static const BulletproofBackend bp;
    switch (kind) {
        case RangeBackend::BitDecomposition:
            return bits;
        case RangeBackend::Bulletproof:
            return bp;
    }
    throw InvalidInput("unknown range backend");
}

}  // namespace padl
