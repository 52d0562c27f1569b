#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "mpcfl/errors.hpp"
#include "mpcfl/rng.hpp"

namespace mpcfl {

/// Field elements are canonical residues in [0, q). They travel in plain
/// uint64 words; all arithmetic goes through FieldParams so the modulus is
/// explicit at every call site.
using FieldVec = Eigen::Matrix<std::uint64_t, Eigen::Dynamic, 1>;

/// Prime modulus plus the fixed-point codec that maps real-valued model
/// weights into the field (negatives occupy the upper half).
///
/// Construction verifies that q is prime (deterministic Miller-Rabin) and
/// that sums of up to max_terms encoded values cannot wrap:
///   max_terms * 2^(int_bits + frac_bits + 1) < q.
class FieldParams {
public:
    FieldParams(std::uint64_t q, int frac_bits, int int_bits, std::uint64_t max_terms);

    /// Q = 2^61 - 1 (Mersenne), f = 16, i = 24, max_terms = 1024.
    static FieldParams default61();

    std::uint64_t q() const { return q_; }
    int frac_bits() const { return frac_bits_; }
    int int_bits() const { return int_bits_; }
    std::uint64_t max_terms() const { return max_terms_; }

    // ---- scalar arithmetic on canonical residues ----

    std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
        const std::uint64_t threshold = q_ - b;  // in [1, q]
        return a >= threshold ? a - threshold : a + b;
    }

    std::uint64_t sub(std::uint64_t a, std::uint64_t b) const {
        return a >= b ? a - b : a + (q_ - b);
    }

    std::uint64_t neg(std::uint64_t a) const { return a == 0 ? 0 : q_ - a; }

    std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
        const unsigned __int128 t =
            static_cast<unsigned __int128>(a) * static_cast<unsigned __int128>(b);
        return mersenne_ ? reduce_mersenne(t) : static_cast<std::uint64_t>(t % q_);
    }

    std::uint64_t pow(std::uint64_t a, std::uint64_t e) const;

    /// Multiplicative inverse; throws ZeroInverse on a == 0.
    std::uint64_t inv(std::uint64_t a) const;

    /// Reduces an arbitrary signed integer into [0, q).
    std::uint64_t from_int(std::int64_t x) const;

    // ---- fixed-point codec ----

    /// round(x * 2^frac_bits) mapped into the field. Requires |x| < 2^int_bits.
    std::uint64_t encode(double x) const;

    /// Signed interpretation of v divided by divisor * 2^frac_bits.
    /// Requires the decoded magnitude below divisor * 2^int_bits.
    double decode(std::uint64_t v, std::uint64_t divisor = 1) const;

    /// Uniform element of [0, q) by rejection sampling.
    std::uint64_t sample_uniform(RngStream& rng) const { return rng.below(q_); }

private:
    std::uint64_t reduce_mersenne(unsigned __int128 x) const {
        const unsigned __int128 mask = q_;
        unsigned __int128 t = (x & mask) + (x >> mersenne_k_);
        std::uint64_t r = static_cast<std::uint64_t>((t & mask) + (t >> mersenne_k_));
        if (r >= q_) r -= q_;
        return r;
    }

    std::uint64_t q_;
    int frac_bits_;
    int int_bits_;
    std::uint64_t max_terms_;
    bool mersenne_ = false;
    unsigned mersenne_k_ = 0;
};

/// Deterministic Miller-Rabin for 64-bit integers.
bool is_prime_u64(std::uint64_t n);

// ---- vectorized helpers over FieldVec ----

/// Coordinatewise modular sum; throws LengthMismatch on shape mismatch.
FieldVec field_vec_add(const FieldVec& a, const FieldVec& b, const FieldParams& p);

/// Vector of independent uniform field elements.
FieldVec field_vec_uniform(Eigen::Index len, RngStream& rng, const FieldParams& p);

/// Encodes a real tensor coordinatewise into the field.
FieldVec encode_tensor(const Eigen::VectorXd& x, const FieldParams& p);

/// Decodes a field tensor back into reals, dividing by `divisor`
/// (plaintext averaging after reconstruction).
Eigen::VectorXd decode_tensor(const FieldVec& v, const FieldParams& p,
                              std::uint64_t divisor = 1);

}  // namespace mpcfl
