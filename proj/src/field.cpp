#include "mpcfl/field.hpp"

#include <cmath>
#include <string>

namespace mpcfl {

namespace {

std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(
        static_cast<unsigned __int128>(a) * static_cast<unsigned __int128>(b) % m);
}

std::uint64_t powmod_u64(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    a %= m;
    while (e > 0) {
        if (e & 1ull) r = mulmod_u64(r, a, m);
        a = mulmod_u64(a, a, m);
        e >>= 1;
    }
    return r;
}

}  // namespace

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull,
                            29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1ull) == 0) {
        d >>= 1;
        ++s;
    }
    // This witness set is deterministic for all 64-bit integers.
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull,
                            29ull, 31ull, 37ull}) {
        std::uint64_t x = powmod_u64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod_u64(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

FieldParams::FieldParams(std::uint64_t q, int frac_bits, int int_bits,
                         std::uint64_t max_terms)
    : q_(q), frac_bits_(frac_bits), int_bits_(int_bits), max_terms_(max_terms) {
    if (!is_prime_u64(q_)) {
        throw ConfigError("FieldParams: modulus " + std::to_string(q_) + " is not prime");
    }
    if (frac_bits_ < 0) throw ConfigError("FieldParams: frac_bits must be >= 0");
    if (int_bits_ < 1) throw ConfigError("FieldParams: int_bits must be >= 1");
    if (max_terms_ < 1) throw ConfigError("FieldParams: max_terms must be >= 1");
    const int span = int_bits_ + frac_bits_ + 1;
    if (span >= 63) throw ConfigError("FieldParams: int_bits + frac_bits too large");
    const unsigned __int128 reach =
        static_cast<unsigned __int128>(max_terms_) << span;
    if (reach >= q_) {
        throw ConfigError(
            "FieldParams: max_terms * 2^(int_bits + frac_bits + 1) must stay below q");
    }
    // p = 2^k - 1 enables the folding reduction in mul().
    mersenne_ = (q_ & (q_ + 1)) == 0;
    if (mersenne_) {
        mersenne_k_ = 64u - static_cast<unsigned>(__builtin_clzll(q_));
        if (mersenne_k_ >= 64u) mersenne_ = false;
    }
}

FieldParams FieldParams::default61() {
    return FieldParams((1ull << 61) - 1, 16, 24, 1024);
}

std::uint64_t FieldParams::pow(std::uint64_t a, std::uint64_t e) const {
    std::uint64_t base = a;
    std::uint64_t res = 1 % q_;
    while (e > 0) {
        if (e & 1ull) res = mul(res, base);
        base = mul(base, base);
        e >>= 1;
    }
    return res;
}

std::uint64_t FieldParams::inv(std::uint64_t a) const {
    if (a == 0) throw ZeroInverse("field inverse of zero");
    // q is prime, so a^(q-2) = a^-1.
    return pow(a, q_ - 2);
}

std::uint64_t FieldParams::from_int(std::int64_t x) const {
    if (x >= 0) return static_cast<std::uint64_t>(x) % q_;
    const std::uint64_t mag = static_cast<std::uint64_t>(-(x + 1)) + 1;  // |x| without UB
    const std::uint64_t r = mag % q_;
    return r == 0 ? 0 : q_ - r;
}

std::uint64_t FieldParams::encode(double x) const {
    const double bound = std::ldexp(1.0, int_bits_);
    if (!(std::abs(x) < bound)) {
        throw Overflow("encode: |" + std::to_string(x) + "| >= 2^" +
                       std::to_string(int_bits_));
    }
    const long long scaled = std::llround(std::ldexp(x, frac_bits_));
    if (scaled >= 0) return static_cast<std::uint64_t>(scaled);
    return q_ - static_cast<std::uint64_t>(-scaled);
}

double FieldParams::decode(std::uint64_t v, std::uint64_t divisor) const {
    if (divisor == 0) throw ConfigError("decode: divisor must be positive");
    const std::uint64_t half = q_ / 2;
    const bool negative = v > half;
    const std::uint64_t mag = negative ? q_ - v : v;
    const unsigned __int128 limit = static_cast<unsigned __int128>(divisor)
                                    << (int_bits_ + frac_bits_);
    if (mag >= limit) {
        throw Overflow("decode: magnitude exceeds divisor * 2^(int_bits + frac_bits)");
    }
    const double signed_val = negative ? -static_cast<double>(mag) : static_cast<double>(mag);
    return signed_val / (static_cast<double>(divisor) * std::ldexp(1.0, frac_bits_));
}

FieldVec field_vec_add(const FieldVec& a, const FieldVec& b, const FieldParams& p) {
    if (a.size() != b.size()) {
        throw LengthMismatch("field_vec_add: " + std::to_string(a.size()) + " vs " +
                             std::to_string(b.size()));
    }
    return a.binaryExpr(b, [&p](std::uint64_t x, std::uint64_t y) { return p.add(x, y); });
}

FieldVec field_vec_uniform(Eigen::Index len, RngStream& rng, const FieldParams& p) {
    FieldVec v(len);
    for (Eigen::Index i = 0; i < len; ++i) v[i] = p.sample_uniform(rng);
    return v;
}

FieldVec encode_tensor(const Eigen::VectorXd& x, const FieldParams& p) {
    FieldVec v(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) v[i] = p.encode(x[i]);
    return v;
}

Eigen::VectorXd decode_tensor(const FieldVec& v, const FieldParams& p,
                              std::uint64_t divisor) {
    Eigen::VectorXd x(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) x[i] = p.decode(v[i], divisor);
    return x;
}

}  // namespace mpcfl
