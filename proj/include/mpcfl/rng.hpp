#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>

namespace mpcfl {

/// Deterministic counter-based random stream (splitmix64 core).
///
/// Every consumer derives its own stream from a (master_seed, party, tag,
/// round) tuple, so parties never share generator state and any experiment
/// replays bit-identically from its master seed.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t party, std::uint64_t tag,
              std::uint64_t round = 0) {
        state_ = 0x6a09e667f3bcc909ull;
        absorb(master_seed);
        absorb(party);
        absorb(tag);
        absorb(round);
    }

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ull;
        return finalize(state_);
    }

    /// Uniform draw on [0, bound) via masked rejection; bound >= 1.
    std::uint64_t below(std::uint64_t bound) {
        assert(bound >= 1);
        if (bound == 1) return 0;
        std::uint64_t mask = bound - 1;
        mask |= mask >> 1;
        mask |= mask >> 2;
        mask |= mask >> 4;
        mask |= mask >> 8;
        mask |= mask >> 16;
        mask |= mask >> 32;
        std::uint64_t v;
        do {
            v = next() & mask;
        } while (v >= bound);
        return v;
    }

    /// Uniform double in [0, 1) with 53 mantissa bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Standard normal deviate (Box-Muller, trigonometric form).
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // keep u1 strictly positive so log() stays finite
        double u1 = (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    static std::uint64_t finalize(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    void absorb(std::uint64_t w) {
        state_ ^= w + 0x9e3779b97f4a7c15ull + (state_ << 6) + (state_ >> 2);
        state_ = finalize(state_);
    }

    std::uint64_t state_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Stream tags. Sharing randomness inside a protocol phase uses
// kShareBase + static_cast<uint64_t>(phase); everything else gets a
// literal tag below. Keeping them in one place avoids collisions.
namespace rng_tag {
inline constexpr std::uint64_t kModelInit = 1;
inline constexpr std::uint64_t kDataGen = 2;
inline constexpr std::uint64_t kVote = 3;
inline constexpr std::uint64_t kHeldOut = 4;
inline constexpr std::uint64_t kShareBase = 1000;
}  // namespace rng_tag

/// Folds a rotation (or any sub-experiment index) into a master seed so
/// repeated simulations inside one experiment draw independent streams.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    RngStream s(master, index, 0xdeadbeef, 0);
    return s.next();
}

}  // namespace mpcfl
