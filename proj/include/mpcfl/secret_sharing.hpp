#pragma once

#include <span>
#include <vector>

#include "mpcfl/field.hpp"

namespace mpcfl {

enum class SchemeKind { Additive, Shamir };

/// Sharing scheme used by the aggregation protocols. Shamir reconstructs
/// from any degree+1 shares; additive needs all n_shares.
struct SharingScheme {
    SchemeKind kind = SchemeKind::Additive;
    int n_shares = 2;
    int degree = 0;  // Shamir only, reconstruction threshold degree + 1

    static SharingScheme additive(int n) { return {SchemeKind::Additive, n, 0}; }
    static SharingScheme shamir(int n, int d) { return {SchemeKind::Shamir, n, d}; }
};

/// One party's share of a whole tensor. `slot` is the Shamir evaluation
/// point (x = 1..n) or, for additive sharing, the recipient index; all
/// shares of one sharing have equal length and distinct slots.
struct ShareVector {
    int owner = 0;  // party that generated the secret
    int slot = 0;
    FieldVec values;
};

/// Splits `secret` into n addends: shares 1..n-1 are fresh uniform vectors
/// drawn from `rng` alone, share n is secret minus their sum (mod q).
std::vector<ShareVector> additive_share(const FieldVec& secret, int n, RngStream& rng,
                                        const FieldParams& p, int owner = 0);

/// Coordinatewise modular sum of all n shares.
FieldVec additive_reconstruct(std::span<const ShareVector> shares, const FieldParams& p);

/// Per coordinate, evaluates a fresh random polynomial of the given degree
/// with the secret as constant term at x = 1..n.
std::vector<ShareVector> shamir_share(const FieldVec& secret, int n, int degree,
                                      RngStream& rng, const FieldParams& p,
                                      int owner = 0);

/// Horner evaluation of a0 + a1 x + ... + ad x^d; shared with the tests.
std::uint64_t eval_poly(std::span<const std::uint64_t> coeffs, std::uint64_t x,
                        const FieldParams& p);

/// Lagrange coefficients at x = 0 for the given distinct nonzero slots.
/// Computed once per slot set and reused across all tensor coordinates.
std::vector<std::uint64_t> lagrange_coeffs_at_zero(std::span<const int> slots,
                                                   const FieldParams& p);

/// Interpolates the secret from at least degree+1 shares at distinct slots.
FieldVec shamir_reconstruct(std::span<const ShareVector> shares, int degree,
                            const FieldParams& p);

/// Coordinatewise sum of two shares at the same slot; the result is a valid
/// share of the sum of the underlying secrets (both schemes are additively
/// homomorphic).
ShareVector share_pointwise_add(const ShareVector& a, const ShareVector& b,
                                const FieldParams& p);

/// Scheme-dispatched share/reconstruct used by the protocols.
std::vector<ShareVector> make_shares(const FieldVec& secret, const SharingScheme& scheme,
                                     RngStream& rng, const FieldParams& p, int owner = 0);
FieldVec reconstruct(std::span<const ShareVector> shares, const SharingScheme& scheme,
                     const FieldParams& p);

}  // namespace mpcfl
