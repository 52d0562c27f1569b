#include "mpcfl/secret_sharing.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

namespace mpcfl {

namespace {

void check_slots_distinct(std::span<const ShareVector> shares) {
    std::unordered_set<int> seen;
    for (const auto& s : shares) {
        if (!seen.insert(s.slot).second) {
            throw DuplicateSlot("duplicate share slot " + std::to_string(s.slot));
        }
    }
}

void check_equal_lengths(std::span<const ShareVector> shares) {
    const Eigen::Index len = shares.front().values.size();
    for (const auto& s : shares) {
        if (s.values.size() != len) {
            throw LengthMismatch("share length " + std::to_string(s.values.size()) +
                                 " != " + std::to_string(len));
        }
    }
}

}  // namespace

std::vector<ShareVector> additive_share(const FieldVec& secret, int n, RngStream& rng,
                                        const FieldParams& p, int owner) {
    if (n < 2) throw BadCount("additive sharing needs n >= 2, got " + std::to_string(n));
    if (secret.size() == 0) throw LengthMismatch("additive sharing of empty secret");
    std::vector<ShareVector> shares(static_cast<std::size_t>(n));
    FieldVec running = FieldVec::Zero(secret.size());
    // First n-1 shares depend on the RNG stream only, never on the secret.
    for (int j = 0; j < n - 1; ++j) {
        shares[j].owner = owner;
        shares[j].slot = j + 1;
        shares[j].values = field_vec_uniform(secret.size(), rng, p);
        running = field_vec_add(running, shares[j].values, p);
    }
    shares[n - 1].owner = owner;
    shares[n - 1].slot = n;
    shares[n - 1].values = secret.binaryExpr(
        running, [&p](std::uint64_t s, std::uint64_t r) { return p.sub(s, r); });
    return shares;
}

FieldVec additive_reconstruct(std::span<const ShareVector> shares, const FieldParams& p) {
    if (shares.empty()) throw BadCount("additive_reconstruct: no shares");
    check_equal_lengths(shares);
    check_slots_distinct(shares);
    FieldVec sum = FieldVec::Zero(shares.front().values.size());
    for (const auto& s : shares) sum = field_vec_add(sum, s.values, p);
    return sum;
}

std::uint64_t eval_poly(std::span<const std::uint64_t> coeffs, std::uint64_t x,
                        const FieldParams& p) {
    std::uint64_t acc = 0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
        acc = p.add(p.mul(acc, x), *it);
    }
    return acc;
}

std::vector<ShareVector> shamir_share(const FieldVec& secret, int n, int degree,
                                      RngStream& rng, const FieldParams& p, int owner) {
    if (degree < 1 || degree > n - 1) {
        throw BadDegree("shamir degree must satisfy 1 <= d <= n-1, got d=" +
                        std::to_string(degree) + ", n=" + std::to_string(n));
    }
    if (secret.size() == 0) throw LengthMismatch("shamir sharing of empty secret");
    if (static_cast<std::uint64_t>(n) >= p.q()) {
        throw BadCount("shamir: n must be below the field modulus");
    }
    std::vector<ShareVector> shares(static_cast<std::size_t>(n));
    for (int x = 1; x <= n; ++x) {
        shares[x - 1].owner = owner;
        shares[x - 1].slot = x;
        shares[x - 1].values.resize(secret.size());
    }
    std::vector<std::uint64_t> coeffs(static_cast<std::size_t>(degree) + 1);
    for (Eigen::Index c = 0; c < secret.size(); ++c) {
        coeffs[0] = secret[c];
        for (int k = 1; k <= degree; ++k) coeffs[static_cast<std::size_t>(k)] = p.sample_uniform(rng);
        for (int x = 1; x <= n; ++x) {
            shares[x - 1].values[c] = eval_poly(coeffs, static_cast<std::uint64_t>(x), p);
        }
    }
    return shares;
}

std::vector<std::uint64_t> lagrange_coeffs_at_zero(std::span<const int> slots,
                                                   const FieldParams& p) {
    std::vector<std::uint64_t> lambda(slots.size());
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i] == 0) throw DuplicateSlot("slot 0 is reserved for the secret");
        std::uint64_t num = 1;
        std::uint64_t den = 1;
        const std::uint64_t xi = p.from_int(slots[i]);
        for (std::size_t j = 0; j < slots.size(); ++j) {
            if (j == i) continue;
            const std::uint64_t xj = p.from_int(slots[j]);
            num = p.mul(num, xj);
            den = p.mul(den, p.sub(xj, xi));
        }
        lambda[i] = p.mul(num, p.inv(den));
    }
    return lambda;
}

FieldVec shamir_reconstruct(std::span<const ShareVector> shares, int degree,
                            const FieldParams& p) {
    if (static_cast<int>(shares.size()) < degree + 1) {
        throw InsufficientShares("shamir_reconstruct: need at least " +
                                 std::to_string(degree + 1) + " shares, got " +
                                 std::to_string(shares.size()));
    }
    check_equal_lengths(shares);
    check_slots_distinct(shares);
    std::vector<int> slots(shares.size());
    for (std::size_t i = 0; i < shares.size(); ++i) slots[i] = shares[i].slot;
    const auto lambda = lagrange_coeffs_at_zero(slots, p);
    FieldVec secret = FieldVec::Zero(shares.front().values.size());
    for (std::size_t i = 0; i < shares.size(); ++i) {
        secret = field_vec_add(
            secret,
            shares[i].values.unaryExpr(
                [&](std::uint64_t v) { return p.mul(lambda[i], v); }),
            p);
    }
    return secret;
}

ShareVector share_pointwise_add(const ShareVector& a, const ShareVector& b,
                                const FieldParams& p) {
    if (a.slot != b.slot) {
        throw SlotMismatch("share_pointwise_add: slot " + std::to_string(a.slot) +
                           " vs " + std::to_string(b.slot));
    }
    ShareVector out;
    out.owner = a.owner;
    out.slot = a.slot;
    out.values = field_vec_add(a.values, b.values, p);
    return out;
}

std::vector<ShareVector> make_shares(const FieldVec& secret, const SharingScheme& scheme,
                                     RngStream& rng, const FieldParams& p, int owner) {
    if (scheme.kind == SchemeKind::Additive) {
        return additive_share(secret, scheme.n_shares, rng, p, owner);
    }
    return shamir_share(secret, scheme.n_shares, scheme.degree, rng, p, owner);
}

FieldVec reconstruct(std::span<const ShareVector> shares, const SharingScheme& scheme,
                     const FieldParams& p) {
    if (scheme.kind == SchemeKind::Additive) {
        if (static_cast<int>(shares.size()) != scheme.n_shares) {
            throw InsufficientShares("additive reconstruction needs all " +
                                     std::to_string(scheme.n_shares) + " shares");
        }
        return additive_reconstruct(shares, p);
    }
    return shamir_reconstruct(shares, scheme.degree, p);
}

}  // namespace mpcfl
