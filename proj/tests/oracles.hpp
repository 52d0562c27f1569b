#pragma once

// Test-only reference computations, kept independent of the library's own
// arithmetic paths (the field uses Fermat exponentiation for inverses, the
// oracle uses the extended Euclidean algorithm; reconstruction uses
// Lagrange interpolation, the oracle evaluates polynomials directly).

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace oracles {

inline std::uint64_t egcd_inverse(std::uint64_t a, std::uint64_t m) {
    std::int64_t t = 0, new_t = 1;
    std::int64_t r = static_cast<std::int64_t>(m), new_r = static_cast<std::int64_t>(a);
    while (new_r != 0) {
        const std::int64_t q = r / new_r;
        std::int64_t tmp = t - q * new_t;
        t = new_t;
        new_t = tmp;
        tmp = r - q * new_r;
        r = new_r;
        new_r = tmp;
    }
    if (t < 0) t += static_cast<std::int64_t>(m);
    return static_cast<std::uint64_t>(t);
}

inline double chi_square_uniform(const long* counts, int bins, long draws) {
    const double expected = static_cast<double>(draws) / bins;
    double chi = 0.0;
    for (int i = 0; i < bins; ++i) {
        const double d = counts[i] - expected;
        chi += d * d / expected;
    }
    return chi;
}

/// Plain double-arithmetic polynomial evaluation mod m (small moduli only).
inline std::uint64_t eval_poly_mod(const std::vector<std::uint64_t>& coeffs,
                                   std::uint64_t x, std::uint64_t m) {
    unsigned __int128 acc = 0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
        acc = (acc * x + *it) % m;
    }
    return static_cast<std::uint64_t>(acc);
}

/// Coordinatewise mean of a set of tensors, the aggregation ground truth.
inline Eigen::VectorXd plaintext_mean(const std::vector<Eigen::VectorXd>& tensors) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(tensors.front().size());
    for (const auto& t : tensors) sum += t;
    return sum / static_cast<double>(tensors.size());
}

}  // namespace oracles
