#include "mpcfl/cost_model.hpp"

#include <limits>
#include <string>

#include "mpcfl/errors.hpp"

namespace mpcfl {

namespace {

// All closed forms are evaluated in 128-bit arithmetic and narrowed with a
// range check; the model never touches floating point.
class Wide {
public:
    Wide(unsigned __int128 v) : v_(v) {}  // NOLINT: implicit by design

    friend Wide operator+(Wide a, Wide b) {
        const unsigned __int128 r = a.v_ + b.v_;
        if (r < a.v_) throw Overflow("cost model: 128-bit addition overflow");
        return Wide(r);
    }
    friend Wide operator*(Wide a, Wide b) {
        const unsigned __int128 r = a.v_ * b.v_;
        if (a.v_ != 0 && r / a.v_ != b.v_) {
            throw Overflow("cost model: 128-bit multiplication overflow");
        }
        return Wide(r);
    }
    friend Wide operator-(Wide a, Wide b) {
        if (a.v_ < b.v_) throw Overflow("cost model: negative intermediate");
        return Wide(a.v_ - b.v_);
    }

    std::uint64_t narrow() const {
        if (v_ > std::numeric_limits<std::uint64_t>::max()) {
            throw Overflow("cost model: value exceeds 64 bits");
        }
        return static_cast<std::uint64_t>(v_);
    }

private:
    unsigned __int128 v_;
};

void validate(const CostInputs& in, bool committee_terms) {
    if (in.n < 2) throw ConfigError("cost model: n >= 2 required");
    if (in.e < 1) throw ConfigError("cost model: e >= 1 required");
    if (in.s < 1) throw ConfigError("cost model: s >= 1 required");
    if (committee_terms) {
        if (in.m < 1) throw ConfigError("cost model: m >= 1 required");
        if (in.b < 1) throw ConfigError("cost model: b >= 1 required");
        if (in.m > in.n) {
            throw ConfigError("cost model: committee size m = " + std::to_string(in.m) +
                              " exceeds n = " + std::to_string(in.n));
        }
    }
}

}  // namespace

CostBreakdown p2p_cost(const CostInputs& in) {
    validate(in, false);
    const Wide n = in.n, e = in.e, s = in.s;
    const Wide num = Wide(2) * n * n * e - Wide(2) * n * e;
    return {num.narrow(), (num * s).narrow()};
}

CostBreakdown phase1_cost(const CostInputs& in) {
    validate(in, true);
    const Wide n = in.n, b = in.b;
    const Wide num = Wide(2) * n * n - Wide(2) * n;
    return {num.narrow(), (num * b).narrow()};
}

CostBreakdown phase2_cost(const CostInputs& in, ExchangeVariant variant) {
    validate(in, true);
    const Wide n = in.n, e = in.e, m = in.m, s = in.s;
    const Wide exchange =
        variant == ExchangeVariant::Paper ? m - Wide(1) : m * (m - Wide(1));
    const Wide num = (n * m + n + exchange) * e;
    return {num.narrow(), (num * s).narrow()};
}

CostBreakdown two_phase_cost(const CostInputs& in, ExchangeVariant variant) {
    validate(in, true);
    const Wide n = in.n, e = in.e, m = in.m, b = in.b, s = in.s;
    if (variant == ExchangeVariant::Paper) {
        const Wide num = Wide(2) * n * n + n * (m * e + e - Wide(2)) + m * e - e;
        const Wide size = Wide(2) * n * n * b +
                          n * (m * e * s + e * s - Wide(2) * b) + m * e * s - e * s;
        return {num.narrow(), size.narrow()};
    }
    const Wide num =
        Wide(2) * n * n + n * (m * e + e - Wide(2)) + (m * m - m) * e;
    const Wide size = Wide(2) * n * n * b + n * (m * e * s + e * s - Wide(2) * b) +
                      (m * m - m) * e * s;
    return {num.narrow(), size.narrow()};
}

CostBreakdown plaintext_cost(const CostInputs& in) {
    validate(in, false);
    const Wide n = in.n, e = in.e, s = in.s;
    const Wide num = n * (n - Wide(1)) * e;
    return {num.narrow(), (num * s).narrow()};
}

}  // namespace mpcfl
