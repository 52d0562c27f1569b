#pragma once

#include <cstdint>

namespace mpcfl {

/// Inputs of the closed-form communication-cost formulas. `t` (local
/// training iterations) is carried for reporting only; it never enters the
/// message counts.
struct CostInputs {
    std::uint64_t n = 0;  // parties
    std::uint64_t e = 0;  // global epochs
    std::uint64_t t = 0;  // local iterations per epoch
    std::uint64_t m = 0;  // committee size
    std::uint64_t b = 0;  // election batch size
    std::uint64_t s = 0;  // model size in field elements
};

struct CostBreakdown {
    std::uint64_t msg_num = 0;
    std::uint64_t msg_size = 0;
};

/// The committee exchange step admits two counts: `Paper` books m-1
/// messages per epoch for the whole committee, `Trace` books the
/// all-to-all exchange the aggregation procedure actually performs,
/// m(m-1) per epoch. The simulator matches `Trace` exactly.
enum class ExchangeVariant { Paper, Trace };

/// Peer-to-peer aggregation: 2 n (n-1) messages of size s per epoch.
CostBreakdown p2p_cost(const CostInputs& in);

/// Committee election, one round: 2 n (n-1) messages of size b.
CostBreakdown phase1_cost(const CostInputs& in);

/// Committee-mediated aggregation per e epochs: n m uploads, the exchange
/// (variant-dependent), and n broadcasts, all of size s.
CostBreakdown phase2_cost(const CostInputs& in,
                          ExchangeVariant variant = ExchangeVariant::Paper);

/// Election plus committee aggregation, evaluated in expanded closed form;
/// equals phase1_cost + phase2_cost identically.
CostBreakdown two_phase_cost(const CostInputs& in,
                             ExchangeVariant variant = ExchangeVariant::Paper);

/// Baseline without secret sharing: parties exchange raw models once per
/// epoch, n (n-1) messages of size s.
CostBreakdown plaintext_cost(const CostInputs& in);

}  // namespace mpcfl
