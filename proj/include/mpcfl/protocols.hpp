#pragma once

#include <vector>

#include "mpcfl/learner.hpp"
#include "mpcfl/secret_sharing.hpp"
#include "mpcfl/simnet.hpp"

namespace mpcfl {

/// Ordered list of the m elected committee members.
struct Committee {
    std::vector<PartyId> members;

    int size() const { return static_cast<int>(members.size()); }
};

struct ElectionConfig {
    int m = 3;           // committee size
    int b = 10;          // votes per party per round
    int max_rounds = 16;
};

enum class Topology { P2p, TwoPhase, Plaintext };

/// Everything a protocol run needs: the wire, the field, the sharing
/// scheme, and the master seed all per-party randomness derives from.
struct ProtocolContext {
    SimNetwork& net;
    const FieldParams& field;
    SharingScheme scheme;
    std::uint64_t master_seed = 0;
};

/// Secure sum over all parties: shares out, partial sums out, two
/// all-to-all rounds. Every party ends holding the identical sum mod q;
/// the returned vector has one (equal) entry per party.
std::vector<FieldVec> p2p_secure_sum(ProtocolContext& ctx,
                                     const std::vector<FieldVec>& private_values,
                                     Phase phase, int epoch);

/// Fixed-point model averaging on top of p2p_secure_sum: encode, sum,
/// decode with divisor n. Advances the counters by exactly 2n(n-1)
/// messages of size s.
Eigen::VectorXd p2p_model_aggregate(ProtocolContext& ctx,
                                    const std::vector<Eigen::VectorXd>& local_models,
                                    int epoch);

/// Maps one aggregated vote entry to a party id: (value mod n) + 1.
std::vector<int> vote_ids_from_aggregate(const FieldVec& aggregate, int n);

/// Tallies candidate ids and appends the highest-voted ids not yet in the
/// committee, at most `room` of them; ties break toward the lower id.
void append_winners(std::vector<PartyId>& members, const std::vector<int>& ids,
                    int room);

/// Phase I. Repeats secure-sum vote rounds until m members are elected;
/// throws ElectionStalled past cfg.max_rounds. All parties compute the
/// identical committee.
Committee elect_committee(ProtocolContext& ctx, const ElectionConfig& cfg);

/// Phase II. Each party uploads m shares of its model to the committee
/// (n*m messages, self-delivery counted), members exchange partial sums
/// all-to-all (m(m-1) messages) and distribute the aggregate so that
/// member w serves the parties with i mod m = w-1 (n messages).
Eigen::VectorXd two_phase_aggregate(ProtocolContext& ctx,
                                    const std::vector<Eigen::VectorXd>& local_models,
                                    const Committee& committee, int epoch);

/// Baseline without secret sharing: every party sends its raw model to all
/// others (n(n-1) messages of size s) and averages locally.
Eigen::VectorXd plaintext_aggregate(ProtocolContext& ctx,
                                    const std::vector<Eigen::VectorXd>& local_models,
                                    int epoch);

/// One federated party: local data plus the current model.
struct FlParty {
    PartyId id;
    ModelTensor model;
    Dataset data;
};

/// One global epoch: t local gradient steps at every party, then the
/// topology-selected aggregation; installs the global model everywhere and
/// returns it. A single party trains alone (no messages).
Eigen::VectorXd federated_round(ProtocolContext& ctx, std::vector<FlParty>& parties,
                                Topology topology, const Committee* committee,
                                int t_iters, double lr, int epoch);

}  // namespace mpcfl
