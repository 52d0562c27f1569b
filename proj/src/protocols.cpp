#include "mpcfl/protocols.hpp"

#include <algorithm>
#include <cstring>
#include <map>
#include <string>

namespace mpcfl {

namespace {

RngStream share_stream(const ProtocolContext& ctx, PartyId party, Phase phase,
                       int epoch) {
    return RngStream(ctx.master_seed, static_cast<std::uint64_t>(party.v),
                     rng_tag::kShareBase + static_cast<std::uint64_t>(phase),
                     static_cast<std::uint64_t>(epoch));
}

void check_equal_lengths(const std::vector<FieldVec>& values) {
    for (const auto& v : values) {
        if (v.size() != values.front().size()) {
            throw LengthMismatch("party inputs must share one length");
        }
    }
}

void check_same_shape(const std::vector<Eigen::VectorXd>& models) {
    for (const auto& m : models) {
        if (m.size() != models.front().size()) {
            throw LengthMismatch("model tensors must share one shape");
        }
    }
}

}  // namespace

std::vector<FieldVec> p2p_secure_sum(ProtocolContext& ctx,
                                     const std::vector<FieldVec>& private_values,
                                     Phase phase, int epoch) {
    const int n = static_cast<int>(private_values.size());
    if (n < 2) throw BadCount("p2p_secure_sum needs at least 2 parties");
    if (ctx.net.party_count() < n) throw UnknownParty("network has too few parties");
    if (ctx.scheme.n_shares != n) {
        throw ConfigError("scheme is set up for " + std::to_string(ctx.scheme.n_shares) +
                          " shares but " + std::to_string(n) + " parties joined");
    }
    check_equal_lengths(private_values);

    // Round 1: shares out. Party i keeps its own slot; that costs nothing.
    std::vector<ShareVector> kept(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) {
        auto rng = share_stream(ctx, PartyId{i}, phase, epoch);
        auto shares = make_shares(private_values[static_cast<std::size_t>(i - 1)],
                                  ctx.scheme, rng, ctx.field, i);
        for (int j = 1; j <= n; ++j) {
            if (j == i) {
                kept[static_cast<std::size_t>(i - 1)] = shares[static_cast<std::size_t>(j - 1)];
            } else {
                ctx.net.send(Envelope{PartyId{i}, PartyId{j}, phase, epoch,
                                      shares[static_cast<std::size_t>(j - 1)].values});
            }
        }
    }
    ctx.net.run_round();

    // Local aggregation of one slot per party.
    std::vector<ShareVector> partial(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) {
        ShareVector acc = kept[static_cast<std::size_t>(i - 1)];
        for (int j = 1; j <= n; ++j) {
            if (j == i) continue;
            const Envelope env = ctx.net.fetch(PartyId{i}, PartyId{j}, phase, epoch);
            acc = share_pointwise_add(acc, ShareVector{j, i, env.payload}, ctx.field);
        }
        partial[static_cast<std::size_t>(i - 1)] = std::move(acc);
    }

    // Round 2: partial sums out.
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) {
            if (j == i) continue;
            ctx.net.send(Envelope{PartyId{i}, PartyId{j}, phase, epoch,
                                  partial[static_cast<std::size_t>(i - 1)].values});
        }
    }
    ctx.net.run_round();

    std::vector<FieldVec> results(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) {
        std::vector<ShareVector> slots(static_cast<std::size_t>(n));
        slots[static_cast<std::size_t>(i - 1)] = partial[static_cast<std::size_t>(i - 1)];
        for (int j = 1; j <= n; ++j) {
            if (j == i) continue;
            const Envelope env = ctx.net.fetch(PartyId{i}, PartyId{j}, phase, epoch);
            slots[static_cast<std::size_t>(j - 1)] =
                ShareVector{j, j, env.payload};
        }
        results[static_cast<std::size_t>(i - 1)] = reconstruct(slots, ctx.scheme, ctx.field);
    }
    for (int i = 1; i < n; ++i) {
        if (results[static_cast<std::size_t>(i)] != results[0]) {
            throw ProtocolError("parties disagree on the secure sum");
        }
    }
    return results;
}

Eigen::VectorXd p2p_model_aggregate(ProtocolContext& ctx,
                                    const std::vector<Eigen::VectorXd>& local_models,
                                    int epoch) {
    check_same_shape(local_models);
    const int n = static_cast<int>(local_models.size());
    std::vector<FieldVec> encoded(local_models.size());
    for (std::size_t i = 0; i < local_models.size(); ++i) {
        encoded[i] = encode_tensor(local_models[i], ctx.field);
    }
    const auto sums = p2p_secure_sum(ctx, encoded, Phase::P2pAggregation, epoch);
    return decode_tensor(sums[0], ctx.field, static_cast<std::uint64_t>(n));
}

std::vector<int> vote_ids_from_aggregate(const FieldVec& aggregate, int n) {
    std::vector<int> ids(static_cast<std::size_t>(aggregate.size()));
    for (Eigen::Index k = 0; k < aggregate.size(); ++k) {
        ids[static_cast<std::size_t>(k)] =
            static_cast<int>(aggregate[k] % static_cast<std::uint64_t>(n)) + 1;
    }
    return ids;
}

void append_winners(std::vector<PartyId>& members, const std::vector<int>& ids,
                    int room) {
    std::map<int, int> tally;
    for (int id : ids) tally[id] += 1;
    std::vector<std::pair<int, int>> ranked(tally.begin(), tally.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;  // ties toward the lower party id
    });
    for (const auto& [id, votes] : ranked) {
        if (room == 0) break;
        const PartyId candidate{id};
        if (std::find(members.begin(), members.end(), candidate) != members.end()) {
            continue;  // already elected
        }
        members.push_back(candidate);
        --room;
    }
}

Committee elect_committee(ProtocolContext& ctx, const ElectionConfig& cfg) {
    const int n = ctx.net.party_count();
    if (cfg.m < 1 || cfg.m > n) {
        throw ConfigError("committee size m = " + std::to_string(cfg.m) +
                          " must lie in [1, " + std::to_string(n) + "]");
    }
    if (cfg.b < 1) throw ConfigError("election batch size must be >= 1");
    if (cfg.max_rounds < 1) throw ConfigError("max_rounds must be >= 1");

    Committee committee;
    for (int round = 0; round < cfg.max_rounds; ++round) {
        if (committee.size() == cfg.m) break;
        std::vector<FieldVec> votes(static_cast<std::size_t>(n));
        for (int i = 1; i <= n; ++i) {
            RngStream rng(ctx.master_seed, static_cast<std::uint64_t>(i), rng_tag::kVote,
                          static_cast<std::uint64_t>(round));
            FieldVec v(cfg.b);
            for (int w = 0; w < cfg.b; ++w) {
                v[w] = 1 + rng.below(static_cast<std::uint64_t>(n));
            }
            votes[static_cast<std::size_t>(i - 1)] = std::move(v);
        }
        const auto aggregate = p2p_secure_sum(ctx, votes, Phase::Election, round);
        const auto ids = vote_ids_from_aggregate(aggregate[0], n);
        append_winners(committee.members, ids, cfg.m - committee.size());
    }
    if (committee.size() < cfg.m) {
        throw ElectionStalled("election did not fill the committee within " +
                              std::to_string(cfg.max_rounds) + " rounds");
    }
    return committee;
}

Eigen::VectorXd two_phase_aggregate(ProtocolContext& ctx,
                                    const std::vector<Eigen::VectorXd>& local_models,
                                    const Committee& committee, int epoch) {
    check_same_shape(local_models);
    const auto& models = local_models;
    const int n = static_cast<int>(models.size());
    const int m = committee.size();
    if (m < 1) throw BadCommittee("empty committee");
    {
        std::vector<PartyId> sorted = committee.members;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw BadCommittee("committee members must be distinct");
        }
        if (sorted.front().v < 1 || sorted.back().v > n) {
            throw BadCommittee("committee member outside [1, n]");
        }
    }
    const SharingScheme scheme = ctx.scheme.kind == SchemeKind::Additive
                                     ? SharingScheme::additive(m)
                                     : SharingScheme::shamir(m, m - 1);

    // Uploads: share w of party i goes to the w-th committee member. The
    // count is flat n*m, so a member's share for itself still crosses the
    // accounting path as a message.
    for (int i = 1; i <= n; ++i) {
        auto rng = share_stream(ctx, PartyId{i}, Phase::CommitteeUpload, epoch);
        FieldVec enc = encode_tensor(models[static_cast<std::size_t>(i - 1)], ctx.field);
        auto shares = make_shares(enc, scheme, rng, ctx.field, i);
        for (int w = 1; w <= m; ++w) {
            ctx.net.send(Envelope{PartyId{i}, committee.members[static_cast<std::size_t>(w - 1)],
                                  Phase::CommitteeUpload, epoch,
                                  shares[static_cast<std::size_t>(w - 1)].values},
                         SelfDelivery::Allow);
        }
    }
    ctx.net.run_round();

    // Members aggregate their slot locally, then exchange partial sums.
    std::vector<FieldVec> partial(static_cast<std::size_t>(m));
    for (int w = 1; w <= m; ++w) {
        const PartyId self = committee.members[static_cast<std::size_t>(w - 1)];
        FieldVec acc = FieldVec::Zero(models.front().size());
        for (int i = 1; i <= n; ++i) {
            const Envelope env =
                ctx.net.fetch(self, PartyId{i}, Phase::CommitteeUpload, epoch);
            acc = field_vec_add(acc, env.payload, ctx.field);
        }
        partial[static_cast<std::size_t>(w - 1)] = std::move(acc);
    }
    for (int w = 1; w <= m; ++w) {
        for (int v = 1; v <= m; ++v) {
            if (v == w) continue;
            ctx.net.send(Envelope{committee.members[static_cast<std::size_t>(w - 1)],
                                  committee.members[static_cast<std::size_t>(v - 1)],
                                  Phase::CommitteeExchange, epoch,
                                  partial[static_cast<std::size_t>(w - 1)]});
        }
    }
    ctx.net.run_round();

    FieldVec global;
    for (int w = 1; w <= m; ++w) {
        const PartyId self = committee.members[static_cast<std::size_t>(w - 1)];
        std::vector<ShareVector> slots(static_cast<std::size_t>(m));
        slots[static_cast<std::size_t>(w - 1)] =
            ShareVector{w, w, partial[static_cast<std::size_t>(w - 1)]};
        for (int v = 1; v <= m; ++v) {
            if (v == w) continue;
            const Envelope env =
                ctx.net.fetch(self, committee.members[static_cast<std::size_t>(v - 1)],
                              Phase::CommitteeExchange, epoch);
            slots[static_cast<std::size_t>(v - 1)] = ShareVector{v, v, env.payload};
        }
        FieldVec combined = reconstruct(slots, scheme, ctx.field);
        if (w == 1) {
            global = std::move(combined);
        } else if (combined != global) {
            throw ProtocolError("committee members disagree on the aggregate");
        }
    }

    // Member w serves every party i with i mod m = w-1; n messages total.
    for (int w = 1; w <= m; ++w) {
        const PartyId self = committee.members[static_cast<std::size_t>(w - 1)];
        for (int i = 1; i <= n; ++i) {
            if (i % m == w - 1) {
                ctx.net.send(Envelope{self, PartyId{i}, Phase::Broadcast, epoch, global},
                             SelfDelivery::Allow);
            }
        }
    }
    ctx.net.run_round();

    Eigen::VectorXd result;
    for (int i = 1; i <= n; ++i) {
        const int w = (i % m) + 1;
        const Envelope env =
            ctx.net.fetch(PartyId{i}, committee.members[static_cast<std::size_t>(w - 1)],
                          Phase::Broadcast, epoch);
        Eigen::VectorXd decoded =
            decode_tensor(env.payload, ctx.field, static_cast<std::uint64_t>(n));
        if (i == 1) {
            result = std::move(decoded);
        } else if (decoded != result) {
            throw ProtocolError("parties disagree on the aggregated model");
        }
    }
    return result;
}

Eigen::VectorXd plaintext_aggregate(ProtocolContext& ctx,
                                    const std::vector<Eigen::VectorXd>& local_models,
                                    int epoch) {
    check_same_shape(local_models);
    const auto& models = local_models;
    const int n = static_cast<int>(models.size());
    if (n < 2) throw BadCount("plaintext_aggregate needs at least 2 parties");
    const Eigen::Index s = models.front().size();

    const auto to_words = [s](const Eigen::VectorXd& m) {
        FieldVec words(s);
        std::memcpy(words.data(), m.data(), static_cast<std::size_t>(s) * 8);
        return words;
    };
    for (int i = 1; i <= n; ++i) {
        const FieldVec words = to_words(models[static_cast<std::size_t>(i - 1)]);
        for (int j = 1; j <= n; ++j) {
            if (j == i) continue;
            ctx.net.send(Envelope{PartyId{i}, PartyId{j}, Phase::P2pAggregation, epoch,
                                  words});
        }
    }
    ctx.net.run_round();

    // Every party sums in canonical party order, so results agree bitwise.
    Eigen::VectorXd result;
    for (int i = 1; i <= n; ++i) {
        Eigen::VectorXd sum = Eigen::VectorXd::Zero(s);
        for (int j = 1; j <= n; ++j) {
            if (j == i) {
                sum += models[static_cast<std::size_t>(j - 1)];
            } else {
                const Envelope env =
                    ctx.net.fetch(PartyId{i}, PartyId{j}, Phase::P2pAggregation, epoch);
                Eigen::VectorXd m(s);
                std::memcpy(m.data(), env.payload.data(), static_cast<std::size_t>(s) * 8);
                sum += m;
            }
        }
        Eigen::VectorXd avg = sum / static_cast<double>(n);
        if (i == 1) {
            result = std::move(avg);
        } else if (avg != result) {
            throw ProtocolError("parties disagree on the plaintext average");
        }
    }
    return result;
}

Eigen::VectorXd federated_round(ProtocolContext& ctx, std::vector<FlParty>& parties,
                                Topology topology, const Committee* committee,
                                int t_iters, double lr, int epoch) {
    for (auto& party : parties) {
        party.model = local_train(std::move(party.model), party.data, t_iters, lr);
    }
    Eigen::VectorXd global;
    if (parties.size() == 1) {
        global = parties.front().model.weights;  // nothing to aggregate
    } else {
        std::vector<Eigen::VectorXd> models;
        models.reserve(parties.size());
        for (const auto& party : parties) models.push_back(party.model.weights);
        switch (topology) {
            case Topology::P2p:
                global = p2p_model_aggregate(ctx, models, epoch);
                break;
            case Topology::TwoPhase:
                if (committee == nullptr) {
                    throw BadCommittee("two-phase aggregation needs a committee");
                }
                global = two_phase_aggregate(ctx, models, *committee, epoch);
                break;
            case Topology::Plaintext:
                global = plaintext_aggregate(ctx, models, epoch);
                break;
        }
    }
    for (auto& party : parties) {
        party.model.weights = global;
        party.model.epoch = epoch + 1;
    }
    return global;
}

}  // namespace mpcfl
