#include "doctest.h"
#include "mpcfl/protocols.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace mpcfl;

namespace {

const FieldParams kSmall(97, 0, 1, 16);
const FieldParams kBig = FieldParams::default61();

SharingScheme scheme_for(SchemeKind kind, int n) {
    return kind == SchemeKind::Additive ? SharingScheme::additive(n)
                                        : SharingScheme::shamir(n, n - 1);
}

std::vector<FieldVec> singles(std::initializer_list<std::uint64_t> values) {
    std::vector<FieldVec> out;
    for (std::uint64_t v : values) {
        FieldVec x(1);
        x[0] = v;
        out.push_back(std::move(x));
    }
    return out;
}

}  // namespace

TEST_CASE("secure sum: every party holds the plain sum") {
    SimNetwork net(3);
    ProtocolContext ctx{net, kSmall, SharingScheme::additive(3), 7};
    const auto results = p2p_secure_sum(ctx, singles({10, 20, 30}), Phase::P2pAggregation, 0);
    REQUIRE(results.size() == 3);
    for (const auto& r : results) CHECK(r[0] == 60);
    // two all-to-all rounds: 2 * 3 * 2 envelopes of one element
    const auto stats = net.stats_snapshot();
    CHECK(stats.num(Phase::P2pAggregation) == 12);
    CHECK(stats.size(Phase::P2pAggregation) == 12);
    CHECK(net.unconsumed_count() == 0);
}

TEST_CASE("secure sum wraps at the modulus") {
    SimNetwork net(2);
    ProtocolContext ctx{net, kSmall, SharingScheme::additive(2), 7};
    const auto results = p2p_secure_sum(ctx, singles({96, 5}), Phase::P2pAggregation, 0);
    CHECK(results[0][0] == 4);
}

TEST_CASE("secure sum: additive and shamir agree exactly in the field") {
    RngStream rng(31, 0, 60);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(7));
        std::vector<FieldVec> values;
        for (int i = 0; i < n; ++i) values.push_back(field_vec_uniform(5, rng, kBig));

        SimNetwork net_a(n);
        ProtocolContext ctx_a{net_a, kBig, SharingScheme::additive(n), 900 + static_cast<std::uint64_t>(trial)};
        const auto sum_a = p2p_secure_sum(ctx_a, values, Phase::P2pAggregation, 0);

        SimNetwork net_s(n);
        ProtocolContext ctx_s{net_s, kBig, SharingScheme::shamir(n, n - 1), 900 + static_cast<std::uint64_t>(trial)};
        const auto sum_s = p2p_secure_sum(ctx_s, values, Phase::P2pAggregation, 0);

        CHECK(sum_a[0] == sum_s[0]);
        CHECK(net_a.stats_snapshot() == net_s.stats_snapshot());
    }
}

TEST_CASE("secure sum rejects ragged inputs and single parties") {
    SimNetwork net(2);
    ProtocolContext ctx{net, kSmall, SharingScheme::additive(2), 7};
    auto ragged = singles({1, 2});
    ragged[1] = FieldVec::Zero(3);
    CHECK_THROWS_AS(p2p_secure_sum(ctx, ragged, Phase::P2pAggregation, 0), LengthMismatch);
    CHECK_THROWS_AS(p2p_secure_sum(ctx, singles({1}), Phase::P2pAggregation, 0), BadCount);
}

TEST_CASE("model aggregation: exact average on the codec grid") {
    std::vector<Eigen::VectorXd> models;
    for (double w : {1.0, 2.0, 3.0}) models.push_back(Eigen::VectorXd::Constant(1, w));
    SimNetwork net(3);
    ProtocolContext ctx{net, kBig, SharingScheme::additive(3), 3};
    const Eigen::VectorXd avg = p2p_model_aggregate(ctx, models, 1);
    CHECK(std::abs(avg[0] - 2.0) <= 1e-4);
    const auto stats = net.stats_snapshot();
    CHECK(stats.num(Phase::P2pAggregation) == 12);  // 2 n (n-1)
    CHECK(stats.size(Phase::P2pAggregation) == 12);
}

TEST_CASE("model aggregation: identical models are a fixed point on the grid") {
    const FieldParams& p = kBig;
    Eigen::VectorXd snapped(3);
    snapped << 0.5, -1.25, 3.0;  // exactly representable
    std::vector<Eigen::VectorXd> models(4, snapped);
    SimNetwork net(4);
    ProtocolContext ctx{net, p, SharingScheme::additive(4), 4};
    CHECK(p2p_model_aggregate(ctx, models, 1) == snapped);
}

TEST_CASE("model aggregation matches the plaintext mean oracle") {
    RngStream rng(17, 0, 61);
    std::vector<Eigen::VectorXd> models;
    for (int i = 0; i < 4; ++i) {
        Eigen::VectorXd m(242);
        for (int k = 0; k < 242; ++k) m[k] = 4.0 * rng.uniform01() - 2.0;
        models.push_back(std::move(m));
    }
    SimNetwork net(4);
    ProtocolContext ctx{net, kBig, SharingScheme::additive(4), 5};
    const Eigen::VectorXd got = p2p_model_aggregate(ctx, models, 1);
    const Eigen::VectorXd expect = oracles::plaintext_mean(models);
    CHECK((got - expect).cwiseAbs().maxCoeff() <= 4.0 * std::ldexp(1.0, -16));
    CHECK(net.stats_snapshot().num(Phase::P2pAggregation) == 24);
    CHECK(net.stats_snapshot().size(Phase::P2pAggregation) == 24 * 242);
}

TEST_CASE("vote mapping and tallying: documented election example") {
    FieldVec aggregate(3);
    aggregate << 4, 5, 4;
    const auto ids = vote_ids_from_aggregate(aggregate, 3);
    CHECK(ids == std::vector<int>{2, 3, 2});
    std::vector<PartyId> members;
    append_winners(members, ids, 2);
    REQUIRE(members.size() == 2);
    CHECK(members[0].v == 2);
    CHECK(members[1].v == 3);
}

TEST_CASE("tally ties break toward the lower id and skip elected members") {
    std::vector<PartyId> members{PartyId{4}};
    append_winners(members, {4, 4, 2, 2, 9, 9, 1}, 2);
    REQUIRE(members.size() == 3);
    CHECK(members[1].v == 2);  // 4 already elected; 2 beats 9 on the tie
    CHECK(members[2].v == 9);
}

TEST_CASE("election: full committee of distinct members, identical everywhere") {
    const int n = 16;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        SimNetwork net(n);
        ProtocolContext ctx{net, kBig, SharingScheme::additive(n), seed};
        const Committee c = elect_committee(ctx, ElectionConfig{3, 10, 16});
        REQUIRE(c.size() == 3);
        std::vector<int> ids;
        for (PartyId p : c.members) {
            CHECK(p.v >= 1);
            CHECK(p.v <= n);
            ids.push_back(p.v);
        }
        std::sort(ids.begin(), ids.end());
        CHECK(std::adjacent_find(ids.begin(), ids.end()) == ids.end());
    }
}

TEST_CASE("election: m = n eventually elects everybody") {
    const int n = 4;
    SimNetwork net(n);
    ProtocolContext ctx{net, kBig, SharingScheme::additive(n), 77};
    const Committee c = elect_committee(ctx, ElectionConfig{n, 10, 64});
    REQUIRE(c.size() == n);
    std::vector<int> ids;
    for (PartyId p : c.members) ids.push_back(p.v);
    std::sort(ids.begin(), ids.end());
    CHECK(ids == std::vector<int>{1, 2, 3, 4});
}

TEST_CASE("election: a hopeless configuration stalls") {
    const int n = 4;
    SimNetwork net(n);
    ProtocolContext ctx{net, kBig, SharingScheme::additive(n), 77};
    // b = 1 yields one candidate per round; max_rounds = 2 cannot seat 4
    CHECK_THROWS_AS(elect_committee(ctx, ElectionConfig{4, 1, 2}), ElectionStalled);
}

TEST_CASE("two-phase aggregation: exact average and per-phase counts") {
    std::vector<Eigen::VectorXd> models;
    for (double w : {1.0, 2.0, 3.0, 4.0}) models.push_back(Eigen::VectorXd::Constant(1, w));
    SimNetwork net(4);
    ProtocolContext ctx{net, kBig, SharingScheme::additive(4), 11};
    const Committee committee{{PartyId{2}, PartyId{3}, PartyId{4}}};
    const Eigen::VectorXd avg = two_phase_aggregate(ctx, models, committee, 1);
    CHECK(avg[0] == doctest::Approx(2.5).epsilon(1e-9));
    const auto stats = net.stats_snapshot();
    CHECK(stats.num(Phase::CommitteeUpload) == 12);    // n m
    CHECK(stats.num(Phase::CommitteeExchange) == 6);   // m (m-1)
    CHECK(stats.num(Phase::Broadcast) == 4);           // n
    CHECK(stats.size(Phase::CommitteeUpload) == 12);
}

TEST_CASE("two-phase upload volume: 48 envelopes of model size per epoch") {
    const int n = 16;
    RngStream rng(19, 0, 62);
    std::vector<Eigen::VectorXd> models;
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd m(242);
        for (int k = 0; k < 242; ++k) m[k] = rng.uniform01();
        models.push_back(std::move(m));
    }
    SimNetwork net(n);
    ProtocolContext ctx{net, kBig, SharingScheme::additive(n), 13};
    const Committee committee{{PartyId{5}, PartyId{1}, PartyId{9}}};
    (void)two_phase_aggregate(ctx, models, committee, 1);
    const auto stats = net.stats_snapshot();
    CHECK(stats.num(Phase::CommitteeUpload) == 48);
    CHECK(stats.size(Phase::CommitteeUpload) == 48 * 242);
    CHECK(stats.num(Phase::Broadcast) == 16);
    CHECK(stats.size(Phase::Broadcast) == 16 * 242);
}

TEST_CASE("two-phase equals peer-to-peer on the same inputs") {
    RngStream rng(23, 0, 63);
    for (auto kind : {SchemeKind::Additive, SchemeKind::Shamir}) {
        std::vector<Eigen::VectorXd> models;
        for (int i = 0; i < 5; ++i) {
            Eigen::VectorXd m(17);
            for (int k = 0; k < 17; ++k) m[k] = 2.0 * rng.uniform01() - 1.0;
            models.push_back(std::move(m));
        }
        SimNetwork net_a(5);
        ProtocolContext ctx_a{net_a, kBig, scheme_for(kind, 5), 21};
        const Eigen::VectorXd p2p = p2p_model_aggregate(ctx_a, models, 1);

        SimNetwork net_b(5);
        ProtocolContext ctx_b{net_b, kBig, scheme_for(kind, 5), 21};
        const Committee committee{{PartyId{1}, PartyId{4}}};
        const Eigen::VectorXd two_phase = two_phase_aggregate(ctx_b, models, committee, 1);
        CHECK((p2p - two_phase).cwiseAbs().maxCoeff() <= std::ldexp(1.0, -15));
    }
}

TEST_CASE("two-phase validates the committee") {
    std::vector<Eigen::VectorXd> models(3, Eigen::VectorXd::Zero(2));
    SimNetwork net(3);
    ProtocolContext ctx{net, kBig, SharingScheme::additive(3), 1};
    CHECK_THROWS_AS(two_phase_aggregate(ctx, models, Committee{}, 1), BadCommittee);
    const Committee dup{{PartyId{2}, PartyId{2}}};
    CHECK_THROWS_AS(two_phase_aggregate(ctx, models, dup, 1), BadCommittee);
    const Committee outside{{PartyId{2}, PartyId{7}}};
    CHECK_THROWS_AS(two_phase_aggregate(ctx, models, outside, 1), BadCommittee);
}

TEST_CASE("plaintext baseline: one exchange round, exact mean") {
    std::vector<Eigen::VectorXd> models;
    for (double w : {1.0, 2.0, 4.0}) models.push_back(Eigen::VectorXd::Constant(2, w));
    SimNetwork net(3);
    ProtocolContext ctx{net, kBig, SharingScheme::additive(3), 1};
    const Eigen::VectorXd avg = plaintext_aggregate(ctx, models, 1);
    CHECK(avg[0] == doctest::Approx(7.0 / 3.0).epsilon(1e-15));
    CHECK(net.stats_snapshot().num(Phase::P2pAggregation) == 6);
    CHECK(net.stats_snapshot().size(Phase::P2pAggregation) == 12);
}

TEST_CASE("federated round: aggregation alone snaps identical models once") {
    const FieldParams& p = kBig;
    ModelTensor base = init_model(ModelSpec::simple(), 3);
    // quantize onto the codec grid so averaging is exact
    for (Eigen::Index i = 0; i < base.weights.size(); ++i) {
        base.weights[i] = p.decode(p.encode(base.weights[i]));
    }
    std::vector<FlParty> parties;
    for (int i = 1; i <= 3; ++i) parties.push_back(FlParty{PartyId{i}, base, {}});
    SimNetwork net(3);
    ProtocolContext ctx{net, p, SharingScheme::additive(3), 9};
    const Eigen::VectorXd global =
        federated_round(ctx, parties, Topology::P2p, nullptr, 0, 0.05, 1);
    CHECK(global == base.weights);
    for (const auto& party : parties) {
        CHECK(party.model.weights == global);
        CHECK(party.model.epoch == 2);
    }
}

TEST_CASE("federated round: counters scale linearly with epochs") {
    std::vector<FlParty> parties;
    for (int i = 1; i <= 4; ++i) {
        parties.push_back(FlParty{PartyId{i}, init_model(ModelSpec::simple(), static_cast<std::uint64_t>(i)), {}});
    }
    SimNetwork net(4);
    ProtocolContext ctx{net, kBig, SharingScheme::additive(4), 2};
    for (int epoch = 1; epoch <= 15; ++epoch) {
        federated_round(ctx, parties, Topology::P2p, nullptr, 0, 0.05, epoch);
    }
    const auto stats = net.stats_snapshot();
    CHECK(stats.num(Phase::P2pAggregation) == 15 * 24);
    CHECK(stats.size(Phase::P2pAggregation) == 15ull * 24 * 242);
}

TEST_CASE("single party: federated round degenerates to local training") {
    SyntheticConfig gen;
    gen.parties = 1;
    gen.rows_per_party = 30;
    gen.seed = 41;
    const Dataset data = gen_synthetic(gen).party_data[0];
    std::vector<FlParty> parties{
        FlParty{PartyId{1}, init_model(ModelSpec::simple(), 41), data}};
    SimNetwork net(1);
    ProtocolContext ctx{net, kBig, SharingScheme::additive(1), 41};
    const Eigen::VectorXd global =
        federated_round(ctx, parties, Topology::P2p, nullptr, 3, 0.05, 1);
    const ModelTensor alone = local_train(init_model(ModelSpec::simple(), 41), data, 3, 0.05);
    CHECK(global == alone.weights);
    CHECK(net.stats_snapshot().total_msg_num() == 0);
}

TEST_CASE("cross-topology trajectories stay within fixed-point tolerance") {
    // aggregation-only: per-epoch drift is bounded by quantization alone
    auto run = [&](Topology topo) {
        std::vector<FlParty> parties;
        for (int i = 1; i <= 4; ++i) {
            parties.push_back(FlParty{PartyId{i}, init_model(ModelSpec::simple(), static_cast<std::uint64_t>(100 + i)), {}});
        }
        SimNetwork net(4);
        ProtocolContext ctx{net, kBig, SharingScheme::additive(4), 55};
        const Committee committee{{PartyId{1}, PartyId{2}, PartyId{3}}};
        std::vector<Eigen::VectorXd> trajectory;
        for (int epoch = 1; epoch <= 5; ++epoch) {
            trajectory.push_back(federated_round(
                ctx, parties, topo, topo == Topology::TwoPhase ? &committee : nullptr, 0,
                0.05, epoch));
        }
        return trajectory;
    };
    const auto p2p = run(Topology::P2p);
    const auto two_phase = run(Topology::TwoPhase);
    for (std::size_t e = 0; e < p2p.size(); ++e) {
        CHECK((p2p[e] - two_phase[e]).cwiseAbs().maxCoeff() <= 8.0 * std::ldexp(1.0, -16));
    }

    // with local training the trajectories track each other closely
    SyntheticConfig gen;
    gen.parties = 4;
    gen.rows_per_party = 60;
    gen.seed = 71;
    const SyntheticData data = gen_synthetic(gen);
    auto run_trained = [&](Topology topo) {
        std::vector<FlParty> parties;
        for (int i = 1; i <= 4; ++i) {
            parties.push_back(FlParty{PartyId{i}, init_model(ModelSpec::simple(), 71),
                                      data.party_data[static_cast<std::size_t>(i - 1)]});
        }
        SimNetwork net(4);
        ProtocolContext ctx{net, kBig, SharingScheme::additive(4), 72};
        const Committee committee{{PartyId{2}, PartyId{4}, PartyId{1}}};
        Eigen::VectorXd global;
        for (int epoch = 1; epoch <= 15; ++epoch) {
            global = federated_round(ctx, parties, topo,
                                     topo == Topology::TwoPhase ? &committee : nullptr, 3,
                                     0.05, epoch);
        }
        return global;
    };
    const Eigen::VectorXd final_p2p = run_trained(Topology::P2p);
    const Eigen::VectorXd final_two_phase = run_trained(Topology::TwoPhase);
    CHECK((final_p2p - final_two_phase).cwiseAbs().maxCoeff() <= 0.02);
}

TEST_CASE("federated training with identical data tracks centralized training") {
    SyntheticConfig gen;
    gen.parties = 1;
    gen.rows_per_party = 80;
    gen.seed = 81;
    const Dataset shared_data = gen_synthetic(gen).party_data[0];
    const int t = 3, e = 15;
    std::vector<FlParty> parties;
    for (int i = 1; i <= 3; ++i) {
        parties.push_back(FlParty{PartyId{i}, init_model(ModelSpec::simple(), 81), shared_data});
    }
    SimNetwork net(3);
    ProtocolContext ctx{net, kBig, SharingScheme::additive(3), 82};
    Eigen::VectorXd global;
    for (int epoch = 1; epoch <= e; ++epoch) {
        global = federated_round(ctx, parties, Topology::P2p, nullptr, t, 0.05, epoch);
    }
    const ModelTensor centralized =
        local_train(init_model(ModelSpec::simple(), 81), shared_data, t * e, 0.05);
    CHECK((global - centralized.weights).cwiseAbs().maxCoeff() <= 5e-3);
}

TEST_CASE("privacy trace: a sender's envelopes hide its secret") {
    // Same seed, two different secrets at party 2. Among everything party 2
    // puts on the wire, only the round-1 envelope carrying the final slot
    // share (to party n) may differ.
    const int n = 4;
    const int sender = 2;
    auto run = [&](std::uint64_t secret_val) {
        SimNetwork net(n);
        net.enable_payload_trace();
        ProtocolContext ctx{net, kBig, SharingScheme::additive(n), 303};
        std::vector<FieldVec> values;
        for (int i = 1; i <= n; ++i) {
            FieldVec v(3);
            v << 10 * i, 20 * i, 30 * i;
            if (i == sender) v[0] = secret_val;
            values.push_back(std::move(v));
        }
        (void)p2p_secure_sum(ctx, values, Phase::P2pAggregation, 0);
        return net.payload_trace();
    };
    const auto trace_a = run(111);
    const auto trace_b = run(999777);
    REQUIRE(trace_a.size() == trace_b.size());
    int diffs_from_sender = 0;
    for (std::size_t k = 0; k < trace_a.size(); ++k) {
        CHECK(trace_a[k].from == trace_b[k].from);
        CHECK(trace_a[k].to == trace_b[k].to);
        if (trace_a[k].payload != trace_b[k].payload) {
            if (trace_a[k].from.v == sender) {
                ++diffs_from_sender;
                CHECK(trace_a[k].to.v == n);  // the dependent share goes to slot n
            }
        }
    }
    CHECK(diffs_from_sender == 1);
}
