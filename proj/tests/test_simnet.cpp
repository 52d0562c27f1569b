#include "doctest.h"
#include "mpcfl/simnet.hpp"

#include <string>

using namespace mpcfl;

namespace {

Envelope env(int from, int to, Phase phase, int epoch, Eigen::Index len) {
    return Envelope{PartyId{from}, PartyId{to}, phase, epoch, FieldVec::Zero(len)};
}

}  // namespace

TEST_CASE("send counts messages and payload sizes per phase") {
    SimNetwork net(4);
    net.send(env(1, 2, Phase::P2pAggregation, 0, 242));
    auto stats = net.stats_snapshot();
    CHECK(stats.num(Phase::P2pAggregation) == 1);
    CHECK(stats.size(Phase::P2pAggregation) == 242);

    net.send(env(2, 1, Phase::P2pAggregation, 0, 242));
    stats = net.stats_snapshot();
    CHECK(stats.num(Phase::P2pAggregation) == 2);
    CHECK(stats.total_msg_size() == 484);
}

TEST_CASE("self sends are rejected on the peer-to-peer path") {
    SimNetwork net(3);
    CHECK_THROWS_AS(net.send(env(2, 2, Phase::P2pAggregation, 0, 1)), SelfSend);
    // committee upload and broadcast are service-style and may self-deliver
    CHECK_NOTHROW(net.send(env(2, 2, Phase::CommitteeUpload, 0, 1), SelfDelivery::Allow));
    CHECK(net.stats_snapshot().num(Phase::CommitteeUpload) == 1);
}

TEST_CASE("unknown parties are rejected") {
    SimNetwork net(3);
    CHECK_THROWS_AS(net.send(env(0, 1, Phase::Election, 0, 1)), UnknownParty);
    CHECK_THROWS_AS(net.send(env(1, 4, Phase::Election, 0, 1)), UnknownParty);
}

TEST_CASE("run_round delivers everything in canonical order") {
    SimNetwork net(3);
    // enqueue out of order on purpose
    net.send(env(3, 1, Phase::P2pAggregation, 0, 1));
    net.send(env(1, 3, Phase::P2pAggregation, 0, 1));
    net.send(env(2, 1, Phase::P2pAggregation, 0, 1));
    net.send(env(1, 2, Phase::P2pAggregation, 0, 1));
    net.send(env(3, 2, Phase::P2pAggregation, 0, 1));
    net.send(env(2, 3, Phase::P2pAggregation, 0, 1));
    net.run_round();
    const auto& log = net.delivery_log();
    REQUIRE(log.size() == 6);
    CHECK(net.delivered_count() == 6);
    CHECK(net.sent_count() == 6);
    int expect_from[] = {1, 1, 2, 2, 3, 3};
    int expect_to[] = {2, 3, 1, 3, 1, 2};
    for (int i = 0; i < 6; ++i) {
        CHECK(log[static_cast<std::size_t>(i)].from.v == expect_from[i]);
        CHECK(log[static_cast<std::size_t>(i)].to.v == expect_to[i]);
    }
}

TEST_CASE("empty round is a no-op") {
    SimNetwork net(2);
    net.run_round();
    CHECK(net.delivery_log().empty());
    CHECK(net.stats_snapshot().total_msg_num() == 0);
}

TEST_CASE("fetch returns the matching envelope and raises Deadlock otherwise") {
    SimNetwork net(2);
    Envelope e = env(1, 2, Phase::Election, 3, 5);
    e.payload[2] = 42;
    net.send(e);
    net.run_round();
    const Envelope got = net.fetch(PartyId{2}, PartyId{1}, Phase::Election, 3);
    CHECK(got.payload[2] == 42);
    CHECK(net.unconsumed_count() == 0);
    try {
        net.fetch(PartyId{2}, PartyId{1}, Phase::Election, 3);
        FAIL("expected Deadlock");
    } catch (const Deadlock& dl) {
        CHECK(std::string(dl.what()).find("party 2") != std::string::npos);
    }
}

TEST_CASE("stats snapshot copies without resetting") {
    SimNetwork net(2);
    net.send(env(1, 2, Phase::Broadcast, 0, 7), SelfDelivery::Allow);
    const auto a = net.stats_snapshot();
    const auto b = net.stats_snapshot();
    CHECK(a == b);
    CHECK(a.num(Phase::Broadcast) == 1);
    SimNetwork fresh(2);
    CHECK(fresh.stats_snapshot().total_msg_num() == 0);
    CHECK(fresh.stats_snapshot().total_msg_size() == 0);
}

TEST_CASE("delivery log lines are tab separated") {
    SimNetwork net(2);
    net.send(env(1, 2, Phase::CommitteeExchange, 4, 9));
    net.run_round();
    CHECK(net.delivery_log_text() == "4\tcommittee_exchange\t1\t2\t9\n");
}

TEST_CASE("identical send histories give identical logs") {
    auto drive = []() {
        SimNetwork net(3);
        for (int e = 0; e < 2; ++e) {
            for (int i = 1; i <= 3; ++i) {
                for (int j = 1; j <= 3; ++j) {
                    if (i != j) net.send(env(i, j, Phase::P2pAggregation, e, 11));
                }
            }
            net.run_round();
        }
        return net.delivery_log_text();
    };
    CHECK(drive() == drive());
}
