#include "mpcfl/simnet.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <sstream>
#include <tuple>

namespace mpcfl {

const char* phase_name(Phase p) {
    switch (p) {
        case Phase::P2pAggregation: return "p2p_aggregation";
        case Phase::Election: return "election";
        case Phase::CommitteeUpload: return "committee_upload";
        case Phase::CommitteeExchange: return "committee_exchange";
        case Phase::Broadcast: return "broadcast";
    }
    return "unknown";
}

std::uint64_t NetworkStats::total_msg_num() const {
    return std::accumulate(msg_num.begin(), msg_num.end(), std::uint64_t{0});
}

std::uint64_t NetworkStats::total_msg_size() const {
    return std::accumulate(msg_size.begin(), msg_size.end(), std::uint64_t{0});
}

SimNetwork::SimNetwork(int n_parties) : n_(n_parties) {
    if (n_ < 1) throw ConfigError("SimNetwork needs at least one party");
    inboxes_.resize(static_cast<std::size_t>(n_));
}

void SimNetwork::check_party(PartyId id, const char* role) const {
    if (id.v < 1 || id.v > n_) {
        throw UnknownParty(std::string(role) + " party " + std::to_string(id.v) +
                           " not in [1, " + std::to_string(n_) + "]");
    }
}

void SimNetwork::send(Envelope env, SelfDelivery self) {
    check_party(env.from, "sender");
    check_party(env.to, "recipient");
    if (env.from == env.to && self == SelfDelivery::Forbid) {
        throw SelfSend("party " + std::to_string(env.from.v) +
                       " keeps its own share locally; that is not a message");
    }
    const int phase = static_cast<int>(env.phase);
    stats_.msg_num[phase] += 1;
    stats_.msg_size[phase] += static_cast<std::uint64_t>(env.payload.size());
    ++sent_;
    if (trace_payloads_) payload_trace_.push_back(env);
    queue_.push_back(Queued{std::move(env), seq_++});
}

void SimNetwork::run_round() {
    std::sort(queue_.begin(), queue_.end(), [](const Queued& a, const Queued& b) {
        return std::tuple(a.env.epoch, static_cast<int>(a.env.phase), a.env.from.v,
                          a.env.to.v, a.seq) <
               std::tuple(b.env.epoch, static_cast<int>(b.env.phase), b.env.from.v,
                          b.env.to.v, b.seq);
    });
    for (auto& q : queue_) {
        log_.push_back(DeliveryRecord{q.env.epoch, q.env.phase, q.env.from, q.env.to,
                                      q.env.payload.size()});
        ++delivered_;
        inboxes_[static_cast<std::size_t>(q.env.to.v - 1)].push_back(std::move(q.env));
    }
    queue_.clear();
}

Envelope SimNetwork::fetch(PartyId to, PartyId from, Phase phase, int epoch) {
    check_party(to, "recipient");
    auto& inbox = inboxes_[static_cast<std::size_t>(to.v - 1)];
    auto it = std::find_if(inbox.begin(), inbox.end(), [&](const Envelope& e) {
        return e.from == from && e.phase == phase && e.epoch == epoch;
    });
    if (it == inbox.end()) {
        throw Deadlock("party " + std::to_string(to.v) + " is waiting for a " +
                       phase_name(phase) + " envelope from party " +
                       std::to_string(from.v) + " (epoch " + std::to_string(epoch) +
                       ") that was never sent");
    }
    Envelope env = std::move(*it);
    inbox.erase(it);
    return env;
}

std::uint64_t SimNetwork::unconsumed_count() const {
    std::uint64_t n = 0;
    for (const auto& box : inboxes_) n += box.size();
    return n;
}

void SimNetwork::write_delivery_log(std::ostream& os) const {
    for (const auto& r : log_) {
        os << r.epoch << '\t' << phase_name(r.phase) << '\t' << r.from.v << '\t'
           << r.to.v << '\t' << r.payload_len << '\n';
    }
}

std::string SimNetwork::delivery_log_text() const {
    std::ostringstream os;
    write_delivery_log(os);
    return os.str();
}

}  // namespace mpcfl
