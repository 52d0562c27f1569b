#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mpcfl/field.hpp"

namespace mpcfl {

/// 1-based party index, unique within one simulation.
struct PartyId {
    std::int32_t v = 0;
    auto operator<=>(const PartyId&) const = default;
};

enum class Phase : int {
    P2pAggregation = 0,
    Election = 1,
    CommitteeUpload = 2,
    CommitteeExchange = 3,
    Broadcast = 4,
};
inline constexpr int kPhaseCount = 5;

const char* phase_name(Phase p);

/// One message on the simulated wire. The payload is a run of 64-bit words:
/// field elements for the MPC phases, raw IEEE bits for the plaintext
/// baseline. Message size is always counted in those words.
struct Envelope {
    PartyId from;
    PartyId to;
    Phase phase = Phase::P2pAggregation;
    int epoch = 0;
    FieldVec payload;
};

/// Exact message and size counters, split by phase. Monotone during a run.
struct NetworkStats {
    std::array<std::uint64_t, kPhaseCount> msg_num{};
    std::array<std::uint64_t, kPhaseCount> msg_size{};

    std::uint64_t num(Phase p) const { return msg_num[static_cast<int>(p)]; }
    std::uint64_t size(Phase p) const { return msg_size[static_cast<int>(p)]; }
    std::uint64_t total_msg_num() const;
    std::uint64_t total_msg_size() const;

    bool operator==(const NetworkStats&) const = default;
};

struct DeliveryRecord {
    int epoch = 0;
    Phase phase = Phase::P2pAggregation;
    PartyId from;
    PartyId to;
    Eigen::Index payload_len = 0;
};

/// Whether an envelope may carry from == to. Peer-to-peer exchanges forbid
/// it (retaining one's own share is not a message); the committee upload
/// and broadcast steps are service-style and count every message flat,
/// including a committee member's message to itself.
enum class SelfDelivery { Forbid, Allow };

/// Deterministic in-process message network. Parties enqueue envelopes with
/// send(); run_round() delivers everything queued, in canonical order
/// (epoch, phase, from, to, enqueue sequence); fetch() pulls one expected
/// envelope from the recipient's inbox and raises Deadlock if it was never
/// sent. Single-threaded by construction, so two runs with the same send
/// history produce byte-identical delivery logs.
class SimNetwork {
public:
    explicit SimNetwork(int n_parties);

    int party_count() const { return n_; }

    void send(Envelope env, SelfDelivery self = SelfDelivery::Forbid);
    void run_round();
    Envelope fetch(PartyId to, PartyId from, Phase phase, int epoch);

    NetworkStats stats_snapshot() const { return stats_; }
    std::uint64_t sent_count() const { return sent_; }
    std::uint64_t delivered_count() const { return delivered_; }
    /// Envelopes delivered but not yet fetched by their recipient.
    std::uint64_t unconsumed_count() const;

    const std::vector<DeliveryRecord>& delivery_log() const { return log_; }
    /// One line per delivered envelope: epoch, phase, from, to, payload_len.
    void write_delivery_log(std::ostream& os) const;
    std::string delivery_log_text() const;

    /// Wire tap: when enabled, every envelope (payload included) is copied
    /// at send time, in send order.
    void enable_payload_trace() { trace_payloads_ = true; }
    const std::vector<Envelope>& payload_trace() const { return payload_trace_; }

private:
    void check_party(PartyId id, const char* role) const;

    struct Queued {
        Envelope env;
        std::uint64_t seq = 0;
    };

    int n_;
    std::uint64_t seq_ = 0;
    std::uint64_t sent_ = 0;
    std::uint64_t delivered_ = 0;
    std::vector<Queued> queue_;
    std::vector<std::vector<Envelope>> inboxes_;  // index = party - 1
    NetworkStats stats_;
    std::vector<DeliveryRecord> log_;
    bool trace_payloads_ = false;
    std::vector<Envelope> payload_trace_;
};

}  // namespace mpcfl
