#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gridsim/model/types.hpp"

namespace gridsim::sim {

enum class EventKind : std::uint8_t {
    MessageDelivery,
    TransferComplete,
    ComputeComplete,
    NodeFail,
    NodeRecover,
    CheckpointDue,
    Timer,
};
inline constexpr std::size_t kEventKindCount = 7;

/// Locality of a message: inside a sub-grid, between sub-grids of one
/// region, or between regions.
enum class Tier : std::uint8_t { Intra, Region, Inter };
inline constexpr std::size_t kTierCount = 3;

enum class MsgType : std::uint8_t {
    PollRequest,
    PollResponse,
    Register,
    RegisterAck,
    Multicast,
    MulticastReply,
    SharePush,
    ShareRequest,
    ShareResponse,
    Election,
    Answer,
    Coordinator,
    PowerPush,
    Query,
    Forward,
    Dispatch,
    Decline,
    Result,
};
inline constexpr std::size_t kMsgTypeCount = 18;

enum class TimerType : std::uint8_t {
    Submit,
    PollTimeout,
    Decision,
    Detect,
    ElectionTimeout,
    Leader,
    RegistryRegenerated,
    RegisterTimeout,
    Registered,
    RediscoverTimeout,
    CheckpointDone,
    Join,
    JobRecover,
    JobDone,
    JobAbandoned,
    QueryDone,
    EscalationTimeout,
    QueryIssue,
};

std::string_view to_string(EventKind k);
std::string_view to_string(Tier t);
std::string_view to_string(MsgType m);
std::string_view to_string(TimerType t);

struct MessagePayload {
    MsgType type = MsgType::PollRequest;
    Tier tier = Tier::Intra;
    NodeId from = kNoNode;
    NodeId to = kNoNode;      // kNoNode for a sub-grid multicast
    std::int64_t ref = -1;    // decision, query, or election id
    JobId job = -1;
    bool dropped = false;     // destination was down on delivery
};

struct TransferPayload {
    enum class Purpose : std::uint8_t { JobData, Export };
    Purpose purpose = Purpose::JobData;
    JobId job = -1;
    NodeId from = kNoNode;
    NodeId to = kNoNode;
    double bytes = 0.0;
    bool aborted = false;
};

struct ComputePayload {
    JobId job = -1;
    NodeId node = kNoNode;
    double flop = 0.0;
};

struct NodePayload {
    NodeId node = kNoNode;
};

struct CheckpointPayload {
    JobId job = -1;
    NodeId node = kNoNode;
    int index = 0;
    double progress = 0.0;
    bool exported = false;
};

struct TimerPayload {
    TimerType type = TimerType::Submit;
    NodeId node = kNoNode;
    std::int64_t ref = -1;
    double value = 0.0;
};

using Payload = std::variant<std::monostate, MessagePayload, TransferPayload, ComputePayload,
                             NodePayload, CheckpointPayload, TimerPayload>;

struct TraceRecord {
    double time = 0.0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::Timer;
    Payload payload;
};

/// One JSON object per line: {"time":..,"seq":..,"kind":..,"payload":{..}}.
/// Numbers use shortest round-trip formatting, so equal traces serialize to
/// equal bytes.
std::string to_json_line(const TraceRecord& record);

/// Processed events in order. Per-tier and per-type message counters are
/// always maintained; the records themselves are kept only when requested.
class Trace {
public:
    explicit Trace(bool keep_records = true) : keep_(keep_records) {}

    void append(TraceRecord record);

    /// Streams every appended record as a JSON line.
    void set_sink(std::ostream* sink) { sink_ = sink; }

    const std::vector<TraceRecord>& records() const { return records_; }
    bool keeps_records() const { return keep_; }
    std::uint64_t size() const { return count_; }

    std::uint64_t messages(Tier tier) const { return by_tier_[static_cast<std::size_t>(tier)]; }
    std::uint64_t messages(MsgType type) const { return by_type_[static_cast<std::size_t>(type)]; }
    std::uint64_t events(EventKind kind) const { return by_kind_[static_cast<std::size_t>(kind)]; }

private:
    bool keep_;
    std::ostream* sink_ = nullptr;
    std::uint64_t count_ = 0;
    std::vector<TraceRecord> records_;
    std::array<std::uint64_t, kTierCount> by_tier_{};
    std::array<std::uint64_t, kMsgTypeCount> by_type_{};
    std::array<std::uint64_t, kEventKindCount> by_kind_{};
};

void write_jsonl(std::ostream& out, const Trace& trace);
std::string to_jsonl(const Trace& trace);

}  // namespace gridsim::sim
