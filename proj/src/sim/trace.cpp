#include "gridsim/sim/trace.hpp"

#include <charconv>
#include <ostream>
#include <sstream>

namespace gridsim::sim {

std::string_view to_string(EventKind k) {
    switch (k) {
        case EventKind::MessageDelivery: return "message-delivery";
        case EventKind::TransferComplete: return "transfer-complete";
        case EventKind::ComputeComplete: return "compute-complete";
        case EventKind::NodeFail: return "node-fail";
        case EventKind::NodeRecover: return "node-recover";
        case EventKind::CheckpointDue: return "checkpoint-due";
        case EventKind::Timer: return "timer";
    }
    return "unknown";
}

std::string_view to_string(Tier t) {
    switch (t) {
        case Tier::Intra: return "intra";
        case Tier::Region: return "region";
        case Tier::Inter: return "inter";
    }
    return "unknown";
}

std::string_view to_string(MsgType m) {
    switch (m) {
        case MsgType::PollRequest: return "poll-request";
        case MsgType::PollResponse: return "poll-response";
        case MsgType::Register: return "register";
        case MsgType::RegisterAck: return "register-ack";
        case MsgType::Multicast: return "multicast";
        case MsgType::MulticastReply: return "multicast-reply";
        case MsgType::SharePush: return "share-push";
        case MsgType::ShareRequest: return "share-request";
        case MsgType::ShareResponse: return "share-response";
        case MsgType::Election: return "election";
        case MsgType::Answer: return "answer";
        case MsgType::Coordinator: return "coordinator";
        case MsgType::PowerPush: return "power-push";
        case MsgType::Query: return "query";
        case MsgType::Forward: return "forward";
        case MsgType::Dispatch: return "dispatch";
        case MsgType::Decline: return "decline";
        case MsgType::Result: return "result";
    }
    return "unknown";
}

std::string_view to_string(TimerType t) {
    switch (t) {
        case TimerType::Submit: return "submit";
        case TimerType::PollTimeout: return "poll-timeout";
        case TimerType::Decision: return "decision";
        case TimerType::Detect: return "detect";
        case TimerType::ElectionTimeout: return "election-timeout";
        case TimerType::Leader: return "leader";
        case TimerType::RegistryRegenerated: return "registry-regenerated";
        case TimerType::RegisterTimeout: return "register-timeout";
        case TimerType::Registered: return "registered";
        case TimerType::RediscoverTimeout: return "rediscover-timeout";
        case TimerType::CheckpointDone: return "checkpoint-done";
        case TimerType::Join: return "join";
        case TimerType::JobRecover: return "job-recover";
        case TimerType::JobDone: return "job-done";
        case TimerType::JobAbandoned: return "job-abandoned";
        case TimerType::QueryDone: return "query-done";
        case TimerType::EscalationTimeout: return "escalation-timeout";
        case TimerType::QueryIssue: return "query-issue";
    }
    return "unknown";
}

namespace {

class LineWriter {
public:
    explicit LineWriter(std::string& out) : out_(out) {}

    void key(std::string_view k) {
        if (!first_) out_ += ',';
        first_ = false;
        out_ += '"';
        out_ += k;
        out_ += "\":";
    }
    void num(std::string_view k, double v) {
        key(k);
        char buf[32];
        auto res = std::to_chars(buf, buf + sizeof buf, v);
        out_.append(buf, res.ptr);
    }
    void num(std::string_view k, std::int64_t v) {
        key(k);
        char buf[24];
        auto res = std::to_chars(buf, buf + sizeof buf, v);
        out_.append(buf, res.ptr);
    }
    void str(std::string_view k, std::string_view v) {
        key(k);
        out_ += '"';
        out_ += v;
        out_ += '"';
    }
    void boolean(std::string_view k, bool v) {
        key(k);
        out_ += v ? "true" : "false";
    }
    void open(std::string_view k) {
        key(k);
        out_ += '{';
        first_ = true;
    }
    void close() {
        out_ += '}';
        first_ = false;
    }

private:
    std::string& out_;
    bool first_ = true;
};

struct PayloadWriter {
    LineWriter& w;

    void operator()(const std::monostate&) const {}
    void operator()(const MessagePayload& p) const {
        w.str("msg", to_string(p.type));
        w.str("tier", to_string(p.tier));
        w.num("from", std::int64_t{p.from});
        w.num("to", std::int64_t{p.to});
        w.num("ref", p.ref);
        w.num("job", p.job);
        w.boolean("dropped", p.dropped);
    }
    void operator()(const TransferPayload& p) const {
        w.str("purpose", p.purpose == TransferPayload::Purpose::JobData ? "job-data" : "export");
        w.num("job", p.job);
        w.num("from", std::int64_t{p.from});
        w.num("to", std::int64_t{p.to});
        w.num("bytes", p.bytes);
        w.boolean("aborted", p.aborted);
    }
    void operator()(const ComputePayload& p) const {
        w.num("job", p.job);
        w.num("node", std::int64_t{p.node});
        w.num("flop", p.flop);
    }
    void operator()(const NodePayload& p) const { w.num("node", std::int64_t{p.node}); }
    void operator()(const CheckpointPayload& p) const {
        w.num("job", p.job);
        w.num("node", std::int64_t{p.node});
        w.num("index", std::int64_t{p.index});
        w.num("progress", p.progress);
        w.boolean("exported", p.exported);
    }
    void operator()(const TimerPayload& p) const {
        w.str("timer", to_string(p.type));
        w.num("node", std::int64_t{p.node});
        w.num("ref", p.ref);
        w.num("value", p.value);
    }
};

}  // namespace

std::string to_json_line(const TraceRecord& record) {
    std::string out;
    out.reserve(160);
    out += '{';
    LineWriter w(out);
    w.num("time", record.time);
    w.num("seq", static_cast<std::int64_t>(record.seq));
    w.str("kind", to_string(record.kind));
    w.open("payload");
    std::visit(PayloadWriter{w}, record.payload);
    w.close();
    out += '}';
    return out;
}

void Trace::append(TraceRecord record) {
    ++count_;
    ++by_kind_[static_cast<std::size_t>(record.kind)];
    if (const auto* m = std::get_if<MessagePayload>(&record.payload)) {
        ++by_tier_[static_cast<std::size_t>(m->tier)];
        ++by_type_[static_cast<std::size_t>(m->type)];
    }
    if (sink_) *sink_ << to_json_line(record) << '\n';
    if (keep_) records_.push_back(std::move(record));
}

void write_jsonl(std::ostream& out, const Trace& trace) {
    for (const auto& r : trace.records()) out << to_json_line(r) << '\n';
}

std::string to_jsonl(const Trace& trace) {
    std::ostringstream out;
    write_jsonl(out, trace);
    return out.str();
}

}  // namespace gridsim::sim
