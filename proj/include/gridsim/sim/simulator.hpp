#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "gridsim/sim/trace.hpp"

namespace gridsim::sim {

struct Event {
    double time = 0.0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::Timer;
    Payload payload;
};

struct EventHandle {
    std::uint64_t seq = 0;
    std::uint32_t slot = 0;
    bool valid = false;
};

/// Discrete-event engine. Events run in (time, seq) order; seq is assigned
/// at scheduling time, so simultaneous events run in scheduling order.
/// Actions may mutate their event's payload before it is traced.
class Simulator {
public:
    using Action = std::function<void(Event&)>;

    explicit Simulator(bool keep_trace = true) : trace_(keep_trace) {}

    double now() const { return now_; }

    /// Throws std::logic_error when `time` is in the past.
    EventHandle schedule(double time, EventKind kind, Payload payload, Action action = {});
    EventHandle schedule_in(double delay, EventKind kind, Payload payload, Action action = {}) {
        return schedule(now_ + delay, kind, std::move(payload), std::move(action));
    }

    /// Cancelled events are neither run nor traced. Returns false if the
    /// event already ran or was cancelled.
    bool cancel(EventHandle handle);

    /// Runs the next event; false when the queue is empty.
    bool step();

    /// Processes every event with time <= t_end, then sets the clock to t_end.
    const Trace& run_until(double t_end);
    /// Runs until the queue is empty.
    const Trace& run();

    std::size_t pending() const { return live_; }
    std::uint64_t processed() const { return processed_; }

    Trace& trace() { return trace_; }
    const Trace& trace() const { return trace_; }

private:
    struct Slot {
        Event event;
        Action action;
        bool active = false;
    };
    struct Entry {
        double time;
        std::uint64_t seq;
        std::uint32_t slot;
        bool operator>(const Entry& o) const {
            return time != o.time ? time > o.time : seq > o.seq;
        }
    };

    bool pop(Entry& out);

    double now_ = 0.0;
    std::uint64_t next_seq_ = 0;
    std::uint64_t processed_ = 0;
    std::size_t live_ = 0;
    std::vector<Slot> slots_;
    std::vector<std::uint32_t> free_;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue_;
    Trace trace_;
};

}  // namespace gridsim::sim
