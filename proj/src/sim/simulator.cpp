#include "gridsim/sim/simulator.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gridsim::sim {

EventHandle Simulator::schedule(double time, EventKind kind, Payload payload, Action action) {
    if (std::isnan(time) || time < now_)
        throw std::logic_error("event scheduled in the past: t=" + std::to_string(time) +
                               " < now=" + std::to_string(now_));
    std::uint32_t slot;
    if (!free_.empty()) {
        slot = free_.back();
        free_.pop_back();
    } else {
        slot = static_cast<std::uint32_t>(slots_.size());
        slots_.emplace_back();
    }
    const std::uint64_t seq = next_seq_++;
    auto& s = slots_[slot];
    s.event = Event{time, seq, kind, std::move(payload)};
    s.action = std::move(action);
    s.active = true;
    queue_.push(Entry{time, seq, slot});
    ++live_;
    return EventHandle{seq, slot, true};
}

bool Simulator::cancel(EventHandle handle) {
    if (!handle.valid || handle.slot >= slots_.size()) return false;
    auto& s = slots_[handle.slot];
    if (!s.active || s.event.seq != handle.seq) return false;
    s.active = false;
    s.action = nullptr;
    --live_;
    return true;
}

bool Simulator::pop(Entry& out) {
    while (!queue_.empty()) {
        Entry e = queue_.top();
        queue_.pop();
        auto& s = slots_[e.slot];
        if (s.active && s.event.seq == e.seq) {
            out = e;
            return true;
        }
        // Cancelled: the slot is released once its queue entry is gone.
        if (s.event.seq == e.seq) free_.push_back(e.slot);
    }
    return false;
}

bool Simulator::step() {
    Entry e{};
    if (!pop(e)) return false;
    auto& slot = slots_[e.slot];
    Event event = std::move(slot.event);
    Action action = std::move(slot.action);
    slot.active = false;
    slot.action = nullptr;
    free_.push_back(e.slot);
    --live_;

    now_ = event.time;
    if (action) action(event);
    ++processed_;
    trace_.append(TraceRecord{event.time, event.seq, event.kind, std::move(event.payload)});
    return true;
}

const Trace& Simulator::run_until(double t_end) {
    while (!queue_.empty()) {
        Entry e{};
        if (!pop(e)) break;
        if (e.time > t_end) {
            queue_.push(e);  // still active; put it back
            break;
        }
        queue_.push(e);
        step();
    }
    if (t_end > now_) now_ = t_end;
    return trace_;
}

const Trace& Simulator::run() {
    while (step()) {
    }
    return trace_;
}

}  // namespace gridsim::sim
