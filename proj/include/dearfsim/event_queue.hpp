#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace dearfsim {

// Simulation clock in integer microseconds since run start.
using SimTime = std::uint64_t;

struct EventHandle {
  std::uint64_t id = 0;
};

// Deterministic discrete-event queue. Events fire ordered by
// (fire_at, insertion sequence), so equal-time events dispatch in the
// order they were scheduled. Cancellation is lazy: cancelled entries are
// skipped when they reach the top of the heap.
//
// ActionT is any move-constructible callable invocable with no arguments;
// the default type-erased std::function keeps scheduling sites simple.
template <class ActionT = std::function<void()>>
class BasicEventQueue {
 public:
  using Action = ActionT;

  EventHandle schedule(SimTime fire_at, Action action) {
    if (fire_at < now_) {
      throw std::logic_error("EventQueue::schedule: fire_at " +
                             std::to_string(fire_at) + " is before clock " +
                             std::to_string(now_));
    }
    std::uint64_t id = ++next_seq_;
    heap_.push(Entry{fire_at, id, std::move(action)});
    pending_.insert(id);
    return EventHandle{id};
  }

  // True if the event was still pending and is now removed. False if it
  // already dispatched or was cancelled before.
  bool cancel(EventHandle h) { return pending_.erase(h.id) > 0; }

  // Dispatches every event with fire_at <= end, then advances the clock
  // to end. Returns the number of dispatched events.
  std::size_t run_until(SimTime end) {
    if (end < now_) {
      throw std::logic_error("EventQueue::run_until: end before clock");
    }
    std::size_t dispatched = 0;
    while (!heap_.empty() && heap_.top().at <= end) {
      Entry e = std::move(const_cast<Entry&>(heap_.top()));
      heap_.pop();
      if (pending_.erase(e.seq) == 0) continue;  // cancelled
      if (e.at < now_) throw std::logic_error("EventQueue: clock went backwards");
      now_ = e.at;
      ++dispatched;
      e.action();
    }
    now_ = end;
    return dispatched;
  }

  SimTime now() const { return now_; }
  std::size_t pending_count() const { return pending_.size(); }

 private:
  struct Entry {
    SimTime at;
    std::uint64_t seq;
    Action action;
    bool operator>(const Entry& o) const {
      return at != o.at ? at > o.at : seq > o.seq;
    }
  };

  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap_;
  std::unordered_set<std::uint64_t> pending_;
  std::uint64_t next_seq_ = 0;
  SimTime now_ = 0;
};

using EventQueue = BasicEventQueue<>;

}  // namespace dearfsim
