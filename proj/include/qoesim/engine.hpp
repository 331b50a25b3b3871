/*
 * Copyright 2026 The qoesim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef QOESIM_ENGINE_HPP
#define QOESIM_ENGINE_HPP

#include <cstdint>
#include <functional>
#include <queue>
#include <string>
#include <vector>

#include "qoesim/units.hpp"

namespace qoesim {

enum class EventKind {
    PacketArrival,
    PacketDeparture,
    GopBoundary,
    SessionRequest,
    FeedbackReport,
    MeasurementTick,
    SimEnd,
};

const char* eventKindName(EventKind kind);

/// One entry of the future-event list. Events with equal fire time are
/// delivered in ascending sequence order (insertion order), which pins
/// the processing order of simultaneous events.
struct Event {
    SimTime fireAt;
    std::uint64_t sequence = 0;
    EventKind kind = EventKind::SimEnd;
    std::uint32_t entity = 0;
    std::function<void()> action;
};

/// Single-threaded discrete-event engine: a virtual clock plus a totally
/// ordered future-event list. One engine instance per simulation run;
/// independent instances may run in parallel.
class SimEngine {
public:
    SimEngine() = default;
    SimEngine(const SimEngine&) = delete;
    SimEngine& operator=(const SimEngine&) = delete;

    SimTime now() const { return m_now; }

    /// Enqueues an event. Scheduling before the current clock is fatal.
    void schedule(SimTime fireAt, EventKind kind, std::uint32_t entity,
                  std::function<void()> action);

    /// Processes every event with fireAt <= end in (fireAt, sequence)
    /// order, advances the clock to end, and returns the number of
    /// events processed by this call.
    std::uint64_t runUntil(SimTime end);

    std::uint64_t scheduledCount() const { return m_scheduled; }
    std::uint64_t processedCount() const { return m_processed; }
    std::uint64_t pendingCount() const { return m_queue.size(); }

    /// Structured event-log hook: called once per processed event with
    /// (time_us, sequence, kind, entity). Used by the --dump-events CLI
    /// flag and by the determinism tests.
    void setEventLog(std::function<void(std::int64_t, std::uint64_t,
                                        EventKind, std::uint32_t)> log) {
        m_log = std::move(log);
    }

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            if (a.fireAt != b.fireAt) return a.fireAt > b.fireAt;
            return a.sequence > b.sequence;
        }
    };

    SimTime m_now;
    std::uint64_t m_nextSequence = 0;
    std::uint64_t m_scheduled = 0;
    std::uint64_t m_processed = 0;
    std::priority_queue<Event, std::vector<Event>, Later> m_queue;
    std::function<void(std::int64_t, std::uint64_t, EventKind, std::uint32_t)> m_log;
};

}  // namespace qoesim

#endif  // QOESIM_ENGINE_HPP
