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

#include "qoesim/engine.hpp"

#include <utility>

namespace qoesim {

const char* eventKindName(EventKind kind) {
    switch (kind) {
        case EventKind::PacketArrival: return "PacketArrival";
        case EventKind::PacketDeparture: return "PacketDeparture";
        case EventKind::GopBoundary: return "GopBoundary";
        case EventKind::SessionRequest: return "SessionRequest";
        case EventKind::FeedbackReport: return "FeedbackReport";
        case EventKind::MeasurementTick: return "MeasurementTick";
        case EventKind::SimEnd: return "SimEnd";
    }
    return "?";
}

void SimEngine::schedule(SimTime fireAt, EventKind kind, std::uint32_t entity,
                         std::function<void()> action) {
    if (fireAt < m_now) {
        throw SimError("schedule into the past: t=" + std::to_string(fireAt.us()) +
                       "us < clock " + std::to_string(m_now.us()) + "us");
    }
    Event ev;
    ev.fireAt = fireAt;
    ev.sequence = m_nextSequence++;
    ev.kind = kind;
    ev.entity = entity;
    ev.action = std::move(action);
    m_queue.push(std::move(ev));
    ++m_scheduled;
}

std::uint64_t SimEngine::runUntil(SimTime end) {
    std::uint64_t processed = 0;
    while (!m_queue.empty() && m_queue.top().fireAt <= end) {
        Event ev = m_queue.top();
        m_queue.pop();
        m_now = ev.fireAt;
        if (m_log) m_log(ev.fireAt.us(), ev.sequence, ev.kind, ev.entity);
        if (ev.action) ev.action();
        ++processed;
        ++m_processed;
    }
    m_now = end;
    return processed;
}

}  // namespace qoesim
