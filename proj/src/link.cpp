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

#include "qoesim/link.hpp"

#include <utility>

namespace qoesim {

const char* packetEventName(PacketEvent ev) {
    switch (ev) {
        case PacketEvent::Enqueue: return "enq";
        case PacketEvent::Mark: return "mark";
        case PacketEvent::Drop: return "drop";
        case PacketEvent::Dequeue: return "deq";
        case PacketEvent::Deliver: return "recv";
    }
    return "?";
}

DroptailQueue::DroptailQueue(std::size_t capacityPackets, double ecnThreshold)
    : m_capacity(capacityPackets), m_threshold(ecnThreshold) {
    if (m_capacity == 0) {
        throw SimError("queue capacity must be positive");
    }
    if (m_threshold < 0.0 || m_threshold > 1.0) {
        throw SimError("ecn threshold must lie in [0,1]");
    }
}

EnqueueOutcome DroptailQueue::enqueue(Packet& pkt) {
    if (m_queue.size() >= m_capacity) {
        return EnqueueOutcome::Dropped;
    }
    m_queue.push_back(pkt);
    const std::size_t occ = m_queue.size();
    if (occ > m_maxOccupancy) {
        m_maxOccupancy = occ;
    }
    if (static_cast<double>(occ) >
        m_threshold * static_cast<double>(m_capacity)) {
        m_queue.back().ecnMarked = true;
        pkt.ecnMarked = true;
    }
    return EnqueueOutcome::Queued;
}

Packet DroptailQueue::popFront() {
    if (m_queue.empty()) {
        throw SimError("pop from empty queue");
    }
    Packet pkt = m_queue.front();
    m_queue.pop_front();
    return pkt;
}

BottleneckLink::BottleneckLink(SimEngine& engine, std::uint32_t entityId,
                               BitRate capacity, SimTime propagationDelay,
                               std::size_t queueCapacity, double ecnThreshold)
    : m_engine(engine),
      m_entity(entityId),
      m_capacity(capacity),
      m_propagation(propagationDelay),
      m_queue(queueCapacity, ecnThreshold) {
    if (m_capacity.bitsPerSecond() <= 0) {
        throw SimError("link capacity must be positive");
    }
}

SimTime BottleneckLink::serializationTime(std::int64_t wireBytes) const {
    // ceil(bits * 1e6 / bps) microseconds; never zero for a real packet.
    const std::int64_t bits = wireBytes * 8;
    const std::int64_t bps = m_capacity.bitsPerSecond();
    const std::int64_t us = (bits * 1000000 + bps - 1) / bps;
    return SimTime::micros(us);
}

void BottleneckLink::log(const Packet& pkt, PacketEvent ev) {
    if (m_packetLog) {
        m_packetLog(m_engine.now(), pkt, ev, m_queue.occupancy());
    }
}

EnqueueOutcome BottleneckLink::enqueue(Packet pkt) {
    pkt.enqueueTime = m_engine.now();
    const EnqueueOutcome outcome = m_queue.enqueue(pkt);
    if (outcome == EnqueueOutcome::Dropped) {
        ++m_droppedPackets;
        log(pkt, PacketEvent::Drop);
        if (m_drop) {
            m_drop(pkt);
        }
        return outcome;
    }
    log(pkt, PacketEvent::Enqueue);
    if (pkt.ecnMarked) {
        log(pkt, PacketEvent::Mark);
    }
    if (!m_busy) {
        beginService();
    }
    return outcome;
}

void BottleneckLink::beginService() {
    m_busy = true;
    const Packet& head = m_queue.contents().front();
    const SimTime done = m_engine.now() + serializationTime(head.wireBytes);
    m_engine.schedule(done, EventKind::PacketDeparture, m_entity,
                      [this] { onDeparture(); });
}

void BottleneckLink::onDeparture() {
    Packet pkt = m_queue.popFront();
    log(pkt, PacketEvent::Dequeue);
    ++m_inTransit;
    ++m_transitByFlow[pkt.flowId];

    const std::uint32_t sinkEntity =
        m_sinkEntity ? m_sinkEntity(pkt) : m_entity;
    const SimTime arrival = m_engine.now() + m_propagation;
    m_engine.schedule(arrival, EventKind::PacketArrival, sinkEntity,
                      [this, pkt]() mutable {
                          --m_inTransit;
                          --m_transitByFlow[pkt.flowId];
                          ++m_deliveredPackets;
                          m_deliveredWireBits += pkt.wireBytes * 8;
                          log(pkt, PacketEvent::Deliver);
                          if (m_deliver) {
                              m_deliver(pkt);
                          }
                      });

    if (!m_queue.empty()) {
        beginService();
    } else {
        m_busy = false;
    }
}

std::map<std::uint32_t, std::int64_t> BottleneckLink::residualPacketsByFlow()
    const {
    std::map<std::uint32_t, std::int64_t> residual;
    for (const Packet& pkt : m_queue.contents()) {
        ++residual[pkt.flowId];
    }
    for (const auto& [flow, count] : m_transitByFlow) {
        if (count != 0) {
            residual[flow] += count;
        }
    }
    return residual;
}

}  // namespace qoesim
