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

#ifndef QOESIM_LINK_HPP
#define QOESIM_LINK_HPP

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <string>

#include "qoesim/engine.hpp"
#include "qoesim/packet.hpp"
#include "qoesim/units.hpp"

namespace qoesim {

enum class EnqueueOutcome : std::uint8_t { Queued, Dropped };

/// What happened to a packet at the queue/link, for the per-packet log.
enum class PacketEvent : std::uint8_t { Enqueue, Mark, Drop, Dequeue, Deliver };

const char* packetEventName(PacketEvent ev);

/// Droptail FIFO with threshold ECN marking.
///
/// A packet arriving at a full queue is dropped.  Otherwise it is appended,
/// and marked iff the post-enqueue occupancy (in packets) strictly exceeds
/// threshold * capacity.
class DroptailQueue {
public:
    DroptailQueue(std::size_t capacityPackets, double ecnThreshold);

    /// Appends if capacity allows; sets pkt.ecnMarked per the threshold rule.
    EnqueueOutcome enqueue(Packet& pkt);

    Packet popFront();
    bool empty() const { return m_queue.empty(); }
    std::size_t occupancy() const { return m_queue.size(); }
    std::size_t capacity() const { return m_capacity; }
    std::size_t maxOccupancySeen() const { return m_maxOccupancy; }

    const std::deque<Packet>& contents() const { return m_queue; }

private:
    std::size_t m_capacity;
    double m_threshold;
    std::deque<Packet> m_queue;
    std::size_t m_maxOccupancy = 0;
};

/// Single bottleneck link: droptail queue + serializer + fixed
/// propagation delay.  All flows share it.
///
/// Serialization time is ceil(wire_bits / capacity_bps) in integer
/// microseconds; the server is busy while a packet serializes.  On
/// service completion the packet is handed to the deliver callback after
/// the propagation delay, as a separate event attributed to the entity
/// returned by the sink resolver.
class BottleneckLink {
public:
    using DeliverFn = std::function<void(const Packet&)>;
    using DropFn = std::function<void(const Packet&)>;
    using SinkEntityFn = std::function<std::uint32_t(const Packet&)>;
    using PacketLogFn =
        std::function<void(SimTime, const Packet&, PacketEvent, std::size_t)>;

    BottleneckLink(SimEngine& engine, std::uint32_t entityId, BitRate capacity,
                   SimTime propagationDelay, std::size_t queueCapacity,
                   double ecnThreshold);

    void setDeliver(DeliverFn fn) { m_deliver = std::move(fn); }
    void setDrop(DropFn fn) { m_drop = std::move(fn); }
    void setSinkEntity(SinkEntityFn fn) { m_sinkEntity = std::move(fn); }
    void setPacketLog(PacketLogFn fn) { m_packetLog = std::move(fn); }

    /// Called in the sender's release event.  Stamps enqueueTime = now.
    EnqueueOutcome enqueue(Packet pkt);

    SimTime serializationTime(std::int64_t wireBytes) const;

    BitRate capacity() const { return m_capacity; }
    SimTime propagationDelay() const { return m_propagation; }
    const DroptailQueue& queue() const { return m_queue; }

    std::int64_t deliveredWireBits() const { return m_deliveredWireBits; }
    std::int64_t deliveredPackets() const { return m_deliveredPackets; }
    std::int64_t droppedPackets() const { return m_droppedPackets; }
    std::int64_t inTransitPackets() const { return m_inTransit; }

    /// Per-flow packets currently queued or propagating, for end-of-run
    /// conservation accounting.
    std::map<std::uint32_t, std::int64_t> residualPacketsByFlow() const;

private:
    void beginService();
    void onDeparture();
    void log(const Packet& pkt, PacketEvent ev);

    SimEngine& m_engine;
    std::uint32_t m_entity;
    BitRate m_capacity;
    SimTime m_propagation;
    DroptailQueue m_queue;
    bool m_busy = false;

    DeliverFn m_deliver;
    DropFn m_drop;
    SinkEntityFn m_sinkEntity;
    PacketLogFn m_packetLog;

    std::int64_t m_deliveredWireBits = 0;
    std::int64_t m_deliveredPackets = 0;
    std::int64_t m_droppedPackets = 0;
    std::int64_t m_inTransit = 0;  // serialized, not yet delivered
    std::map<std::uint32_t, std::int64_t> m_transitByFlow;
};

}  // namespace qoesim

#endif  // QOESIM_LINK_HPP
