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

#ifndef QOESIM_PACKET_HPP
#define QOESIM_PACKET_HPP

#include <cstdint>

#include "qoesim/trace.hpp"
#include "qoesim/units.hpp"

namespace qoesim {

enum class PacketKind : std::uint8_t { Video, Ftp };

struct Packet {
    std::uint32_t flowId = 0;
    std::int64_t seq = 0;  // per-flow, monotone
    std::int64_t wireBytes = 0;     // payload + UDP/IP-equivalent headers
    std::int64_t payloadBytes = 0;
    PacketKind kind = PacketKind::Video;

    // Video-only frame bookkeeping.
    FrameType frameType = FrameType::I;
    std::int64_t absoluteFrame = 0;  // counts across trace loops
    std::int32_t packetIndexInFrame = 0;
    std::int32_t packetsInFrame = 0;

    SimTime sendTime;     // release from the sender (shaper output / ftp send)
    SimTime enqueueTime;  // arrival at the bottleneck queue
    bool ecnMarked = false;
};

/// Receiver-side feedback carried back to a sender once per feedback
/// interval over the uncongested reverse path.
struct FeedbackReport {
    bool ecnSeen = false;
    std::int64_t lossEvents = 0;
    SimTime rttSample;
};

}  // namespace qoesim

#endif  // QOESIM_PACKET_HPP
