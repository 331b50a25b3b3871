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

#ifndef QOESIM_FTP_HPP
#define QOESIM_FTP_HPP

#include <cstdint>
#include <functional>

#include "qoesim/link.hpp"

namespace qoesim {

struct FtpParams {
    std::int64_t packetPayloadBytes = 1024;
    std::int64_t headerBytes = 28;
    double initialCwnd = 2.0;
    double initialSsthresh = 64.0;
    /// Receiver-window cap on cwnd; <= 0 means unbounded.
    double maxCwnd = 0.0;
};

/// Greedy file-transfer source with a Reno-like per-packet-acked AIMD
/// window.  Every delivered packet is acked over the uncongested reverse
/// path; a queue drop is reported back to the source one RTT later.
///
/// Window rules: slow start adds one segment per ack until ssthresh, then
/// congestion avoidance adds 1/cwnd per ack.  A loss report halves the
/// window (ssthresh = max(cwnd/2, 2), cwnd = ssthresh); subsequent loss
/// reports within one smoothed RTT of a reaction are counted but do not
/// halve again.
class FtpSource {
public:
    FtpSource(SimEngine& engine, BottleneckLink& link, std::uint32_t flowId,
              std::uint32_t entityId, const FtpParams& params);

    void start(SimTime at);

    /// Called when the ack for one packet reaches the source.
    void onAck(const Packet& pkt, SimTime ackTime);

    /// Called one RTT after one of this flow's packets was dropped.
    void onLossReport();

    double cwnd() const { return m_cwnd; }
    double ssthresh() const { return m_ssthresh; }
    bool inSlowStart() const { return m_slowStart; }
    std::int64_t inFlight() const { return m_inFlight; }
    std::int64_t packetsSent() const { return m_packetsSent; }
    std::int64_t lossReports() const { return m_lossReports; }
    SimTime smoothedRtt() const { return m_srtt; }
    std::uint32_t flowId() const { return m_flowId; }
    std::uint32_t entityId() const { return m_entity; }

    /// Observes every packet this source hands to the link (pre-enqueue).
    void setSendHook(std::function<void(const Packet&)> fn) {
        m_sendHook = std::move(fn);
    }

private:
    void trySend();

    SimEngine& m_engine;
    BottleneckLink& m_link;
    std::uint32_t m_flowId;
    std::uint32_t m_entity;
    FtpParams m_params;

    double m_cwnd;
    double m_ssthresh;
    bool m_slowStart = true;
    std::int64_t m_inFlight = 0;
    std::int64_t m_nextSeq = 0;
    std::int64_t m_packetsSent = 0;
    std::int64_t m_lossReports = 0;
    bool m_started = false;

    SimTime m_srtt;
    SimTime m_lastHalving;
    bool m_everHalved = false;

    std::function<void(const Packet&)> m_sendHook;
};

}  // namespace qoesim

#endif  // QOESIM_FTP_HPP
