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

#include "qoesim/ftp.hpp"

#include <algorithm>
#include <cmath>

namespace qoesim {

FtpSource::FtpSource(SimEngine& engine, BottleneckLink& link,
                     std::uint32_t flowId, std::uint32_t entityId,
                     const FtpParams& params)
    : m_engine(engine),
      m_link(link),
      m_flowId(flowId),
      m_entity(entityId),
      m_params(params),
      m_cwnd(params.initialCwnd),
      m_ssthresh(params.initialSsthresh) {
    if (params.initialCwnd < 1.0) {
        throw SimError("ftp initial cwnd must be >= 1");
    }
    if (params.packetPayloadBytes <= 0 || params.headerBytes < 0) {
        throw SimError("ftp packet geometry invalid");
    }
    // Until the first ack, guess RTT as twice the propagation delay.
    m_srtt = link.propagationDelay() + link.propagationDelay();
}

void FtpSource::start(SimTime at) {
    m_engine.schedule(at, EventKind::SessionRequest, m_entity, [this] {
        m_started = true;
        trySend();
    });
}

void FtpSource::trySend() {
    if (!m_started) {
        return;
    }
    double cap = m_cwnd;
    if (m_params.maxCwnd > 0.0) {
        cap = std::min(cap, m_params.maxCwnd);
    }
    const auto window = static_cast<std::int64_t>(std::floor(cap));
    while (m_inFlight < window) {
        Packet pkt;
        pkt.flowId = m_flowId;
        pkt.seq = m_nextSeq++;
        pkt.kind = PacketKind::Ftp;
        pkt.payloadBytes = m_params.packetPayloadBytes;
        pkt.wireBytes = m_params.packetPayloadBytes + m_params.headerBytes;
        pkt.sendTime = m_engine.now();
        ++m_inFlight;
        ++m_packetsSent;
        if (m_sendHook) {
            m_sendHook(pkt);
        }
        m_link.enqueue(pkt);
    }
}

void FtpSource::onAck(const Packet& pkt, SimTime ackTime) {
    --m_inFlight;

    const std::int64_t sampleUs = (ackTime - pkt.sendTime).us();
    if (m_srtt.us() == 0) {
        m_srtt = SimTime::micros(sampleUs);
    } else {
        // RFC-style EWMA with alpha = 1/8.
        const std::int64_t smoothed =
            m_srtt.us() + (sampleUs - m_srtt.us()) / 8;
        m_srtt = SimTime::micros(std::max<std::int64_t>(smoothed, 1));
    }

    if (m_slowStart) {
        m_cwnd += 1.0;
        if (m_cwnd >= m_ssthresh) {
            m_slowStart = false;
        }
    } else {
        m_cwnd += 1.0 / m_cwnd;
    }
    if (m_params.maxCwnd > 0.0) {
        m_cwnd = std::min(m_cwnd, m_params.maxCwnd);
    }
    trySend();
}

void FtpSource::onLossReport() {
    --m_inFlight;
    ++m_lossReports;

    const SimTime now = m_engine.now();
    const bool withinGuard =
        m_everHalved && (now - m_lastHalving) < m_srtt;
    if (!withinGuard) {
        m_ssthresh = std::max(m_cwnd / 2.0, 2.0);
        m_cwnd = m_ssthresh;
        m_slowStart = false;
        m_lastHalving = now;
        m_everHalved = true;
    }
    trySend();
}

}  // namespace qoesim
