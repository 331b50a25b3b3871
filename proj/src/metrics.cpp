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

#include "qoesim/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "qoesim/format.hpp"

namespace qoesim {

P2Quantile::P2Quantile(double quantile) : m_q(quantile) {
    if (quantile <= 0.0 || quantile >= 1.0) {
        throw SimError("quantile must lie in (0,1)");
    }
    m_desired[0] = 1.0;
    m_desired[1] = 1.0 + 2.0 * m_q;
    m_desired[2] = 1.0 + 4.0 * m_q;
    m_desired[3] = 3.0 + 2.0 * m_q;
    m_desired[4] = 5.0;
    m_increments[0] = 0.0;
    m_increments[1] = m_q / 2.0;
    m_increments[2] = m_q;
    m_increments[3] = (1.0 + m_q) / 2.0;
    m_increments[4] = 1.0;
}

void P2Quantile::add(double x) {
    if (m_count < 5) {
        m_heights[m_count++] = x;
        if (m_count == 5) {
            std::sort(m_heights, m_heights + 5);
        }
        return;
    }

    int k;
    if (x < m_heights[0]) {
        m_heights[0] = x;
        k = 0;
    } else if (x >= m_heights[4]) {
        m_heights[4] = x;
        k = 3;
    } else {
        k = 0;
        while (k < 3 && x >= m_heights[k + 1]) {
            ++k;
        }
    }

    for (int i = k + 1; i < 5; ++i) {
        m_positions[i] += 1.0;
    }
    for (int i = 0; i < 5; ++i) {
        m_desired[i] += m_increments[i];
    }

    for (int i = 1; i <= 3; ++i) {
        const double diff = m_desired[i] - m_positions[i];
        const bool canUp = m_positions[i + 1] - m_positions[i] > 1.0;
        const bool canDown = m_positions[i - 1] - m_positions[i] < -1.0;
        if ((diff >= 1.0 && canUp) || (diff <= -1.0 && canDown)) {
            const double d = diff >= 1.0 ? 1.0 : -1.0;
            // Piecewise-parabolic prediction.
            const double np = m_positions[i + 1];
            const double nm = m_positions[i - 1];
            const double n = m_positions[i];
            const double qp = m_heights[i + 1];
            const double qm = m_heights[i - 1];
            const double q = m_heights[i];
            double candidate =
                q + d / (np - nm) *
                        ((n - nm + d) * (qp - q) / (np - n) +
                         (np - n - d) * (q - qm) / (n - nm));
            if (candidate <= qm || candidate >= qp) {
                // Fall back to linear interpolation towards the neighbor.
                const double nn = d > 0 ? np : nm;
                const double qn = d > 0 ? qp : qm;
                candidate = q + d * (qn - q) / (nn - n);
            }
            m_heights[i] = candidate;
            m_positions[i] += d;
        }
    }
    ++m_count;
}

double P2Quantile::value() const {
    if (m_count == 0) {
        return 0.0;
    }
    if (m_count < 5) {
        double sorted[5];
        std::copy(m_heights, m_heights + m_count, sorted);
        std::sort(sorted, sorted + m_count);
        const auto idx = static_cast<std::int64_t>(
            m_q * static_cast<double>(m_count - 1) + 0.5);
        return sorted[std::clamp<std::int64_t>(idx, 0, m_count - 1)];
    }
    return m_heights[2];
}

FlowMetrics::FlowMetrics(std::uint32_t flowId, PacketKind kind, int gopLength)
    : m_flowId(flowId),
      m_kind(kind),
      m_gopLength(gopLength),
      m_delayP50(0.5),
      m_delayP95(0.95) {
    if (kind == PacketKind::Video && gopLength <= 0) {
        throw SimError("video flow metrics need a gop length");
    }
}

FrameRecord& FlowMetrics::frameSlot(std::int64_t absoluteFrame) {
    if (absoluteFrame < 0) {
        throw SimError("negative frame index");
    }
    const auto idx = static_cast<std::size_t>(absoluteFrame);
    if (idx >= m_frames.size()) {
        m_frames.resize(idx + 1);
    }
    return m_frames[idx];
}

void FlowMetrics::onGopStart(std::int64_t gopIndex, int qp) {
    if (gopIndex != static_cast<std::int64_t>(m_gops.size())) {
        throw SimError("GoP indices must be contiguous from zero");
    }
    GopStat stat;
    stat.gopIndex = gopIndex;
    stat.qp = qp;
    m_gops.push_back(stat);
}

void FlowMetrics::onFrameEmitted(std::int64_t absoluteFrame, FrameType type,
                                 std::int32_t packetsInFrame) {
    FrameRecord& rec = frameSlot(absoluteFrame);
    if (rec.emitted) {
        throw SimError("frame emitted twice");
    }
    rec.emitted = true;
    rec.type = type;
    rec.expectedPackets = packetsInFrame;
}

void FlowMetrics::onPacketSent(const Packet& pkt, SimTime now) {
    ++m_packetsSent;
    m_payloadBitsSent += pkt.payloadBytes * 8;
    m_wireBitsSent += pkt.wireBytes * 8;

    const auto second = static_cast<std::size_t>(now.us() / 1000000);
    if (second >= m_sentBitsPerSecond.size()) {
        m_sentBitsPerSecond.resize(second + 1, 0);
    }
    m_sentBitsPerSecond[second] += pkt.wireBytes * 8;

    if (m_kind == PacketKind::Video) {
        const auto gop =
            static_cast<std::size_t>(pkt.absoluteFrame / m_gopLength);
        if (gop >= m_gops.size()) {
            throw SimError("packet sent before its GoP was opened");
        }
        m_gops[gop].sentPayloadBits += pkt.payloadBytes * 8;
    }
}

void FlowMetrics::onPacketDropped(const Packet& pkt) {
    (void)pkt;
    ++m_packetsDropped;
}

void FlowMetrics::onPacketDelivered(const Packet& pkt, SimTime now) {
    ++m_packetsDelivered;
    m_payloadBitsDelivered += pkt.payloadBytes * 8;
    m_wireBitsDelivered += pkt.wireBytes * 8;

    const double delayUs = static_cast<double>((now - pkt.enqueueTime).us());
    m_delaySumUs += delayUs;
    ++m_delayCount;
    m_delayP50.add(delayUs);
    m_delayP95.add(delayUs);

    if (m_kind == PacketKind::Video) {
        FrameRecord& rec = frameSlot(pkt.absoluteFrame);
        ++rec.receivedPackets;
        const auto gop =
            static_cast<std::size_t>(pkt.absoluteFrame / m_gopLength);
        if (gop < m_gops.size()) {
            m_gops[gop].deliveredPayloadBits += pkt.payloadBytes * 8;
        }
    }
}

double FlowMetrics::lossRatio() const {
    if (m_packetsSent == 0) {
        return 0.0;
    }
    return static_cast<double>(m_packetsDropped) /
           static_cast<double>(m_packetsSent);
}

double FlowMetrics::meanDelayUs() const {
    if (m_delayCount == 0) {
        return 0.0;
    }
    return m_delaySumUs / static_cast<double>(m_delayCount);
}

std::int64_t FlowMetrics::framesEmitted() const {
    std::int64_t n = 0;
    for (const FrameRecord& rec : m_frames) {
        if (rec.emitted) {
            ++n;
        }
    }
    return n;
}

DecodabilityResult FlowMetrics::decodability(int gopLength) const {
    if (gopLength <= 0) {
        throw SimError("gop length must be positive");
    }
    DecodabilityResult result;
    bool chainAlive = false;
    int decodableInGop = 0;

    for (std::size_t i = 0; i < m_frames.size(); ++i) {
        const bool gopStart = (i % static_cast<std::size_t>(gopLength)) == 0;
        if (gopStart) {
            chainAlive = true;
            decodableInGop = 0;
        }
        const FrameRecord& rec = m_frames[i];
        if (!rec.emitted) {
            chainAlive = false;
            continue;
        }
        ++result.framesEmitted;
        const bool complete = rec.receivedPackets == rec.expectedPackets &&
                              rec.expectedPackets > 0;
        if (chainAlive && complete) {
            ++result.framesDecodable;
            ++decodableInGop;
            if (decodableInGop == gopLength) {
                ++result.fullGopsDecodable;
            }
        } else {
            chainAlive = false;
        }
    }
    return result;
}

bool sessionDecoded(const DecodabilityResult& dec, int gopLength,
                    double theta) {
    (void)gopLength;
    if (dec.framesEmitted == 0) {
        return false;
    }
    const double ratio = static_cast<double>(dec.framesDecodable) /
                         static_cast<double>(dec.framesEmitted);
    return ratio >= theta && dec.fullGopsDecodable >= 1;
}

double mosScore(const FlowMetrics& metrics, const DecodabilityResult& dec,
                const VariantLadder& ladder, bool decoded) {
    if (!decoded || dec.framesEmitted == 0) {
        return 1.0;
    }
    const double d = static_cast<double>(dec.framesDecodable) /
                     static_cast<double>(dec.framesEmitted);

    // Delivered-bit-weighted mean variant rate.
    double weightedRate = 0.0;
    double weight = 0.0;
    for (const GopStat& gop : metrics.gops()) {
        const double bits = static_cast<double>(gop.deliveredPayloadBits);
        weightedRate +=
            bits * static_cast<double>(ladder.nominalRate(gop.qp).bitsPerSecond());
        weight += bits;
    }
    if (weight <= 0.0) {
        return 1.0;
    }
    const double rBar = weightedRate / weight;
    const double rMin = static_cast<double>(ladder.nominalRate(kQpMax).bitsPerSecond());
    const double rMax = static_cast<double>(ladder.nominalRate(kQpMin).bitsPerSecond());
    double r = std::log(rBar / rMin) / std::log(rMax / rMin);
    r = std::clamp(r, 0.0, 1.0);
    return std::clamp(1.0 + 3.5 * d * r, 1.0, 4.5);
}

double utilization(std::int64_t deliveredWireBits, BitRate capacity,
                   SimTime duration) {
    if (capacity.bitsPerSecond() <= 0 || duration.us() <= 0) {
        throw SimError("utilization needs positive capacity and duration");
    }
    const double possible = static_cast<double>(capacity.bitsPerSecond()) *
                            static_cast<double>(duration.us()) * 1e-6;
    return static_cast<double>(deliveredWireBits) / possible;
}

std::optional<double> rateCov(const std::vector<std::int64_t>& bins,
                              std::int64_t warmupSeconds,
                              std::int64_t endSeconds) {
    if (warmupSeconds < 0 || endSeconds <= warmupSeconds) {
        return std::nullopt;
    }
    std::vector<double> window;
    for (std::int64_t s = warmupSeconds; s < endSeconds; ++s) {
        const auto idx = static_cast<std::size_t>(s);
        window.push_back(idx < bins.size()
                             ? static_cast<double>(bins[idx])
                             : 0.0);
    }
    if (window.size() < 2) {
        return std::nullopt;
    }
    double mean = 0.0;
    for (double v : window) {
        mean += v;
    }
    mean /= static_cast<double>(window.size());
    if (mean <= 0.0) {
        return std::nullopt;
    }
    double var = 0.0;
    for (double v : window) {
        var += (v - mean) * (v - mean);
    }
    var /= static_cast<double>(window.size());
    return std::sqrt(var) / mean;
}

std::vector<std::pair<double, double>> aggregateCdf(
    std::vector<double> values) {
    if (values.empty()) {
        throw SimError("cdf over empty input");
    }
    std::sort(values.begin(), values.end());
    std::vector<std::pair<double, double>> cdf;
    const auto total = static_cast<double>(values.size());
    std::size_t i = 0;
    while (i < values.size()) {
        std::size_t j = i;
        while (j + 1 < values.size() && values[j + 1] == values[i]) {
            ++j;
        }
        cdf.emplace_back(values[i],
                         static_cast<double>(j + 1) / total);
        i = j + 1;
    }
    return cdf;
}

std::string summaryCsvHeader() {
    return "flow,kind,admitted,decoded,mos,mean_delay_ms,loss_ratio,"
           "delivered_bits";
}

std::string summaryCsvRow(const FlowSummary& row) {
    std::string out = std::to_string(row.flow);
    out += ',';
    out += row.kind == PacketKind::Video ? "video" : "ftp";
    out += ',';
    out += row.admitted ? '1' : '0';
    out += ',';
    out += row.decoded ? '1' : '0';
    out += ',';
    out += formatG(row.mos);
    out += ',';
    out += formatG(row.meanDelayMs);
    out += ',';
    out += formatG(row.lossRatio);
    out += ',';
    out += std::to_string(row.deliveredBits);
    return out;
}

double median(std::vector<double> values) {
    if (values.empty()) {
        throw SimError("median of empty set");
    }
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) {
        return values[n / 2];
    }
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace qoesim
