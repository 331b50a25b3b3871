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

#ifndef QOESIM_METRICS_HPP
#define QOESIM_METRICS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qoesim/packet.hpp"
#include "qoesim/trace.hpp"
#include "qoesim/units.hpp"

namespace qoesim {

/// Streaming quantile estimator (the classic five-marker P-squared
/// scheme).  Exact below five samples.
class P2Quantile {
public:
    explicit P2Quantile(double quantile);

    void add(double x);
    double value() const;
    std::int64_t count() const { return m_count; }

private:
    double m_q;  // target quantile
    std::int64_t m_count = 0;
    double m_heights[5] = {0, 0, 0, 0, 0};
    double m_positions[5] = {1, 2, 3, 4, 5};
    double m_desired[5] = {0, 0, 0, 0, 0};
    double m_increments[5] = {0, 0, 0, 0, 0};
};

/// Delivery record of one emitted frame.
struct FrameRecord {
    bool emitted = false;
    FrameType type = FrameType::I;
    std::int32_t expectedPackets = 0;
    std::int32_t receivedPackets = 0;
};

/// One emitted GoP: which variant produced it and what got through.
struct GopStat {
    std::int64_t gopIndex = 0;
    int qp = 0;
    std::int64_t sentPayloadBits = 0;
    std::int64_t deliveredPayloadBits = 0;
};

struct DecodabilityResult {
    std::int64_t framesEmitted = 0;
    std::int64_t framesDecodable = 0;
    std::int64_t fullGopsDecodable = 0;
};

/// Per-flow accumulation, updated inline by the simulation.
class FlowMetrics {
public:
    /// gopLength is required for video flows (frame-to-GoP mapping) and
    /// ignored for ftp.
    FlowMetrics(std::uint32_t flowId, PacketKind kind, int gopLength = 0);

    void onGopStart(std::int64_t gopIndex, int qp);
    void onFrameEmitted(std::int64_t absoluteFrame, FrameType type,
                        std::int32_t packetsInFrame);
    void onPacketSent(const Packet& pkt, SimTime now);
    void onPacketDropped(const Packet& pkt);
    void onPacketDelivered(const Packet& pkt, SimTime now);

    std::uint32_t flowId() const { return m_flowId; }
    PacketKind kind() const { return m_kind; }

    std::int64_t packetsSent() const { return m_packetsSent; }
    std::int64_t packetsDelivered() const { return m_packetsDelivered; }
    std::int64_t packetsDropped() const { return m_packetsDropped; }
    std::int64_t payloadBitsSent() const { return m_payloadBitsSent; }
    std::int64_t wireBitsSent() const { return m_wireBitsSent; }
    std::int64_t payloadBitsDelivered() const { return m_payloadBitsDelivered; }
    std::int64_t wireBitsDelivered() const { return m_wireBitsDelivered; }

    double lossRatio() const;
    double meanDelayUs() const;
    std::int64_t delaySamples() const { return m_delayCount; }
    double delayP50Us() const { return m_delayP50.value(); }
    double delayP95Us() const { return m_delayP95.value(); }

    std::int64_t framesEmitted() const;
    const std::vector<GopStat>& gops() const { return m_gops; }
    const std::vector<FrameRecord>& frames() const { return m_frames; }

    /// Wire bits released by the sender, binned into tumbling 1 s windows.
    const std::vector<std::int64_t>& sentBitsPerSecond() const {
        return m_sentBitsPerSecond;
    }

    /// Reference-chain decode walk over the delivery record.
    DecodabilityResult decodability(int gopLength) const;

private:
    FrameRecord& frameSlot(std::int64_t absoluteFrame);

    std::uint32_t m_flowId;
    PacketKind m_kind;
    int m_gopLength;

    std::int64_t m_packetsSent = 0;
    std::int64_t m_packetsDelivered = 0;
    std::int64_t m_packetsDropped = 0;
    std::int64_t m_payloadBitsSent = 0;
    std::int64_t m_wireBitsSent = 0;
    std::int64_t m_payloadBitsDelivered = 0;
    std::int64_t m_wireBitsDelivered = 0;

    double m_delaySumUs = 0.0;
    std::int64_t m_delayCount = 0;
    P2Quantile m_delayP50;
    P2Quantile m_delayP95;

    std::vector<FrameRecord> m_frames;  // indexed by absolute frame
    std::vector<GopStat> m_gops;        // indexed by GoP index
    std::vector<std::int64_t> m_sentBitsPerSecond;
};

/// True iff enough of the stream decodes: decodable-frame ratio >= theta
/// (boundary inclusive) and at least one complete GoP decodes.
bool sessionDecoded(const DecodabilityResult& dec, int gopLength,
                    double theta);

/// MOS proxy on [1, 4.5]: clamp(1 + 3.5 * D * R).  D is the
/// decodable-frame ratio; R grades the delivered-bit-weighted mean
/// variant rate against the ladder extremes on a log scale.  A session
/// that did not decode scores 1.
double mosScore(const FlowMetrics& metrics, const DecodabilityResult& dec,
                const VariantLadder& ladder, bool decoded);

/// Fraction of link capacity used by delivered wire bits.
double utilization(std::int64_t deliveredWireBits, BitRate capacity,
                   SimTime duration);

/// Coefficient of variation of per-second sent rate over
/// [warmupSeconds, endSeconds) bins; empty when fewer than two bins or
/// a zero mean make it meaningless.
std::optional<double> rateCov(const std::vector<std::int64_t>& bins,
                              std::int64_t warmupSeconds,
                              std::int64_t endSeconds);

/// Sorted empirical CDF over per-run values, as (value, cum_fraction)
/// rows with duplicates collapsed.  Rejects empty input.
std::vector<std::pair<double, double>> aggregateCdf(
    std::vector<double> values);

/// One row of the per-run summary CSV.
struct FlowSummary {
    std::uint32_t flow = 0;
    PacketKind kind = PacketKind::Video;
    bool admitted = false;
    bool decoded = false;
    double mos = 1.0;
    double meanDelayMs = 0.0;
    double lossRatio = 0.0;
    std::int64_t deliveredBits = 0;
};

std::string summaryCsvHeader();
std::string summaryCsvRow(const FlowSummary& row);

double median(std::vector<double> values);  // empty input rejected

}  // namespace qoesim

#endif  // QOESIM_METRICS_HPP
