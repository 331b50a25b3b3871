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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "qoesim/metrics.hpp"
#include "qoesim/rng.hpp"
#include "qoesim/trace.hpp"

using namespace qoesim;

namespace {

VariantLadder testLadder() {
    ContentProfile p;
    p.name = "unit";
    p.baseRateQp2 = BitRate::mbps(2.0);
    return generateLadder(p, Pcg32(17, rng_stream::kTraceLadder));
}

Packet videoPacket(std::int64_t absoluteFrame, std::int32_t indexInFrame,
                   std::int32_t packetsInFrame, SimTime sendTime,
                   std::int64_t payload = 1024) {
    Packet pkt;
    pkt.flowId = 100;
    pkt.seq = absoluteFrame * 100 + indexInFrame;
    pkt.kind = PacketKind::Video;
    pkt.frameType = FrameType::P;
    pkt.absoluteFrame = absoluteFrame;
    pkt.packetIndexInFrame = indexInFrame;
    pkt.packetsInFrame = packetsInFrame;
    pkt.payloadBytes = payload;
    pkt.wireBytes = payload + 28;
    pkt.sendTime = sendTime;
    pkt.enqueueTime = sendTime;
    return pkt;
}

/// Emits `gops` GoPs of `gopLength` one-packet frames at `qp`, delivering
/// every packet except the frames listed in `lostFrames` (absolute ids).
FlowMetrics simpleSession(int gops, int gopLength, int qp,
                          const std::vector<std::int64_t>& lostFrames) {
    FlowMetrics m(100, PacketKind::Video, gopLength);
    for (int g = 0; g < gops; ++g) {
        m.onGopStart(g, qp);
        for (int f = 0; f < gopLength; ++f) {
            const std::int64_t abs = g * gopLength + f;
            m.onFrameEmitted(abs, f == 0 ? FrameType::I : FrameType::P, 1);
            Packet pkt = videoPacket(abs, 0, 1, SimTime::millis(abs));
            m.onPacketSent(pkt, pkt.sendTime);
            if (std::find(lostFrames.begin(), lostFrames.end(), abs) ==
                lostFrames.end()) {
                m.onPacketDelivered(pkt, pkt.sendTime + SimTime::millis(20));
            } else {
                m.onPacketDropped(pkt);
            }
        }
    }
    return m;
}

}  // namespace

TEST_CASE("a clean session decodes everything") {
    auto m = simpleSession(3, 10, 5, {});
    auto dec = m.decodability(10);
    CHECK(dec.framesEmitted == 30);
    CHECK(dec.framesDecodable == 30);
    CHECK(dec.fullGopsDecodable == 3);
    CHECK(sessionDecoded(dec, 10, 0.75));
    CHECK(m.lossRatio() == doctest::Approx(0.0));
}

TEST_CASE("a lost frame breaks the chain to the end of its gop") {
    // Frame 10 lost in the middle GoP (frames 10..19): 0..9 decode,
    // 10..19 do not, 20..29 decode again.
    auto m = simpleSession(3, 10, 5, {10});
    auto dec = m.decodability(10);
    CHECK(dec.framesEmitted == 30);
    CHECK(dec.framesDecodable == 20);
    CHECK(dec.fullGopsDecodable == 2);

    // Loss mid-GoP: frames before the loss still decode.
    auto m2 = simpleSession(1, 10, 5, {4});
    auto dec2 = m2.decodability(10);
    CHECK(dec2.framesDecodable == 4);  // frames 0..3
    CHECK(dec2.fullGopsDecodable == 0);
}

TEST_CASE("a partially received frame is not decodable") {
    FlowMetrics m(100, PacketKind::Video, 5);
    m.onGopStart(0, 4);
    for (int f = 0; f < 5; ++f) {
        m.onFrameEmitted(f, f == 0 ? FrameType::I : FrameType::P, 2);
        for (int i = 0; i < 2; ++i) {
            Packet pkt = videoPacket(f, i, 2, SimTime::millis(f));
            m.onPacketSent(pkt, pkt.sendTime);
            // Drop the second packet of frame 2 only.
            if (f == 2 && i == 1) {
                m.onPacketDropped(pkt);
            } else {
                m.onPacketDelivered(pkt, pkt.sendTime + SimTime::millis(5));
            }
        }
    }
    auto dec = m.decodability(5);
    CHECK(dec.framesEmitted == 5);
    CHECK(dec.framesDecodable == 2);  // 0 and 1
}

TEST_CASE("session decode thresholds are boundary inclusive") {
    DecodabilityResult dec;
    dec.framesEmitted = 100;
    dec.framesDecodable = 75;
    dec.fullGopsDecodable = 1;
    CHECK(sessionDecoded(dec, 10, 0.75));  // exactly theta
    dec.framesDecodable = 74;
    CHECK_FALSE(sessionDecoded(dec, 10, 0.75));
    // At least one full GoP is required regardless of the ratio.
    dec.framesDecodable = 100;
    dec.fullGopsDecodable = 0;
    CHECK_FALSE(sessionDecoded(dec, 10, 0.75));
    // Nothing emitted: not decoded.
    CHECK_FALSE(sessionDecoded({}, 10, 0.75));
}

TEST_CASE("mos spans 1 to 4.5 across the quality range") {
    auto ladder = testLadder();
    // Perfect delivery at the top rung: D = 1, R = 1, mos = 4.5.
    auto top = simpleSession(3, 10, kQpMin, {});
    CHECK(mosScore(top, top.decodability(10), ladder, true) ==
          doctest::Approx(4.5));
    // Perfect delivery at the bottom rung: R = 0, mos = 1.
    auto bottom = simpleSession(3, 10, kQpMax, {});
    CHECK(mosScore(bottom, bottom.decodability(10), ladder, true) ==
          doctest::Approx(1.0));
    // Not decoded scores exactly 1 regardless of delivery.
    CHECK(mosScore(top, top.decodability(10), ladder, false) ==
          doctest::Approx(1.0));
}

TEST_CASE("mos grows with the delivered rung and with decodability") {
    auto ladder = testLadder();
    auto mid = simpleSession(3, 10, 10, {});
    auto midDec = mid.decodability(10);
    const double mosMid = mosScore(mid, midDec, ladder, true);
    auto high = simpleSession(3, 10, 5, {});
    const double mosHigh = mosScore(high, high.decodability(10), ladder, true);
    CHECK(mosHigh > mosMid);
    CHECK(mosMid > 1.0);
    CHECK(mosHigh < 4.5);

    // Same rung, one ruined GoP: lower D, lower mos.
    auto lossy = simpleSession(3, 10, 5, {10});
    const double mosLossy =
        mosScore(lossy, lossy.decodability(10), ladder, true);
    CHECK(mosLossy < mosHigh);
    CHECK(mosLossy >= 1.0);
}

TEST_CASE("mos r-term weights gop rates by delivered payload bits") {
    auto ladder = testLadder();
    // Two GoPs at different rungs, equal delivered bits: r-bar is the
    // midpoint of the two rung rates in linear space.
    FlowMetrics m(100, PacketKind::Video, 2);
    int gop = 0;
    for (int qp : {2, 31}) {
        m.onGopStart(gop, qp);
        for (int f = 0; f < 2; ++f) {
            const std::int64_t abs = gop * 2 + f;
            m.onFrameEmitted(abs, f == 0 ? FrameType::I : FrameType::P, 1);
            Packet pkt = videoPacket(abs, 0, 1, SimTime::millis(abs));
            m.onPacketSent(pkt, pkt.sendTime);
            m.onPacketDelivered(pkt, pkt.sendTime + SimTime::millis(1));
        }
        ++gop;
    }
    const double rMin =
        static_cast<double>(ladder.nominalRate(31).bitsPerSecond());
    const double rMax =
        static_cast<double>(ladder.nominalRate(2).bitsPerSecond());
    const double rBar = 0.5 * (rMin + rMax);
    const double expectedR = std::log(rBar / rMin) / std::log(rMax / rMin);
    auto dec = m.decodability(2);
    CHECK(mosScore(m, dec, ladder, true) ==
          doctest::Approx(1.0 + 3.5 * expectedR).epsilon(1e-9));
}

TEST_CASE("loss ratio and delay accounting") {
    auto m = simpleSession(2, 10, 5, {3, 7});
    CHECK(m.packetsSent() == 20);
    CHECK(m.packetsDelivered() == 18);
    CHECK(m.packetsDropped() == 2);
    CHECK(m.lossRatio() == doctest::Approx(0.1));
    CHECK(m.meanDelayUs() == doctest::Approx(20000.0));
    CHECK(m.delayP50Us() == doctest::Approx(20000.0));
}

TEST_CASE("per-second sent bins accumulate wire bits by send time") {
    FlowMetrics m(100, PacketKind::Video, 10);
    m.onGopStart(0, 5);
    m.onFrameEmitted(0, FrameType::I, 3);
    for (int i = 0; i < 3; ++i) {
        // Two packets in second 0, one in second 2.
        SimTime at = i < 2 ? SimTime::millis(100 * (i + 1)) : SimTime::millis(2500);
        Packet pkt = videoPacket(0, i, 3, at);
        m.onPacketSent(pkt, at);
    }
    const auto& bins = m.sentBitsPerSecond();
    REQUIRE(bins.size() == 3);
    CHECK(bins[0] == 2 * 1052 * 8);
    CHECK(bins[1] == 0);
    CHECK(bins[2] == 1052 * 8);
}

TEST_CASE("metrics guard their bookkeeping invariants") {
    FlowMetrics m(100, PacketKind::Video, 10);
    CHECK_THROWS_AS(FlowMetrics(1, PacketKind::Video, 0), SimError);
    m.onGopStart(0, 5);
    CHECK_THROWS_AS(m.onGopStart(2, 5), SimError);  // gap in gop indices
    m.onFrameEmitted(0, FrameType::I, 1);
    CHECK_THROWS_AS(m.onFrameEmitted(0, FrameType::I, 1), SimError);
    // A packet for a gop that was never opened is a wiring bug.
    Packet stray = videoPacket(25, 0, 1, SimTime::millis(1));
    CHECK_THROWS_AS(m.onPacketSent(stray, stray.sendTime), SimError);
}

TEST_CASE("ftp metrics skip frame bookkeeping") {
    FlowMetrics m(300, PacketKind::Ftp);
    Packet pkt;
    pkt.flowId = 300;
    pkt.kind = PacketKind::Ftp;
    pkt.payloadBytes = 1024;
    pkt.wireBytes = 1052;
    pkt.sendTime = SimTime::millis(5);
    pkt.enqueueTime = pkt.sendTime;
    m.onPacketSent(pkt, pkt.sendTime);
    m.onPacketDelivered(pkt, pkt.sendTime + SimTime::millis(10));
    CHECK(m.packetsSent() == 1);
    CHECK(m.packetsDelivered() == 1);
    CHECK(m.framesEmitted() == 0);
    CHECK(m.gops().empty());
}

TEST_CASE("p2 quantile matches exact quantiles on random data") {
    Pcg32 rng(7, 3);
    std::vector<double> values;
    P2Quantile p50(0.5), p95(0.95);
    for (int i = 0; i < 20000; ++i) {
        double v = rng.uniform(0.0, 1000.0);
        values.push_back(v);
        p50.add(v);
        p95.add(v);
    }
    std::sort(values.begin(), values.end());
    const double exact50 = values[values.size() / 2];
    const double exact95 = values[static_cast<std::size_t>(
        0.95 * static_cast<double>(values.size()))];
    CHECK(p50.value() == doctest::Approx(exact50).epsilon(0.02));
    CHECK(p95.value() == doctest::Approx(exact95).epsilon(0.02));
}

TEST_CASE("p2 quantile is exact for small samples") {
    P2Quantile q(0.5);
    q.add(3.0);
    CHECK(q.value() == doctest::Approx(3.0));
    q.add(1.0);
    q.add(2.0);
    CHECK(q.value() == doctest::Approx(2.0));
}

TEST_CASE("utilization is delivered bits over capacity times time") {
    CHECK(utilization(7000000, BitRate::mbps(7.0), SimTime::seconds(1)) ==
          doctest::Approx(1.0));
    CHECK(utilization(3500000, BitRate::mbps(7.0), SimTime::seconds(1)) ==
          doctest::Approx(0.5));
    CHECK(utilization(0, BitRate::mbps(7.0), SimTime::seconds(1)) ==
          doctest::Approx(0.0));
}

TEST_CASE("rate cov over the analysis window") {
    // Constant rate: cov 0.
    CHECK(*rateCov({100, 100, 100, 100}, 0, 4) == doctest::Approx(0.0));
    // Alternating 50/150: mean 100, population sd 50, cov 0.5.
    CHECK(*rateCov({50, 150, 50, 150}, 0, 4) == doctest::Approx(0.5));
    // Warmup bins are excluded.
    CHECK(*rateCov({999999, 100, 100, 100}, 1, 4) == doctest::Approx(0.0));
    // Degenerate windows yield no value.
    CHECK_FALSE(rateCov({100}, 0, 1).has_value());
    CHECK_FALSE(rateCov({0, 0, 0}, 0, 3).has_value());
    CHECK_FALSE(rateCov({100, 100}, 5, 9).has_value());
}

TEST_CASE("aggregate cdf collapses duplicates and ends at 1") {
    auto cdf = aggregateCdf({2.0, 2.0, 4.0});
    REQUIRE(cdf.size() == 2);
    CHECK(cdf[0].first == doctest::Approx(2.0));
    CHECK(cdf[0].second == doctest::Approx(2.0 / 3.0));
    CHECK(cdf[1].first == doctest::Approx(4.0));
    CHECK(cdf[1].second == doctest::Approx(1.0));
    CHECK_THROWS_AS(aggregateCdf({}), SimError);

    auto single = aggregateCdf({7.5});
    REQUIRE(single.size() == 1);
    CHECK(single[0].second == doctest::Approx(1.0));
}

TEST_CASE("median of odd and even sets") {
    CHECK(median({3.0, 1.0, 2.0}) == doctest::Approx(2.0));
    CHECK(median({4.0, 1.0, 2.0, 3.0}) == doctest::Approx(2.5));
    CHECK_THROWS_AS(median({}), SimError);
}

TEST_CASE("summary csv shape") {
    CHECK(summaryCsvHeader() ==
          "flow,kind,admitted,decoded,mos,mean_delay_ms,loss_ratio,"
          "delivered_bits");
    FlowSummary row;
    row.flow = 100;
    row.kind = PacketKind::Video;
    row.admitted = true;
    row.decoded = true;
    row.mos = 3.25;
    row.meanDelayMs = 12.5;
    row.lossRatio = 0.03125;
    row.deliveredBits = 123456;
    CHECK(summaryCsvRow(row) == "100,video,1,1,3.25,12.5,0.03125,123456");
}
