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

#include "qoesim/simulation.hpp"

#include <algorithm>
#include <memory>
#include <ostream>
#include <utility>

#include "qoesim/engine.hpp"
#include "qoesim/format.hpp"
#include "qoesim/ftp.hpp"
#include "qoesim/link.hpp"
#include "qoesim/ratecontrol.hpp"
#include "qoesim/rng.hpp"

namespace qoesim {

namespace {

/// One video flow: sender (controller + shaper + packetizer) and
/// receiver (delivery record + feedback timer) share this object; the
/// event log attributes their actions to distinct entity ids.
class VideoSession {
public:
    VideoSession(SimEngine& engine, BottleneckLink& link,
                 const VariantLadder& ladder, const ScenarioConfig& cfg,
                 std::uint32_t index, FlowMetrics& metrics,
                 std::ostream* qpTimeline)
        : m_engine(engine),
          m_link(link),
          m_ladder(ladder),
          m_cfg(cfg),
          m_flowId(kVideoFlowBase + index),
          m_sourceEntity(kVideoFlowBase + index),
          m_sinkEntity(kVideoSinkBase + index),
          m_metrics(metrics),
          m_qpTimeline(qpTimeline) {}

    bool started() const { return m_started; }
    SimTime startTime() const { return m_startTime; }
    std::uint32_t flowId() const { return m_flowId; }

    void start(SimTime at, int initialQp) {
        if (m_started) {
            throw SimError("video session started twice");
        }
        m_started = true;
        m_startTime = at;

        const AdaptMode mode = m_cfg.architecture == Architecture::NonAdaptive
                                   ? AdaptMode::NonAdaptive
                                   : AdaptMode::Adaptive;
        m_controller = std::make_unique<RateController>(
            mode, initialQp, m_cfg.controller.downStep,
            m_cfg.controller.quietIntervals);
        m_controller->setTimeline(
            [this](QpTrigger trigger, int oldQp, int newQp) {
                if (m_qpTimeline) {
                    *m_qpTimeline << m_engine.now().us() << ',' << m_flowId
                                  << ',' << oldQp << ',' << newQp << ','
                                  << qpTriggerName(trigger) << '\n';
                }
            });

        m_engine.schedule(at, EventKind::GopBoundary, m_sourceEntity,
                          [this] { onGopBoundary(); });
        m_engine.schedule(at + m_cfg.controller.feedbackInterval,
                          EventKind::FeedbackReport, m_sinkEntity,
                          [this] { onFeedbackTimer(); });
    }

    /// Receiver side, invoked from the link's delivery routing.
    void onPacketDelivered(const Packet& pkt) {
        m_metrics.onPacketDelivered(pkt, m_engine.now());
        if (pkt.seq > m_highestSeq + 1) {
            m_intervalLoss += pkt.seq - m_highestSeq - 1;
        }
        if (pkt.seq > m_highestSeq) {
            m_highestSeq = pkt.seq;
        }
        if (pkt.ecnMarked) {
            m_intervalEcn = true;
        }
        m_lastDelay = m_engine.now() - pkt.enqueueTime;
    }

private:
    void onGopBoundary() {
        const std::int64_t gopIdx = m_nextGop++;
        const int qp = m_controller->onGopBoundary();
        m_metrics.onGopStart(gopIdx, qp);

        const VideoTrace& trace = m_ladder.variant(qp);
        const auto nominal =
            static_cast<double>(m_ladder.nominalRate(qp).bitsPerSecond());
        const double gopSeconds =
            static_cast<double>(m_cfg.content.gopLength) /
            static_cast<double>(m_cfg.content.frameRate);
        m_bucket.configure(
            m_cfg.controller.bucketDrainFactor * nominal,
            m_cfg.controller.bucketDepthGops * nominal * gopSeconds);

        const int gop = m_cfg.content.gopLength;
        const int fps = m_cfg.content.frameRate;
        const auto traceLen = static_cast<std::int64_t>(trace.frames.size());

        for (int k = 0; k < gop; ++k) {
            const std::int64_t absFrame =
                gopIdx * static_cast<std::int64_t>(gop) + k;
            const SimTime emit =
                m_startTime + frameEmitOffset(fps, absFrame);
            const TraceFrame& frame =
                trace.frames[static_cast<std::size_t>(absFrame % traceLen)];
            const std::vector<PacketSplit> splits =
                packetize(frame.sizeBytes, m_cfg.packet.sizeBytes,
                          m_cfg.packet.headerBytes);
            const auto inFrame = static_cast<std::int32_t>(splits.size());
            for (std::int32_t p = 0; p < inFrame; ++p) {
                const SimTime release =
                    m_bucket.shape(emit, splits[p].wireBytes * 8);
                Packet pkt;
                pkt.flowId = m_flowId;
                pkt.seq = m_nextSeq++;
                pkt.kind = PacketKind::Video;
                pkt.payloadBytes = splits[p].payloadBytes;
                pkt.wireBytes = splits[p].wireBytes;
                pkt.frameType = frame.type;
                pkt.absoluteFrame = absFrame;
                pkt.packetIndexInFrame = p;
                pkt.packetsInFrame = inFrame;
                m_engine.schedule(
                    release, EventKind::PacketArrival, m_sourceEntity,
                    [this, pkt, first = p == 0]() mutable {
                        if (first) {
                            m_metrics.onFrameEmitted(pkt.absoluteFrame,
                                                     pkt.frameType,
                                                     pkt.packetsInFrame);
                        }
                        pkt.sendTime = m_engine.now();
                        m_metrics.onPacketSent(pkt, m_engine.now());
                        m_link.enqueue(pkt);
                    });
            }
        }

        const SimTime next =
            m_startTime +
            frameEmitOffset(fps, (gopIdx + 1) * static_cast<std::int64_t>(gop));
        m_engine.schedule(next, EventKind::GopBoundary, m_sourceEntity,
                          [this] { onGopBoundary(); });
    }

    void onFeedbackTimer() {
        FeedbackReport report;
        report.ecnSeen = m_intervalEcn;
        report.lossEvents = m_intervalLoss;
        report.rttSample = m_lastDelay + m_link.propagationDelay();
        m_intervalEcn = false;
        m_intervalLoss = 0;

        // Reverse path: uncongested, one propagation delay.
        m_engine.schedule(m_engine.now() + m_link.propagationDelay(),
                          EventKind::FeedbackReport, m_sourceEntity,
                          [this, report] { m_controller->onFeedback(report); });
        m_engine.schedule(m_engine.now() + m_cfg.controller.feedbackInterval,
                          EventKind::FeedbackReport, m_sinkEntity,
                          [this] { onFeedbackTimer(); });
    }

    SimEngine& m_engine;
    BottleneckLink& m_link;
    const VariantLadder& m_ladder;
    const ScenarioConfig& m_cfg;
    std::uint32_t m_flowId;
    std::uint32_t m_sourceEntity;
    std::uint32_t m_sinkEntity;
    FlowMetrics& m_metrics;
    std::ostream* m_qpTimeline;

    std::unique_ptr<RateController> m_controller;
    LeakyBucket m_bucket;
    bool m_started = false;
    SimTime m_startTime;
    std::int64_t m_nextGop = 0;
    std::int64_t m_nextSeq = 0;

    // Receiver state.
    std::int64_t m_highestSeq = -1;
    bool m_intervalEcn = false;
    std::int64_t m_intervalLoss = 0;
    SimTime m_lastDelay;
};

SimTime drawUniformTime(Pcg32& rng, SimTime begin, SimTime end) {
    const double u = rng.nextDouble();
    const auto span = static_cast<double>((end - begin).us());
    return begin + SimTime::micros(static_cast<std::int64_t>(u * span));
}

}  // namespace

RunResult runScenario(const ScenarioConfig& cfg, std::uint64_t seed,
                      const RunOutputs& out) {
    RunResult result;
    result.architecture = cfg.architecture;
    result.seed = seed;
    result.configHashValue = configHash(cfg);

    SimEngine engine;
    if (out.events) {
        engine.setEventLog([&out](std::int64_t timeUs, std::uint64_t sequence,
                                  EventKind kind, std::uint32_t entity) {
            *out.events << timeUs << ',' << sequence << ','
                        << eventKindName(kind) << ',' << entity << '\n';
        });
    }

    const VariantLadder ladder =
        cfg.traceManifest
            ? importLadder(*cfg.traceManifest)
            : generateLadder(cfg.content,
                             Pcg32(seed, rng_stream::kTraceLadder));

    BottleneckLink link(engine, kEntityLink, cfg.link.capacity,
                        cfg.link.propagation,
                        static_cast<std::size_t>(cfg.effectiveQueuePackets()),
                        cfg.link.ecnThreshold);
    if (out.packets) {
        *out.packets << "time_us,flow,seq,event,occupancy,wire_bytes,ecn\n";
        link.setPacketLog([&out](SimTime t, const Packet& pkt, PacketEvent ev,
                                 std::size_t occupancy) {
            *out.packets << t.us() << ',' << pkt.flowId << ',' << pkt.seq
                         << ',' << packetEventName(ev) << ',' << occupancy
                         << ',' << pkt.wireBytes << ','
                         << (pkt.ecnMarked ? 1 : 0) << '\n';
        });
    }

    const auto nVideo = static_cast<std::size_t>(cfg.nVideo);
    const auto nFtp = static_cast<std::size_t>(cfg.nFtp);

    std::vector<std::unique_ptr<FlowMetrics>> videoMetrics;
    videoMetrics.reserve(nVideo);
    std::vector<std::unique_ptr<VideoSession>> sessions;
    sessions.reserve(nVideo);
    for (std::size_t i = 0; i < nVideo; ++i) {
        videoMetrics.push_back(std::make_unique<FlowMetrics>(
            kVideoFlowBase + static_cast<std::uint32_t>(i), PacketKind::Video,
            cfg.content.gopLength));
        sessions.push_back(std::make_unique<VideoSession>(
            engine, link, ladder, cfg, static_cast<std::uint32_t>(i),
            *videoMetrics.back(), out.qpTimeline));
    }

    std::vector<std::unique_ptr<FlowMetrics>> ftpMetrics;
    ftpMetrics.reserve(nFtp);
    std::vector<std::unique_ptr<FtpSource>> ftpSources;
    ftpSources.reserve(nFtp);
    FtpParams ftpParams;
    ftpParams.packetPayloadBytes = cfg.packet.payloadBytes();
    ftpParams.headerBytes = cfg.packet.headerBytes;
    ftpParams.initialCwnd = cfg.ftp.initialCwnd;
    ftpParams.initialSsthresh = cfg.ftp.initialSsthresh;
    ftpParams.maxCwnd = cfg.ftp.maxCwnd;
    std::vector<SimTime> ftpStartTimes(nFtp);
    for (std::size_t j = 0; j < nFtp; ++j) {
        const auto flowId = kFtpFlowBase + static_cast<std::uint32_t>(j);
        ftpMetrics.push_back(
            std::make_unique<FlowMetrics>(flowId, PacketKind::Ftp));
        ftpSources.push_back(std::make_unique<FtpSource>(
            engine, link, flowId, flowId, ftpParams));
        FlowMetrics& metrics = *ftpMetrics.back();
        ftpSources.back()->setSendHook(
            [&metrics, &engine](const Packet& pkt) {
                metrics.onPacketSent(pkt, engine.now());
            });
        Pcg32 rng(seed, rng_stream::kFtpSourceBase + j);
        ftpStartTimes[j] = drawUniformTime(rng, cfg.ftp.startWindowBegin,
                                           cfg.ftp.startWindowEnd);
        ftpSources.back()->start(ftpStartTimes[j]);
    }

    // Run-level video delay sketches.
    P2Quantile videoDelayP50(0.5);
    P2Quantile videoDelayP95(0.95);

    link.setSinkEntity([](const Packet& pkt) {
        if (pkt.kind == PacketKind::Video) {
            return kVideoSinkBase + (pkt.flowId - kVideoFlowBase);
        }
        return kFtpSinkBase + (pkt.flowId - kFtpFlowBase);
    });
    link.setDeliver([&](const Packet& pkt) {
        if (pkt.kind == PacketKind::Video) {
            const std::size_t i = pkt.flowId - kVideoFlowBase;
            sessions[i]->onPacketDelivered(pkt);
            const double delayUs =
                static_cast<double>((engine.now() - pkt.enqueueTime).us());
            videoDelayP50.add(delayUs);
            videoDelayP95.add(delayUs);
            return;
        }
        const std::size_t j = pkt.flowId - kFtpFlowBase;
        ftpMetrics[j]->onPacketDelivered(pkt, engine.now());
        FtpSource& src = *ftpSources[j];
        engine.schedule(engine.now() + link.propagationDelay(),
                        EventKind::FeedbackReport, src.entityId(),
                        [&src, pkt, &engine] { src.onAck(pkt, engine.now()); });
    });
    link.setDrop([&](const Packet& pkt) {
        if (pkt.kind == PacketKind::Video) {
            videoMetrics[pkt.flowId - kVideoFlowBase]->onPacketDropped(pkt);
            return;
        }
        const std::size_t j = pkt.flowId - kFtpFlowBase;
        ftpMetrics[j]->onPacketDropped(pkt);
        FtpSource& src = *ftpSources[j];
        // Drop notice reaches the sender one (estimated) RTT later.
        engine.schedule(engine.now() + src.smoothedRtt(),
                        EventKind::FeedbackReport, src.entityId(),
                        [&src] { src.onLossReport(); });
    });

    // --- Gateway: arrivals and (cross-layer only) admission control. ---
    std::optional<AdmissionState> admissionState;
    if (cfg.architecture == Architecture::CrossLayer) {
        admissionState.emplace(cfg.link.capacity, cfg.admission.betaMode,
                               cfg.admission.betaConstant,
                               cfg.admission.coefficients,
                               cfg.admission.epsilonMode);
        admissionState->setClampWarning(
            [&result](double) { ++result.betaClampWarnings; });
    }
    if (out.admission) {
        *out.admission << admissionAuditHeader() << '\n';
    }

    std::size_t startedCount = 0;
    std::uint32_t nextRequestId = 1;
    std::vector<std::uint32_t> admissionIdOfSlot;

    auto startSession = [&](int initialQp) {
        sessions[startedCount]->start(engine.now(), initialQp);
        ++startedCount;
        ++result.sessionsAdmitted;
    };
    auto handleRequest = [&] {
        if (startedCount >= nVideo) {
            return;  // source pool exhausted
        }
        if (static_cast<int>(startedCount) >= cfg.arrivals.maxSessions) {
            return;  // competing-session cap; not an admission attempt
        }
        ++result.sessionsRequested;
        if (!admissionState) {
            startSession(kQpMin);
            return;
        }
        AdmissionAudit audit;
        const std::uint32_t requestId = nextRequestId++;
        const AdmissionDecision decision =
            admit(*admissionState, ladder, requestId, engine.now().us(), &audit,
                  cfg.admission.activityProbability);
        result.admissionAudits.push_back(audit);
        if (out.admission) {
            *out.admission << admissionAuditRow(audit) << '\n';
        }
        if (decision.accepted) {
            admissionIdOfSlot.push_back(requestId);
            startSession(decision.qp);
        }
    };

    Pcg32 arrivalsRng(seed, rng_stream::kArrivals);
    if (cfg.arrivals.effectiveKind(cfg.architecture) ==
        ArrivalPolicyKind::UniformWindow) {
        for (std::size_t i = 0; i < nVideo; ++i) {
            const SimTime at = drawUniformTime(
                arrivalsRng, cfg.arrivals.windowBegin, cfg.arrivals.windowEnd);
            engine.schedule(at, EventKind::SessionRequest, kEntityGateway,
                            handleRequest);
        }
    } else {
        const std::int64_t seconds = cfg.duration.us() / 1000000;
        for (std::int64_t s = 0; s < seconds; ++s) {
            const std::int64_t offset = static_cast<std::int64_t>(
                arrivalsRng.nextDouble() * 1e6);
            const SimTime at = SimTime::micros(s * 1000000 + offset);
            engine.schedule(at, EventKind::SessionRequest, kEntityGateway,
                            handleRequest);
        }
    }

    // Sliding measurement of per-session sending rates feeding x_i(t).
    if (admissionState) {
        const std::int64_t windowUs = cfg.admission.measurementWindow.us();
        std::vector<std::int64_t> lastSeenBits(nVideo, 0);
        auto lastSeen =
            std::make_shared<std::vector<std::int64_t>>(std::move(lastSeenBits));
        for (std::int64_t t = windowUs; t <= cfg.duration.us();
             t += windowUs) {
            engine.schedule(
                SimTime::micros(t), EventKind::MeasurementTick, kEntityGateway,
                [&, lastSeen, windowUs] {
                    for (std::size_t i = 0; i < startedCount; ++i) {
                        const std::int64_t bits =
                            videoMetrics[i]->payloadBitsSent();
                        const std::int64_t delta = bits - (*lastSeen)[i];
                        (*lastSeen)[i] = bits;
                        const double rate = static_cast<double>(delta) * 1e6 /
                                            static_cast<double>(windowUs);
                        admissionState->updateMeasurement(admissionIdOfSlot[i],
                                                          rate);
                    }
                });
        }
    }

    engine.schedule(cfg.duration, EventKind::SimEnd, kEntityEngine, [] {});
    engine.runUntil(cfg.duration);
    result.eventsProcessed = engine.processedCount();

    // --- Results. ---
    result.queueCapacity = link.queue().capacity();
    result.maxQueueOccupancy = link.queue().maxOccupancySeen();
    result.utilization =
        utilization(link.deliveredWireBits(), cfg.link.capacity, cfg.duration);
    result.videoDelayP50Ms = videoDelayP50.value() / 1000.0;
    result.videoDelayP95Ms = videoDelayP95.value() / 1000.0;

    const std::map<std::uint32_t, std::int64_t> residualByFlow =
        link.residualPacketsByFlow();
    auto residual = [&residualByFlow](std::uint32_t flow) {
        const auto it = residualByFlow.find(flow);
        return it == residualByFlow.end() ? std::int64_t{0} : it->second;
    };
    auto checkConservation = [&](const FlowMetrics& m) {
        const std::int64_t balance = m.packetsDelivered() +
                                     m.packetsDropped() + residual(m.flowId());
        if (balance != m.packetsSent()) {
            ++result.conservationViolations;
        }
    };

    const std::int64_t durationSeconds = cfg.duration.us() / 1000000;
    const std::int64_t warmupSeconds =
        cfg.effectiveCovWarmup().us() / 1000000;

    double mosSum = 0.0;
    int mosCount = 0;
    double delaySum = 0.0;
    int delayCount = 0;
    double lossSum = 0.0;
    int lossCount = 0;

    for (std::size_t i = 0; i < nVideo; ++i) {
        const FlowMetrics& m = *videoMetrics[i];
        const VideoSession& session = *sessions[i];
        FlowSummary row;
        row.flow = m.flowId();
        row.kind = PacketKind::Video;
        row.admitted = session.started();
        if (session.started()) {
            const DecodabilityResult dec =
                m.decodability(cfg.content.gopLength);
            row.decoded = sessionDecoded(dec, cfg.content.gopLength, cfg.theta);
            row.mos = mosScore(m, dec, ladder, row.decoded);
            row.meanDelayMs = m.meanDelayUs() / 1000.0;
            row.lossRatio = m.lossRatio();
            row.deliveredBits = m.wireBitsDelivered();

            if (row.decoded) {
                ++result.sessionsDecoded;
            }
            mosSum += row.mos;
            ++mosCount;
            if (m.delaySamples() > 0) {
                delaySum += row.meanDelayMs;
                ++delayCount;
            }
            if (m.packetsSent() > 0) {
                lossSum += row.lossRatio;
                ++lossCount;
            }
            result.videoPacketsSent += m.packetsSent();

            const std::int64_t startSecond =
                session.startTime().us() / 1000000;
            const auto cov =
                rateCov(m.sentBitsPerSecond(),
                        std::max(warmupSeconds, startSecond + 1),
                        durationSeconds);
            if (cov) {
                result.videoCovs.push_back(*cov);
            }
            checkConservation(m);
        }
        result.flows.push_back(row);
    }

    for (std::size_t j = 0; j < nFtp; ++j) {
        const FlowMetrics& m = *ftpMetrics[j];
        FlowSummary row;
        row.flow = m.flowId();
        row.kind = PacketKind::Ftp;
        row.admitted = true;
        row.decoded = false;
        row.mos = 1.0;
        row.meanDelayMs = m.meanDelayUs() / 1000.0;
        row.lossRatio = m.lossRatio();
        row.deliveredBits = m.wireBitsDelivered();
        result.flows.push_back(row);

        const std::int64_t startSecond = ftpStartTimes[j].us() / 1000000;
        const auto cov = rateCov(m.sentBitsPerSecond(),
                                 std::max(warmupSeconds, startSecond + 1),
                                 durationSeconds);
        if (cov) {
            result.ftpCovs.push_back(*cov);
        }
        checkConservation(m);
    }

    if (mosCount > 0) {
        result.meanVideoMos = mosSum / mosCount;
    }
    if (delayCount > 0) {
        result.meanVideoDelayMs = delaySum / delayCount;
    }
    if (lossCount > 0) {
        result.meanVideoLossRatio = lossSum / lossCount;
    }
    if (!result.videoCovs.empty()) {
        result.medianVideoCov = median(result.videoCovs);
    }
    if (!result.ftpCovs.empty()) {
        result.medianFtpCov = median(result.ftpCovs);
    }
    if (result.maxQueueOccupancy > result.queueCapacity) {
        ++result.conservationViolations;
    }
    return result;
}

std::string runSummaryCsv(const RunResult& result) {
    std::string csv = summaryCsvHeader();
    csv += '\n';
    for (const FlowSummary& row : result.flows) {
        csv += summaryCsvRow(row);
        csv += '\n';
    }
    return csv;
}

nlohmann::json runStatsJson(const RunResult& result) {
    nlohmann::json j;
    j["architecture"] = architectureName(result.architecture);
    j["seed"] = result.seed;
    j["config_hash"] = result.configHashValue;
    j["sessions_requested"] = result.sessionsRequested;
    j["sessions_admitted"] = result.sessionsAdmitted;
    j["sessions_decoded"] = result.sessionsDecoded;
    j["utilization"] = result.utilization;
    j["mean_video_mos"] = result.meanVideoMos;
    j["mean_video_delay_ms"] = result.meanVideoDelayMs;
    j["mean_video_loss_ratio"] = result.meanVideoLossRatio;
    j["video_delay_p50_ms"] = result.videoDelayP50Ms;
    j["video_delay_p95_ms"] = result.videoDelayP95Ms;
    j["video_packets_sent"] = result.videoPacketsSent;
    if (result.medianVideoCov) {
        j["median_video_cov"] = *result.medianVideoCov;
    }
    if (result.medianFtpCov) {
        j["median_ftp_cov"] = *result.medianFtpCov;
    }
    j["max_queue_occupancy"] = result.maxQueueOccupancy;
    j["queue_capacity"] = result.queueCapacity;
    j["conservation_violations"] = result.conservationViolations;
    j["beta_clamp_warnings"] = result.betaClampWarnings;
    j["events_processed"] = result.eventsProcessed;
    j["admission_decisions"] = result.admissionAudits.size();
    return j;
}

}  // namespace qoesim
