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

#ifndef QOESIM_SIMULATION_HPP
#define QOESIM_SIMULATION_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qoesim/admission.hpp"
#include "qoesim/metrics.hpp"
#include "qoesim/scenario.hpp"

namespace qoesim {

/// Entity ids used in the event log.  Flow ids of video/ftp sources
/// equal their source entity ids.
constexpr std::uint32_t kEntityEngine = 0;
constexpr std::uint32_t kEntityLink = 1;
constexpr std::uint32_t kEntityGateway = 2;
constexpr std::uint32_t kVideoFlowBase = 100;
constexpr std::uint32_t kVideoSinkBase = 200;
constexpr std::uint32_t kFtpFlowBase = 300;
constexpr std::uint32_t kFtpSinkBase = 400;

/// Optional streams for the audit/debug dumps; null disables a dump.
struct RunOutputs {
    std::ostream* events = nullptr;      // time_us,sequence,kind,entity
    std::ostream* packets = nullptr;     // per-packet queue/link log
    std::ostream* admission = nullptr;   // admission audit CSV
    std::ostream* qpTimeline = nullptr;  // time_us,flow,old_qp,new_qp,trigger
};

struct RunResult {
    Architecture architecture = Architecture::Adaptive;
    std::uint64_t seed = 0;
    std::uint64_t configHashValue = 0;

    std::vector<FlowSummary> flows;  // video pool rows, then ftp rows
    std::vector<AdmissionAudit> admissionAudits;

    int sessionsRequested = 0;
    int sessionsAdmitted = 0;
    int sessionsDecoded = 0;

    double utilization = 0.0;
    double meanVideoMos = 0.0;        // over admitted video sessions
    double meanVideoDelayMs = 0.0;    // over video flows with deliveries
    double meanVideoLossRatio = 0.0;  // over video flows that sent packets
    double videoDelayP50Ms = 0.0;
    double videoDelayP95Ms = 0.0;
    std::int64_t videoPacketsSent = 0;

    std::vector<double> videoCovs;  // per-flow per-second-rate CoV
    std::vector<double> ftpCovs;
    std::optional<double> medianVideoCov;
    std::optional<double> medianFtpCov;

    std::size_t maxQueueOccupancy = 0;
    std::size_t queueCapacity = 0;
    std::int64_t conservationViolations = 0;
    std::int64_t betaClampWarnings = 0;
    std::uint64_t eventsProcessed = 0;
};

/// Builds one engine, wires sources/link/gateway/sinks for the config's
/// architecture, runs to the configured duration and collects results.
RunResult runScenario(const ScenarioConfig& config, std::uint64_t seed,
                      const RunOutputs& outputs = {});

/// Per-run summary CSV (header plus one row per flow).
std::string runSummaryCsv(const RunResult& result);

/// Per-run aggregate statistics as JSON (run_stats.json payload).
nlohmann::json runStatsJson(const RunResult& result);

}  // namespace qoesim

#endif  // QOESIM_SIMULATION_HPP
