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

#ifndef QOESIM_SCENARIO_HPP
#define QOESIM_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qoesim/admission.hpp"
#include "qoesim/ratecontrol.hpp"
#include "qoesim/trace.hpp"
#include "qoesim/units.hpp"

namespace qoesim {

enum class Architecture : std::uint8_t { NonAdaptive, Adaptive, CrossLayer };

const char* architectureName(Architecture arch);
std::optional<Architecture> parseArchitecture(const std::string& name);

enum class ArrivalPolicyKind : std::uint8_t { UniformWindow, PerSecondRandom };

struct LinkConfig {
    BitRate capacity = BitRate::bps(7000000);
    SimTime propagation = SimTime::micros(1000);
    /// 0 means "fill from the resolution default" (cif 300, qcif 100).
    std::size_t queuePackets = 0;
    double ecnThreshold = 0.8;
};

struct PacketConfig {
    std::int64_t sizeBytes = 1052;   // wire size incl. headers
    std::int64_t headerBytes = 28;   // UDP 8 + IP 20
    std::int64_t payloadBytes() const { return sizeBytes - headerBytes; }
};

struct AdmissionConfig {
    BetaMode betaMode = BetaMode::ExperimentalConstant;
    double betaConstant = 0.78;
    BetaCoefficients coefficients{-0.54, 0.96};
    EpsilonMode epsilonMode = EpsilonMode::PerSession;
    SimTime measurementWindow = SimTime::seconds(1);
    double activityProbability = 1.0;
};

struct ControllerConfig {
    int downStep = 1;
    int quietIntervals = 3;
    double bucketDepthGops = 1.0;
    double bucketDrainFactor = 1.2;
    SimTime feedbackInterval = SimTime::millis(100);
};

struct FtpConfig {
    double initialCwnd = 2.0;
    double initialSsthresh = 64.0;
    double maxCwnd = 0.0;  // <= 0: unbounded
    SimTime startWindowBegin = SimTime::micros(0);
    SimTime startWindowEnd = SimTime::seconds(20);
};

struct ArrivalConfig {
    /// Filled from the architecture when unset: cross_layer requests a
    /// session within every second; the others start everything inside
    /// a uniform window.
    std::optional<ArrivalPolicyKind> kind;
    SimTime windowBegin = SimTime::seconds(20);
    SimTime windowEnd = SimTime::seconds(50);
    /// 0 means "same as n_video".
    int maxSessions = 0;

    ArrivalPolicyKind effectiveKind(Architecture arch) const;
};

struct ScenarioConfig {
    std::string name = "scenario";
    Architecture architecture = Architecture::Adaptive;
    ContentProfile content;
    std::optional<std::string> traceManifest;
    LinkConfig link;
    PacketConfig packet;
    int nVideo = 24;
    int nFtp = 48;
    AdmissionConfig admission;
    ControllerConfig controller;
    FtpConfig ftp;
    ArrivalConfig arrivals;
    SimTime duration = SimTime::seconds(500);
    double theta = 0.75;
    /// Seconds discarded at the front of per-second rate series before
    /// computing smoothness statistics; defaults to duration/2.
    std::optional<SimTime> covWarmup;
    std::vector<std::uint64_t> seeds;

    SimTime effectiveCovWarmup() const;
    int effectiveQueuePackets() const;  // resolution default applied
};

struct ConfigResult {
    std::optional<ScenarioConfig> config;
    std::vector<std::string> errors;
    bool ok() const { return errors.empty() && config.has_value(); }
};

/// Parses + validates + fills defaults.  Every violation is reported
/// with its field path; a config is returned only when error-free.
ConfigResult parseConfig(const nlohmann::json& j);
ConfigResult loadConfig(const std::string& path);

/// Fully resolved form, suitable for the effective-config echo.
nlohmann::json toJson(const ScenarioConfig& config);

/// FNV-1a over the canonical serialized form.
std::uint64_t configHash(const ScenarioConfig& config);

}  // namespace qoesim

#endif  // QOESIM_SCENARIO_HPP
