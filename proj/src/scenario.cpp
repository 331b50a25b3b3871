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

#include "qoesim/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace qoesim {

namespace {

using nlohmann::json;

/// Collects violations with field paths while pulling typed values.
class Reader {
public:
    Reader(const json& j, std::string prefix, std::vector<std::string>& errors)
        : m_json(j), m_prefix(std::move(prefix)), m_errors(errors) {}

    bool has(const char* key) const { return m_json.contains(key); }

    double num(const char* key, double fallback) {
        if (!m_json.contains(key)) {
            return fallback;
        }
        if (!m_json[key].is_number()) {
            fail(key, "must be a number");
            return fallback;
        }
        return m_json[key].get<double>();
    }

    std::int64_t integer(const char* key, std::int64_t fallback) {
        if (!m_json.contains(key)) {
            return fallback;
        }
        if (!m_json[key].is_number_integer()) {
            fail(key, "must be an integer");
            return fallback;
        }
        return m_json[key].get<std::int64_t>();
    }

    std::string str(const char* key, const std::string& fallback) {
        if (!m_json.contains(key)) {
            return fallback;
        }
        if (!m_json[key].is_string()) {
            fail(key, "must be a string");
            return fallback;
        }
        return m_json[key].get<std::string>();
    }

    void fail(const char* key, const std::string& what) {
        m_errors.push_back(m_prefix + key + ": " + what);
    }

    const json& raw() const { return m_json; }

private:
    const json& m_json;
    std::string m_prefix;
    std::vector<std::string>& m_errors;
};

std::optional<Resolution> parseResolution(const std::string& name) {
    if (name == "cif") {
        return Resolution::CIF;
    }
    if (name == "qcif") {
        return Resolution::QCIF;
    }
    return std::nullopt;
}

SimTime timeField(Reader& r, const char* key, SimTime fallback) {
    const std::int64_t us = r.integer(key, fallback.us());
    if (us < 0) {
        r.fail(key, "must be >= 0 microseconds");
        return fallback;
    }
    return SimTime::micros(us);
}

}  // namespace

const char* architectureName(Architecture arch) {
    switch (arch) {
        case Architecture::NonAdaptive: return "non_adaptive";
        case Architecture::Adaptive: return "adaptive";
        case Architecture::CrossLayer: return "cross_layer";
    }
    return "?";
}

std::optional<Architecture> parseArchitecture(const std::string& name) {
    if (name == "non_adaptive") {
        return Architecture::NonAdaptive;
    }
    if (name == "adaptive") {
        return Architecture::Adaptive;
    }
    if (name == "cross_layer") {
        return Architecture::CrossLayer;
    }
    return std::nullopt;
}

ArrivalPolicyKind ArrivalConfig::effectiveKind(Architecture arch) const {
    if (kind) {
        return *kind;
    }
    return arch == Architecture::CrossLayer ? ArrivalPolicyKind::PerSecondRandom
                                            : ArrivalPolicyKind::UniformWindow;
}

SimTime ScenarioConfig::effectiveCovWarmup() const {
    if (covWarmup) {
        return *covWarmup;
    }
    return SimTime::micros(duration.us() / 2);
}

int ScenarioConfig::effectiveQueuePackets() const {
    if (link.queuePackets > 0) {
        return static_cast<int>(link.queuePackets);
    }
    return content.resolution == Resolution::CIF ? 300 : 100;
}

ConfigResult parseConfig(const json& j) {
    ConfigResult result;
    std::vector<std::string>& errors = result.errors;
    ScenarioConfig cfg;

    if (!j.is_object()) {
        errors.emplace_back(": top level must be a JSON object");
        return result;
    }

    Reader root(j, "", errors);
    cfg.name = root.str("name", cfg.name);

    {
        const std::string arch = root.str("architecture", "adaptive");
        if (auto parsed = parseArchitecture(arch)) {
            cfg.architecture = *parsed;
        } else {
            root.fail("architecture",
                      "must be one of non_adaptive, adaptive, cross_layer");
        }
    }

    if (root.has("content")) {
        if (!j["content"].is_object()) {
            root.fail("content", "must be an object");
        } else {
            Reader r(j["content"], "content.", errors);
            cfg.content.name = r.str("name", "synthetic");
            const std::string res = r.str("resolution", "cif");
            if (auto parsed = parseResolution(res)) {
                cfg.content.resolution = *parsed;
            } else {
                r.fail("resolution", "must be cif or qcif");
            }
            cfg.content.frameRate =
                static_cast<int>(r.integer("frame_rate", 30));
            cfg.content.gopLength =
                static_cast<int>(r.integer("gop_length", 30));
            cfg.content.durationFrames =
                static_cast<int>(r.integer("duration_frames", 900));
            const std::int64_t base =
                r.integer("base_rate_qp2_bps",
                          cfg.content.baseRateQp2.bitsPerSecond() > 0
                              ? cfg.content.baseRateQp2.bitsPerSecond()
                              : 2000000);
            if (base <= 0) {
                r.fail("base_rate_qp2_bps", "must be > 0");
            } else {
                cfg.content.baseRateQp2 = BitRate::bps(base);
            }
            cfg.content.burstiness = r.num("burstiness", 0.3);
            cfg.content.iToPRatio = r.num("i_to_p_ratio", 5.0);
            cfg.content.gamma = r.num("gamma", 1.0);
            if (r.has("trace_manifest")) {
                cfg.traceManifest = r.str("trace_manifest", "");
            }
        }
    } else {
        root.fail("content", "is required (profile of the encoded source)");
    }

    if (cfg.content.baseRateQp2.bitsPerSecond() <= 0) {
        cfg.content.baseRateQp2 = BitRate::bps(2000000);
    }
    try {
        cfg.content.validate();
    } catch (const SimError& e) {
        errors.push_back(std::string("content: ") + e.what());
    }

    if (root.has("link")) {
        Reader r(j["link"], "link.", errors);
        const std::int64_t cap =
            r.integer("capacity_bps", cfg.link.capacity.bitsPerSecond());
        if (cap <= 0) {
            r.fail("capacity_bps", "must be > 0");
        } else {
            cfg.link.capacity = BitRate::bps(cap);
        }
        cfg.link.propagation =
            timeField(r, "propagation_delay_us", cfg.link.propagation);
        const std::int64_t queue = r.integer("queue_packets", 0);
        if (queue < 0) {
            r.fail("queue_packets", "must be >= 0 (0 = resolution default)");
        } else {
            cfg.link.queuePackets = static_cast<std::size_t>(queue);
        }
        cfg.link.ecnThreshold = r.num("ecn_threshold", cfg.link.ecnThreshold);
        if (cfg.link.ecnThreshold < 0.0 || cfg.link.ecnThreshold > 1.0) {
            r.fail("ecn_threshold", "must lie in [0,1]");
        }
    }

    if (root.has("packet")) {
        Reader r(j["packet"], "packet.", errors);
        cfg.packet.sizeBytes = r.integer("size_bytes", cfg.packet.sizeBytes);
        cfg.packet.headerBytes =
            r.integer("header_bytes", cfg.packet.headerBytes);
        if (cfg.packet.headerBytes < 0 ||
            cfg.packet.sizeBytes <= cfg.packet.headerBytes) {
            r.fail("size_bytes", "payload must be positive after headers");
        }
    }

    if (root.has("sources")) {
        Reader r(j["sources"], "sources.", errors);
        cfg.nVideo = static_cast<int>(r.integer("n_video", cfg.nVideo));
        cfg.nFtp = static_cast<int>(r.integer("n_ftp", cfg.nFtp));
    }
    if (cfg.nVideo < 1 || cfg.nVideo > 100) {
        errors.emplace_back("sources.n_video: must lie in [1,100]");
    }
    if (cfg.nFtp < 0 || cfg.nFtp > 100) {
        errors.emplace_back("sources.n_ftp: must lie in [0,100]");
    }

    if (root.has("admission")) {
        Reader r(j["admission"], "admission.", errors);
        const std::string mode = r.str("beta_mode", "experimental_constant");
        if (mode == "experimental_constant") {
            cfg.admission.betaMode = BetaMode::ExperimentalConstant;
        } else if (mode == "modeled") {
            cfg.admission.betaMode = BetaMode::Modeled;
        } else {
            r.fail("beta_mode", "must be experimental_constant or modeled");
        }
        cfg.admission.betaConstant =
            r.num("beta", cfg.admission.betaConstant);
        cfg.admission.coefficients.alpha =
            r.num("alpha", cfg.admission.coefficients.alpha);
        cfg.admission.coefficients.delta =
            r.num("delta", cfg.admission.coefficients.delta);
        const std::string eps = r.str("epsilon_mode", "per_session");
        if (eps == "literal") {
            cfg.admission.epsilonMode = EpsilonMode::Literal;
        } else if (eps == "per_session") {
            cfg.admission.epsilonMode = EpsilonMode::PerSession;
        } else {
            r.fail("epsilon_mode", "must be literal or per_session");
        }
        cfg.admission.measurementWindow = timeField(
            r, "measurement_window_us", cfg.admission.measurementWindow);
        if (cfg.admission.measurementWindow.us() <= 0) {
            r.fail("measurement_window_us", "must be > 0");
        }
        cfg.admission.activityProbability =
            r.num("activity_probability", cfg.admission.activityProbability);
        if (cfg.admission.activityProbability < 0.0 ||
            cfg.admission.activityProbability > 1.0) {
            r.fail("activity_probability", "must lie in [0,1]");
        }
    }

    const bool needsAdmission = cfg.architecture == Architecture::CrossLayer;
    if (needsAdmission &&
        cfg.admission.betaMode == BetaMode::ExperimentalConstant) {
        if (cfg.admission.betaConstant <= 0.0 ||
            cfg.admission.betaConstant > 1.0) {
            errors.emplace_back("admission.beta: β must lie in (0,1]");
        }
    }
    if (needsAdmission && cfg.admission.betaMode == BetaMode::Modeled) {
        if (cfg.admission.coefficients.delta <= 0.0) {
            errors.emplace_back("admission.delta: must be > 0");
        }
    }

    if (root.has("controller")) {
        Reader r(j["controller"], "controller.", errors);
        cfg.controller.downStep =
            static_cast<int>(r.integer("down_step", cfg.controller.downStep));
        cfg.controller.quietIntervals = static_cast<int>(
            r.integer("quiet_intervals", cfg.controller.quietIntervals));
        cfg.controller.bucketDepthGops =
            r.num("bucket_depth_gops", cfg.controller.bucketDepthGops);
        cfg.controller.bucketDrainFactor =
            r.num("bucket_drain_factor", cfg.controller.bucketDrainFactor);
        cfg.controller.feedbackInterval = timeField(
            r, "feedback_interval_us", cfg.controller.feedbackInterval);
    }
    if (cfg.controller.downStep < 1) {
        errors.emplace_back("controller.down_step: must be >= 1");
    }
    if (cfg.controller.quietIntervals < 1) {
        errors.emplace_back("controller.quiet_intervals: must be >= 1");
    }
    if (cfg.controller.bucketDepthGops <= 0.0) {
        errors.emplace_back("controller.bucket_depth_gops: must be > 0");
    }
    if (cfg.controller.bucketDrainFactor < 1.0) {
        errors.emplace_back("controller.bucket_drain_factor: must be >= 1");
    }
    if (cfg.controller.feedbackInterval.us() <= 0) {
        errors.emplace_back("controller.feedback_interval_us: must be > 0");
    }

    if (root.has("ftp")) {
        Reader r(j["ftp"], "ftp.", errors);
        cfg.ftp.initialCwnd = r.num("initial_cwnd", cfg.ftp.initialCwnd);
        cfg.ftp.initialSsthresh =
            r.num("initial_ssthresh", cfg.ftp.initialSsthresh);
        cfg.ftp.maxCwnd = r.num("max_cwnd", cfg.ftp.maxCwnd);
        if (r.raw().contains("start_window_us")) {
            const json& win = r.raw()["start_window_us"];
            if (!win.is_array() || win.size() != 2 ||
                !win[0].is_number_integer() || !win[1].is_number_integer()) {
                r.fail("start_window_us", "must be [begin_us, end_us]");
            } else {
                cfg.ftp.startWindowBegin =
                    SimTime::micros(win[0].get<std::int64_t>());
                cfg.ftp.startWindowEnd =
                    SimTime::micros(win[1].get<std::int64_t>());
            }
        }
    }
    if (cfg.ftp.initialCwnd < 1.0) {
        errors.emplace_back("ftp.initial_cwnd: must be >= 1");
    }
    if (cfg.ftp.startWindowEnd < cfg.ftp.startWindowBegin) {
        errors.emplace_back("ftp.start_window_us: begin must be <= end");
    }

    if (root.has("arrivals")) {
        Reader r(j["arrivals"], "arrivals.", errors);
        if (r.has("policy")) {
            const std::string policy = r.str("policy", "");
            if (policy == "uniform_window") {
                cfg.arrivals.kind = ArrivalPolicyKind::UniformWindow;
            } else if (policy == "per_second_random") {
                cfg.arrivals.kind = ArrivalPolicyKind::PerSecondRandom;
            } else {
                r.fail("policy",
                       "must be uniform_window or per_second_random");
            }
        }
        if (r.raw().contains("window_us")) {
            const json& win = r.raw()["window_us"];
            if (!win.is_array() || win.size() != 2 ||
                !win[0].is_number_integer() || !win[1].is_number_integer()) {
                r.fail("window_us", "must be [begin_us, end_us]");
            } else {
                cfg.arrivals.windowBegin =
                    SimTime::micros(win[0].get<std::int64_t>());
                cfg.arrivals.windowEnd =
                    SimTime::micros(win[1].get<std::int64_t>());
            }
        }
        cfg.arrivals.maxSessions = static_cast<int>(
            r.integer("max_sessions", cfg.arrivals.maxSessions));
    }
    if (cfg.arrivals.windowEnd < cfg.arrivals.windowBegin) {
        errors.emplace_back("arrivals.window_us: begin must be <= end");
    }
    if (cfg.arrivals.maxSessions < 0) {
        errors.emplace_back("arrivals.max_sessions: must be >= 0");
    }
    if (cfg.arrivals.maxSessions == 0) {
        cfg.arrivals.maxSessions = cfg.nVideo;
    }

    {
        const std::int64_t us = root.integer("duration_us", cfg.duration.us());
        if (us <= 0) {
            root.fail("duration_us", "must be > 0");
        } else {
            cfg.duration = SimTime::micros(us);
        }
    }

    cfg.theta = root.num("theta", cfg.theta);
    if (cfg.theta <= 0.0 || cfg.theta > 1.0) {
        root.fail("theta", "must lie in (0,1]");
    }

    if (root.has("cov_warmup_us")) {
        const std::int64_t us = root.integer("cov_warmup_us", 0);
        if (us < 0 || us >= cfg.duration.us()) {
            root.fail("cov_warmup_us", "must lie in [0, duration)");
        } else {
            cfg.covWarmup = SimTime::micros(us);
        }
    }

    if (root.has("seeds")) {
        const json& seeds = j["seeds"];
        if (!seeds.is_array()) {
            root.fail("seeds", "must be an array of integers");
        } else {
            std::set<std::uint64_t> seen;
            for (const json& s : seeds) {
                if (!s.is_number_integer() || s.get<std::int64_t>() < 0) {
                    root.fail("seeds", "entries must be non-negative integers");
                    break;
                }
                const auto seed = s.get<std::uint64_t>();
                if (!seen.insert(seed).second) {
                    root.fail("seeds",
                              "duplicate seed " + std::to_string(seed));
                }
                cfg.seeds.push_back(seed);
            }
        }
    }

    if (errors.empty()) {
        result.config = std::move(cfg);
    }
    return result;
}

ConfigResult loadConfig(const std::string& path) {
    ConfigResult result;
    std::ifstream in(path);
    if (!in) {
        result.errors.push_back("cannot open config file: " + path);
        return result;
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        result.errors.push_back(std::string("config parse error: ") +
                                e.what());
        return result;
    }
    return parseConfig(j);
}

nlohmann::json toJson(const ScenarioConfig& cfg) {
    json j;
    j["name"] = cfg.name;
    j["architecture"] = architectureName(cfg.architecture);

    json content;
    content["name"] = cfg.content.name;
    content["resolution"] =
        cfg.content.resolution == Resolution::CIF ? "cif" : "qcif";
    content["frame_rate"] = cfg.content.frameRate;
    content["gop_length"] = cfg.content.gopLength;
    content["duration_frames"] = cfg.content.durationFrames;
    content["base_rate_qp2_bps"] = cfg.content.baseRateQp2.bitsPerSecond();
    content["burstiness"] = cfg.content.burstiness;
    content["i_to_p_ratio"] = cfg.content.iToPRatio;
    content["gamma"] = cfg.content.gamma;
    if (cfg.traceManifest) {
        content["trace_manifest"] = *cfg.traceManifest;
    }
    j["content"] = content;

    json link;
    link["capacity_bps"] = cfg.link.capacity.bitsPerSecond();
    link["propagation_delay_us"] = cfg.link.propagation.us();
    link["queue_packets"] = cfg.effectiveQueuePackets();
    link["ecn_threshold"] = cfg.link.ecnThreshold;
    j["link"] = link;

    json packet;
    packet["size_bytes"] = cfg.packet.sizeBytes;
    packet["header_bytes"] = cfg.packet.headerBytes;
    j["packet"] = packet;

    json sources;
    sources["n_video"] = cfg.nVideo;
    sources["n_ftp"] = cfg.nFtp;
    j["sources"] = sources;

    json admission;
    admission["beta_mode"] =
        cfg.admission.betaMode == BetaMode::ExperimentalConstant
            ? "experimental_constant"
            : "modeled";
    admission["beta"] = cfg.admission.betaConstant;
    admission["alpha"] = cfg.admission.coefficients.alpha;
    admission["delta"] = cfg.admission.coefficients.delta;
    admission["epsilon_mode"] =
        cfg.admission.epsilonMode == EpsilonMode::Literal ? "literal"
                                                          : "per_session";
    admission["measurement_window_us"] = cfg.admission.measurementWindow.us();
    admission["activity_probability"] = cfg.admission.activityProbability;
    j["admission"] = admission;

    json controller;
    controller["down_step"] = cfg.controller.downStep;
    controller["quiet_intervals"] = cfg.controller.quietIntervals;
    controller["bucket_depth_gops"] = cfg.controller.bucketDepthGops;
    controller["bucket_drain_factor"] = cfg.controller.bucketDrainFactor;
    controller["feedback_interval_us"] = cfg.controller.feedbackInterval.us();
    j["controller"] = controller;

    json ftp;
    ftp["initial_cwnd"] = cfg.ftp.initialCwnd;
    ftp["initial_ssthresh"] = cfg.ftp.initialSsthresh;
    ftp["max_cwnd"] = cfg.ftp.maxCwnd;
    ftp["start_window_us"] = {cfg.ftp.startWindowBegin.us(),
                              cfg.ftp.startWindowEnd.us()};
    j["ftp"] = ftp;

    json arrivals;
    arrivals["policy"] =
        cfg.arrivals.effectiveKind(cfg.architecture) ==
                ArrivalPolicyKind::UniformWindow
            ? "uniform_window"
            : "per_second_random";
    arrivals["window_us"] = {cfg.arrivals.windowBegin.us(),
                             cfg.arrivals.windowEnd.us()};
    arrivals["max_sessions"] = cfg.arrivals.maxSessions;
    j["arrivals"] = arrivals;

    j["duration_us"] = cfg.duration.us();
    j["theta"] = cfg.theta;
    j["cov_warmup_us"] = cfg.effectiveCovWarmup().us();
    j["seeds"] = cfg.seeds;
    return j;
}

std::uint64_t configHash(const ScenarioConfig& cfg) {
    const std::string dump = toJson(cfg).dump();
    std::uint64_t hash = 1469598103934665603ull;  // FNV offset basis
    for (unsigned char c : dump) {
        hash ^= c;
        hash *= 1099511628211ull;  // FNV prime
    }
    return hash;
}

}  // namespace qoesim
