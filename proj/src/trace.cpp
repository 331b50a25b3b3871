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

#include "qoesim/trace.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qoesim {

const char* resolutionName(Resolution r) {
    return r == Resolution::CIF ? "CIF" : "QCIF";
}

const char* frameTypeName(FrameType t) {
    return t == FrameType::I ? "I" : "P";
}

void ContentProfile::validate() const {
    if (name.empty()) throw SimError("content profile needs a name");
    if (frameRate <= 0) throw SimError("frame_rate must be positive");
    if (gopLength <= 0) throw SimError("gop_length must be positive");
    if (durationFrames < gopLength) {
        throw SimError("duration_frames must cover at least one GoP");
    }
    if (baseRateQp2.bitsPerSecond() <= 0) {
        throw SimError("base_rate_qp2 must be positive");
    }
    if (burstiness < 0.0) throw SimError("burstiness must be non-negative");
    if (iToPRatio < 1.0) throw SimError("i_to_p_ratio must be >= 1");
    if (gamma <= 0.0) throw SimError("gamma must be positive");
}

std::int64_t VideoTrace::totalBytes() const {
    std::int64_t total = 0;
    for (const auto& f : frames) total += f.sizeBytes;
    return total;
}

double VideoTrace::meanRateBps() const {
    double durationSec = static_cast<double>(frames.size()) / frameRate;
    return static_cast<double>(totalBytes()) * 8.0 / durationSec;
}

VariantLadder::VariantLadder(ContentProfile profile,
                             std::vector<VideoTrace> variants)
    : m_profile(std::move(profile)), m_variants(std::move(variants)) {
    if (m_variants.size() != static_cast<std::size_t>(kLadderRungs)) {
        throw SimError("ladder must hold exactly 30 variants");
    }
    m_nominalRates.reserve(m_variants.size());
    double prev = -1.0;
    for (int qp = kQpMin; qp <= kQpMax; ++qp) {
        const VideoTrace& t = m_variants[static_cast<std::size_t>(qp - kQpMin)];
        if (t.qp != qp) throw SimError("ladder variants out of order");
        double rate = t.meanRateBps();
        if (prev >= 0.0 && rate >= prev) {
            throw SimError("ladder mean rate must strictly decrease with QP");
        }
        prev = rate;
        m_nominalRates.push_back(BitRate::bps(std::llround(rate)));
    }
}

const VideoTrace& VariantLadder::variant(int qp) const {
    if (qp < kQpMin || qp > kQpMax) throw SimError("QP out of range 2..31");
    return m_variants[static_cast<std::size_t>(qp - kQpMin)];
}

BitRate VariantLadder::nominalRate(int qp) const {
    if (qp < kQpMin || qp > kQpMax) throw SimError("QP out of range 2..31");
    return m_nominalRates[static_cast<std::size_t>(qp - kQpMin)];
}

namespace {

// Lognormal multiplier with mean 1 and coefficient of variation cv,
// clamped to [0.25, 4] of the mean.
double sizeNoise(Pcg32& rng, double cv) {
    if (cv <= 0.0) return 1.0;
    double sigma2 = std::log(1.0 + cv * cv);
    double sigma = std::sqrt(sigma2);
    double factor = std::exp(-0.5 * sigma2 + sigma * rng.normal());
    return std::clamp(factor, 0.25, 4.0);
}

VideoTrace synthesizeVariant(const ContentProfile& profile, int qp, Pcg32& rng) {
    VideoTrace trace;
    trace.qp = qp;
    trace.frameRate = profile.frameRate;
    trace.gopLength = profile.gopLength;
    trace.frames.reserve(static_cast<std::size_t>(profile.durationFrames));

    double nominalBps = static_cast<double>(profile.baseRateQp2.bitsPerSecond()) *
                        std::pow(2.0 / qp, profile.gamma);
    double meanFrameBits = nominalBps / profile.frameRate;
    double pMeanBits = meanFrameBits * profile.gopLength /
                       (profile.iToPRatio + profile.gopLength - 1);
    double iMeanBits = profile.iToPRatio * pMeanBits;

    for (int f = 0; f < profile.durationFrames; ++f) {
        bool isI = (f % profile.gopLength) == 0;
        double meanBits = isI ? iMeanBits : pMeanBits;
        double bits = meanBits * sizeNoise(rng, profile.burstiness);
        TraceFrame frame;
        frame.index = f;
        frame.type = isI ? FrameType::I : FrameType::P;
        frame.sizeBytes = std::max<std::int64_t>(1, std::llround(bits / 8.0));
        trace.frames.push_back(frame);
    }

    // Normalize so the realized mean rate equals the rate model exactly
    // (up to byte rounding); ladder monotonicity then holds by construction.
    double targetBytes = nominalBps * profile.durationFrames /
                         (profile.frameRate * 8.0);
    double scale = targetBytes / static_cast<double>(trace.totalBytes());
    for (auto& frame : trace.frames) {
        frame.sizeBytes = std::max<std::int64_t>(
            1, std::llround(static_cast<double>(frame.sizeBytes) * scale));
    }
    return trace;
}

}  // namespace

VariantLadder generateLadder(const ContentProfile& profile, Pcg32 rng) {
    profile.validate();
    std::vector<VideoTrace> variants;
    variants.reserve(kLadderRungs);
    for (int qp = kQpMin; qp <= kQpMax; ++qp) {
        variants.push_back(synthesizeVariant(profile, qp, rng));
    }
    return VariantLadder(profile, std::move(variants));
}

std::int64_t absoluteFrameAt(const VideoTrace& trace, SimTime sessionElapsed) {
    // floor(elapsed_s * fps) in exact integer arithmetic
    return sessionElapsed.us() * trace.frameRate / 1000000;
}

const TraceFrame& frameAt(const VideoTrace& trace, SimTime sessionElapsed) {
    std::int64_t abs = absoluteFrameAt(trace, sessionElapsed);
    std::int64_t idx = abs % static_cast<std::int64_t>(trace.frames.size());
    return trace.frames[static_cast<std::size_t>(idx)];
}

SimTime frameEmitOffset(int frameRate, std::int64_t absoluteFrame) {
    std::int64_t num = absoluteFrame * 1000000;
    return SimTime::micros((num + frameRate - 1) / frameRate);
}

std::vector<PacketSplit> packetize(std::int64_t frameSizeBytes,
                                   std::int64_t packetSizeBytes,
                                   std::int64_t headerBytes) {
    if (packetSizeBytes <= headerBytes) {
        throw SimError("packet size must exceed header size");
    }
    std::vector<PacketSplit> packets;
    if (frameSizeBytes <= 0) return packets;

    std::int64_t capacity = packetSizeBytes - headerBytes;
    std::int64_t remaining = frameSizeBytes;
    while (remaining > 0) {
        PacketSplit p;
        p.payloadBytes = std::min(remaining, capacity);
        p.wireBytes = p.payloadBytes + headerBytes;
        packets.push_back(p);
        remaining -= p.payloadBytes;
    }
    return packets;
}

void exportLadder(const VariantLadder& ladder, const std::string& directory) {
    namespace fs = std::filesystem;
    fs::create_directories(directory);

    nlohmann::json manifest;
    const ContentProfile& profile = ladder.profile();
    manifest["content"] = profile.name;
    manifest["resolution"] = resolutionName(profile.resolution);
    manifest["frame_rate"] = profile.frameRate;
    manifest["gop_length"] = profile.gopLength;

    nlohmann::json files = nlohmann::json::object();
    for (int qp = kQpMin; qp <= kQpMax; ++qp) {
        std::string filename = "trace_qp" + std::to_string(qp) + ".csv";
        std::ofstream out(fs::path(directory) / filename);
        if (!out) throw SimError("cannot write trace file " + filename);
        out << "frame_index,frame_type,size_bytes\n";
        for (const auto& f : ladder.variant(qp).frames) {
            out << f.index << ',' << frameTypeName(f.type) << ',' << f.sizeBytes
                << '\n';
        }
        files[std::to_string(qp)] = filename;
    }
    manifest["traces"] = files;

    std::ofstream out(fs::path(directory) / "ladder_manifest.json");
    if (!out) throw SimError("cannot write ladder manifest");
    out << manifest.dump(2) << '\n';
}

VariantLadder importLadder(const std::string& manifestPath) {
    namespace fs = std::filesystem;
    std::ifstream in(manifestPath);
    if (!in) throw SimError("cannot read ladder manifest " + manifestPath);
    nlohmann::json manifest = nlohmann::json::parse(in);

    ContentProfile profile;
    profile.name = manifest.at("content").get<std::string>();
    std::string res = manifest.value("resolution", "CIF");
    profile.resolution = (res == "QCIF") ? Resolution::QCIF : Resolution::CIF;
    profile.frameRate = manifest.at("frame_rate").get<int>();
    profile.gopLength = manifest.at("gop_length").get<int>();

    fs::path base = fs::path(manifestPath).parent_path();
    std::vector<VideoTrace> variants;
    for (int qp = kQpMin; qp <= kQpMax; ++qp) {
        const auto& files = manifest.at("traces");
        std::string filename = files.at(std::to_string(qp)).get<std::string>();
        std::ifstream csv(base / filename);
        if (!csv) throw SimError("cannot read trace file " + filename);

        VideoTrace trace;
        trace.qp = qp;
        trace.frameRate = profile.frameRate;
        trace.gopLength = profile.gopLength;

        std::string line;
        std::getline(csv, line);  // header
        while (std::getline(csv, line)) {
            if (line.empty()) continue;
            std::istringstream row(line);
            std::string indexField;
            std::string typeField;
            std::string sizeField;
            std::getline(row, indexField, ',');
            std::getline(row, typeField, ',');
            std::getline(row, sizeField, ',');
            TraceFrame frame;
            frame.index = static_cast<std::int32_t>(std::stol(indexField));
            frame.type = (typeField == "I") ? FrameType::I : FrameType::P;
            frame.sizeBytes = std::stoll(sizeField);
            if (frame.sizeBytes <= 0) throw SimError("trace frame size must be > 0");
            trace.frames.push_back(frame);
        }
        if (trace.frames.empty()) throw SimError("empty trace " + filename);
        variants.push_back(std::move(trace));
    }
    profile.durationFrames = static_cast<int>(variants.front().frames.size());
    profile.baseRateQp2 =
        BitRate::bps(std::llround(variants.front().meanRateBps()));
    return VariantLadder(std::move(profile), std::move(variants));
}

}  // namespace qoesim
