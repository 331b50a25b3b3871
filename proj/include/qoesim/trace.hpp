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

#ifndef QOESIM_TRACE_HPP
#define QOESIM_TRACE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "qoesim/rng.hpp"
#include "qoesim/units.hpp"

namespace qoesim {

constexpr int kQpMin = 2;
constexpr int kQpMax = 31;
constexpr int kLadderRungs = kQpMax - kQpMin + 1;  // 30 rate variants

enum class Resolution { CIF, QCIF };
enum class FrameType : std::uint8_t { I, P };

const char* resolutionName(Resolution r);
const char* frameTypeName(FrameType t);

/// Synthetic stand-in for one encoded content. The rate model is
///   meanRate(qp) = baseRateQp2 * (2/qp)^gamma
/// and frame sizes follow a lognormal multiplicative noise around the
/// I/P means, clamped to [0.25, 4] times the mean.
struct ContentProfile {
    std::string name;
    Resolution resolution = Resolution::CIF;
    int frameRate = 30;      // frames/s
    int gopLength = 30;      // frames per GoP, frame 0 of each GoP is I
    int durationFrames = 900;
    BitRate baseRateQp2;     // mean encoded rate of the qp=2 variant
    double burstiness = 0.3; // coefficient of per-frame size variation
    double iToPRatio = 5.0;  // mean I size / mean P size, >= 1
    double gamma = 1.0;      // rate-ladder exponent

    void validate() const;
};

struct TraceFrame {
    std::int32_t index = 0;
    FrameType type = FrameType::I;
    std::int64_t sizeBytes = 0;
};

struct VideoTrace {
    int qp = kQpMin;
    int frameRate = 30;
    int gopLength = 30;
    std::vector<TraceFrame> frames;

    std::int64_t totalBytes() const;
    double meanRateBps() const;
};

class VariantLadder {
public:
    VariantLadder(ContentProfile profile, std::vector<VideoTrace> variants);

    const ContentProfile& profile() const { return m_profile; }
    const VideoTrace& variant(int qp) const;
    /// Nominal mean rate of a rung: the scalar the admission walk treats
    /// as the rung's bit rate. Equals the realized trace mean
    /// (bits/duration).
    BitRate nominalRate(int qp) const;
    BitRate highestRate() const { return nominalRate(kQpMin); }
    BitRate lowestRate() const { return nominalRate(kQpMax); }

private:
    ContentProfile m_profile;
    std::vector<VideoTrace> m_variants;   // index 0 -> qp 2
    std::vector<BitRate> m_nominalRates;  // same indexing
};

/// Builds the 30-rung ladder for a profile. Deterministic given
/// (profile, rng state); rngs are taken by value so a ladder build never
/// perturbs the caller's stream.
VariantLadder generateLadder(const ContentProfile& profile, Pcg32 rng);

/// Frame playing at `sessionElapsed` since session start; the trace loops.
const TraceFrame& frameAt(const VideoTrace& trace, SimTime sessionElapsed);

/// Absolute frame counter (not wrapped), for per-GoP bookkeeping across
/// trace loops.
std::int64_t absoluteFrameAt(const VideoTrace& trace, SimTime sessionElapsed);

/// Emission timestamp offset of absolute frame n: ceil(n * 1e6 / fps) us,
/// chosen so absoluteFrameAt(frameEmitTime(n)) == n exactly.
SimTime frameEmitOffset(int frameRate, std::int64_t absoluteFrame);

/// Splits a frame into packet payloads. Wire size of each packet is
/// payload + header bytes; every payload is full-capacity except
/// possibly the last. A zero-size frame yields no packets.
struct PacketSplit {
    std::int64_t payloadBytes = 0;
    std::int64_t wireBytes = 0;
};
std::vector<PacketSplit> packetize(std::int64_t frameSizeBytes,
                                   std::int64_t packetSizeBytes,
                                   std::int64_t headerBytes);

/// Trace file interchange: one CSV per rung with header
/// `frame_index,frame_type,size_bytes`, plus a JSON manifest mapping
/// QP -> filename along with name, fps and GoP length.
void exportLadder(const VariantLadder& ladder, const std::string& directory);
VariantLadder importLadder(const std::string& manifestPath);

}  // namespace qoesim

#endif  // QOESIM_TRACE_HPP
