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

#ifndef QOESIM_RATECONTROL_HPP
#define QOESIM_RATECONTROL_HPP

#include <cstdint>
#include <functional>
#include <optional>

#include "qoesim/packet.hpp"
#include "qoesim/trace.hpp"
#include "qoesim/units.hpp"

namespace qoesim {

enum class AdaptMode : std::uint8_t { NonAdaptive, Adaptive };

/// Why a QP transition was recorded.
enum class QpTrigger : std::uint8_t { Ecn, Loss, Quiet, GopApply };

const char* qpTriggerName(QpTrigger trigger);

/// Sender-side variant selector.  Feedback reports steer a pending QP;
/// the pending value is applied only at GoP boundaries, so every frame
/// of a GoP is emitted from exactly one variant.
///
/// Adaptive policy: a report with an ECN mark or losses requests a
/// one-rung downgrade (towards QP 31); `quietIntervals` consecutive
/// clean reports request a one-rung upgrade (towards QP 2).
/// Non-adaptive mode pins the initial QP forever.
class RateController {
public:
    using TimelineFn = std::function<void(QpTrigger, int oldQp, int newQp)>;

    RateController(AdaptMode mode, int initialQp, int downStep = 1,
                   int quietIntervals = 3);

    void onFeedback(const FeedbackReport& report);

    /// Applies any pending change; returns the QP for the next GoP.
    int onGopBoundary();

    int currentQp() const { return m_currentQp; }
    std::optional<int> pendingQp() const { return m_pendingQp; }
    AdaptMode mode() const { return m_mode; }

    /// Observes transitions; invoked only when the QP value changes.
    void setTimeline(TimelineFn fn) { m_timeline = std::move(fn); }

private:
    AdaptMode m_mode;
    int m_currentQp;
    std::optional<int> m_pendingQp;
    int m_downStep;
    int m_quietIntervals;
    int m_quietCount = 0;
    TimelineFn m_timeline;
};

/// Token-accounted shaper: releases are never earlier than arrivals,
/// never out of order, and over any long window the released wire-bit
/// rate cannot exceed the drain rate (plus one bucket depth of burst).
/// Packets are only delayed, never dropped.
class LeakyBucket {
public:
    LeakyBucket();

    /// Reconfigures at a GoP boundary for the new variant.  Accumulated
    /// credit is kept but capped at the new depth.
    void configure(double drainBps, double depthBits);

    /// Earliest admissible release instant for `wireBits` arriving at
    /// `arrival`; commits the bits to the schedule.
    SimTime shape(SimTime arrival, std::int64_t wireBits);

    double drainBps() const { return m_drainBps; }
    double depthBits() const { return m_depthBits; }
    /// Bits of burst credit currently available.
    double creditBits() const { return m_credit; }
    SimTime lastRelease() const { return m_lastRelease; }

private:
    double m_drainBps = 0.0;
    double m_depthBits = 0.0;
    double m_credit = 0.0;
    SimTime m_lastUpdate;
    SimTime m_lastRelease;
    bool m_configured = false;
};

}  // namespace qoesim

#endif  // QOESIM_RATECONTROL_HPP
