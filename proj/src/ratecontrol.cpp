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

#include "qoesim/ratecontrol.hpp"

#include <algorithm>
#include <cmath>

namespace qoesim {

const char* qpTriggerName(QpTrigger trigger) {
    switch (trigger) {
        case QpTrigger::Ecn: return "ecn";
        case QpTrigger::Loss: return "loss";
        case QpTrigger::Quiet: return "quiet";
        case QpTrigger::GopApply: return "gop_apply";
    }
    return "?";
}

RateController::RateController(AdaptMode mode, int initialQp, int downStep,
                               int quietIntervals)
    : m_mode(mode),
      m_currentQp(initialQp),
      m_downStep(downStep),
      m_quietIntervals(quietIntervals) {
    if (initialQp < kQpMin || initialQp > kQpMax) {
        throw SimError("initial qp outside ladder");
    }
    if (downStep < 1) {
        throw SimError("down step must be >= 1");
    }
    if (quietIntervals < 1) {
        throw SimError("quiet interval count must be >= 1");
    }
}

void RateController::onFeedback(const FeedbackReport& report) {
    if (m_mode == AdaptMode::NonAdaptive) {
        return;
    }
    const bool congested = report.ecnSeen || report.lossEvents > 0;
    if (congested) {
        m_quietCount = 0;
        const int target = std::min(m_currentQp + m_downStep, kQpMax);
        if (target != m_currentQp) {
            m_pendingQp = target;
            if (m_timeline) {
                m_timeline(report.ecnSeen ? QpTrigger::Ecn : QpTrigger::Loss,
                           m_currentQp, target);
            }
        }
        return;
    }
    ++m_quietCount;
    if (m_quietCount >= m_quietIntervals) {
        m_quietCount = 0;
        const int target = std::max(m_currentQp - 1, kQpMin);
        if (target != m_currentQp) {
            m_pendingQp = target;
            if (m_timeline) {
                m_timeline(QpTrigger::Quiet, m_currentQp, target);
            }
        }
    }
}

int RateController::onGopBoundary() {
    if (m_pendingQp) {
        const int next = *m_pendingQp;
        m_pendingQp.reset();
        if (next != m_currentQp) {
            const int old = m_currentQp;
            m_currentQp = next;
            if (m_timeline) {
                m_timeline(QpTrigger::GopApply, old, next);
            }
        }
    }
    return m_currentQp;
}

LeakyBucket::LeakyBucket() = default;

void LeakyBucket::configure(double drainBps, double depthBits) {
    if (drainBps <= 0.0 || depthBits <= 0.0) {
        throw SimError("leaky bucket needs positive drain and depth");
    }
    if (!m_configured) {
        m_credit = depthBits;  // start with a full burst allowance
        m_configured = true;
    }
    m_drainBps = drainBps;
    m_depthBits = depthBits;
    m_credit = std::min(m_credit, m_depthBits);
}

SimTime LeakyBucket::shape(SimTime arrival, std::int64_t wireBits) {
    if (!m_configured) {
        throw SimError("shape before configure");
    }
    if (wireBits <= 0) {
        throw SimError("shape needs positive size");
    }

    // FIFO: never release before the previous packet.
    SimTime at = std::max(arrival, m_lastRelease);

    auto creditAt = [this](SimTime t) {
        const double gained =
            m_drainBps * static_cast<double>((t - m_lastUpdate).us()) * 1e-6;
        return std::min(m_depthBits, m_credit + gained);
    };

    double available = creditAt(at);
    const double need = static_cast<double>(wireBits);
    if (available < need) {
        const double waitUs = (need - available) * 1e6 / m_drainBps;
        at = at + SimTime::micros(static_cast<std::int64_t>(std::ceil(waitUs)));
        available = creditAt(at);
    }
    m_credit = available - need;
    if (m_credit < 0.0) {
        m_credit = 0.0;  // guard against rounding at the release instant
    }
    m_lastUpdate = at;
    m_lastRelease = at;
    return at;
}

}  // namespace qoesim
