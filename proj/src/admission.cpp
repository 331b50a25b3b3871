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

#include "qoesim/admission.hpp"

#include <algorithm>
#include <cstdio>

namespace qoesim {

AdmissionState::AdmissionState(BitRate linkCapacity, BetaMode betaMode,
                               double betaConstant, BetaCoefficients coefficients,
                               EpsilonMode epsilonMode)
    : m_linkCapacity(linkCapacity),
      m_betaMode(betaMode),
      m_betaConstant(betaConstant),
      m_coefficients(coefficients),
      m_epsilonMode(epsilonMode) {
    if (betaMode == BetaMode::ExperimentalConstant &&
        (betaConstant <= 0.0 || betaConstant > 1.0)) {
        throw SimError("experimental beta must lie in (0, 1]");
    }
    if (betaMode == BetaMode::Modeled && coefficients.delta == 0.0) {
        throw SimError("beta model coefficient delta must be non-zero");
    }
}

void AdmissionState::addSession(SessionRecord record) {
    if (record.activityProbability < 0.0 || record.activityProbability > 1.0) {
        throw SimError("activity probability must lie in [0, 1]");
    }
    if (record.measuredRateBps < 0.0) {
        throw SimError("measured rate must be non-negative");
    }
    for (const auto& s : m_sessions) {
        if (s.sessionId == record.sessionId) {
            throw SimError("duplicate session id " + std::to_string(record.sessionId));
        }
    }
    m_sessions.push_back(record);
}

void AdmissionState::updateMeasurement(std::uint32_t sessionId,
                                       double windowRateBps) {
    if (windowRateBps < 0.0) throw SimError("measured rate must be non-negative");
    for (auto& s : m_sessions) {
        if (s.sessionId == sessionId) {
            s.measuredRateBps = windowRateBps;
            return;
        }
    }
    throw SimError("unknown session id " + std::to_string(sessionId));
}

void AdmissionState::release(std::uint32_t sessionId) {
    auto it = std::find_if(m_sessions.begin(), m_sessions.end(),
                           [&](const SessionRecord& s) {
                               return s.sessionId == sessionId;
                           });
    if (it == m_sessions.end()) {
        throw SimError("unknown session id " + std::to_string(sessionId));
    }
    m_sessions.erase(it);
}

double muS(const AdmissionState& state) {
    double sum = 0.0;
    for (const auto& s : state.sessions()) {
        sum += s.measuredRateBps * s.activityProbability;
    }
    return sum;
}

double beta(const AdmissionState& state) {
    if (state.betaMode() == BetaMode::ExperimentalConstant) {
        return state.m_betaConstant;
    }
    std::size_t n = state.sessionCount();
    if (n == 0) throw SimError("modeled beta undefined for n = 0");
    // The model is pinned with the capacity in Mbps.
    double value = state.m_coefficients.alpha +
                   state.linkCapacity().toMbps() /
                       (state.m_coefficients.delta * static_cast<double>(n));
    if (value <= 0.0 || value > 1.0) {
        if (state.clampWarning()) state.clampWarning()(value);
        value = std::clamp(value, 1e-6, 1.0);
    }
    return value;
}

double epsilon(const AdmissionState& state, double muSBps, double betaValue) {
    std::size_t n = state.sessionCount();
    if (n == 0) throw SimError("epsilon undefined for n = 0");
    double dn = static_cast<double>(n);
    double base = (state.epsilonMode() == EpsilonMode::Literal)
                      ? muSBps
                      : muSBps / dn;
    return betaValue * base * (dn - 1.0) / dn;
}

double proIaar(const AdmissionState& state) {
    std::size_t n = state.sessionCount();
    if (n == 0) return 0.0;
    double mu = muS(state);
    double eps = epsilon(state, mu, beta(state));
    return mu + static_cast<double>(n) * eps;
}

AdmissionDecision admit(AdmissionState& state, const VariantLadder& ladder,
                        std::uint32_t sessionId, std::int64_t timeUs,
                        AdmissionAudit* audit, double activityProbability) {
    double load = proIaar(state);
    double capacity = static_cast<double>(state.linkCapacity().bitsPerSecond());

    AdmissionAudit record;
    record.timeUs = timeUs;
    record.sessionId = sessionId;
    record.nBefore = state.sessionCount();
    record.muSBps = muS(state);
    record.proIaarBps = load;
    if (record.nBefore > 0) {
        record.beta = beta(state);
        record.epsilonBps = epsilon(state, record.muSBps, record.beta);
    }

    AdmissionDecision decision;
    for (int qp = kQpMin; qp <= kQpMax; ++qp) {
        BitRate rate = ladder.nominalRate(qp);
        record.triedRatesBps.push_back(rate.bitsPerSecond());
        if (load + static_cast<double>(rate.bitsPerSecond()) <= capacity) {
            decision.accepted = true;
            decision.qp = qp;
            decision.rate = rate;
            break;
        }
    }

    if (decision.accepted) {
        SessionRecord session;
        session.sessionId = sessionId;
        session.measuredRateBps =
            static_cast<double>(decision.rate.bitsPerSecond());
        session.activityProbability = activityProbability;
        session.admittedQp = decision.qp;
        state.addSession(session);
        record.accepted = true;
        record.acceptedQp = decision.qp;
    }
    if (audit) *audit = std::move(record);
    return decision;
}

std::string admissionAuditHeader() {
    return "time,session_id,n_before,mu_s,beta,epsilon,pro_iaar,"
           "x_new_tried_list,decision,accepted_qp";
}

std::string admissionAuditRow(const AdmissionAudit& a) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%lld,%u,%zu,%.9g,%.9g,%.9g,%.9g,",
                  static_cast<long long>(a.timeUs), a.sessionId, a.nBefore,
                  a.muSBps, a.beta, a.epsilonBps, a.proIaarBps);
    std::string row = buf;
    row += '"';
    for (std::size_t i = 0; i < a.triedRatesBps.size(); ++i) {
        if (i > 0) row += ';';
        row += std::to_string(a.triedRatesBps[i]);
    }
    row += '"';
    row += a.accepted ? ",accepted," : ",rejected,";
    row += a.accepted ? std::to_string(a.acceptedQp) : std::string("-");
    return row;
}

}  // namespace qoesim
