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

#ifndef QOESIM_ADMISSION_HPP
#define QOESIM_ADMISSION_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qoesim/trace.hpp"
#include "qoesim/units.hpp"

namespace qoesim {

/// Coefficients of the beta model: beta = alpha + C_l / (delta * n),
/// with C_l expressed in Mbps. The coefficients are content-dependent.
struct BetaCoefficients {
    double alpha = 0.0;
    double delta = 1.0;
};

enum class BetaMode {
    ExperimentalConstant,  // a configured constant in (0, 1]
    Modeled,               // alpha + C_l / (delta * n)
};

/// Two readings of the headroom term epsilon:
///   Literal:    beta * mu_s * (n-1)/n      (the published form)
///   PerSession: beta * (mu_s/n) * (n-1)/n  (headroom on the per-session mean)
/// The literal form makes the aggregate estimate grow with n roughly as
/// mu_s * (1 + beta*(n-1)), which starves admission at realistic loads;
/// both are kept selectable and neither is rewritten into the other.
enum class EpsilonMode { Literal, PerSession };

struct SessionRecord {
    std::uint32_t sessionId = 0;
    double measuredRateBps = 0.0;      // x_i(t), sliding-window estimate
    double activityProbability = 1.0;  // p_i(t) in [0, 1]
    int admittedQp = kQpMin;
};

struct AdmissionDecision {
    bool accepted = false;
    int qp = 0;
    BitRate rate;  // accepted x_new (rung nominal rate)
};

/// One row of the per-decision audit log.
struct AdmissionAudit {
    std::int64_t timeUs = 0;
    std::uint32_t sessionId = 0;
    std::size_t nBefore = 0;
    double muSBps = 0.0;
    double beta = 0.0;
    double epsilonBps = 0.0;
    double proIaarBps = 0.0;
    std::vector<std::int64_t> triedRatesBps;
    bool accepted = false;
    int acceptedQp = 0;
};

/// Gateway-side view of the admission controller: the active video
/// sessions, their measured rates, and the beta/epsilon configuration.
class AdmissionState {
public:
    AdmissionState(BitRate linkCapacity, BetaMode betaMode, double betaConstant,
                   BetaCoefficients coefficients, EpsilonMode epsilonMode);

    BitRate linkCapacity() const { return m_linkCapacity; }
    EpsilonMode epsilonMode() const { return m_epsilonMode; }
    BetaMode betaMode() const { return m_betaMode; }
    std::size_t sessionCount() const { return m_sessions.size(); }
    const std::vector<SessionRecord>& sessions() const { return m_sessions; }

    void addSession(SessionRecord record);
    void updateMeasurement(std::uint32_t sessionId, double windowRateBps);
    void release(std::uint32_t sessionId);

    /// Hook invoked when the modeled beta leaves (0, 1] and is clamped.
    void setClampWarning(std::function<void(double)> warn) {
        m_clampWarning = std::move(warn);
    }
    const std::function<void(double)>& clampWarning() const {
        return m_clampWarning;
    }

private:
    BitRate m_linkCapacity;
    BetaMode m_betaMode;
    double m_betaConstant;
    BetaCoefficients m_coefficients;
    EpsilonMode m_epsilonMode;
    std::vector<SessionRecord> m_sessions;
    std::function<void(double)> m_clampWarning;

    friend double beta(const AdmissionState& state);
};

/// Expected total aggregate rate: sum of x_i(t) * p_i(t) over sessions.
double muS(const AdmissionState& state);

/// Upper-limit factor in (0, 1]. Modeled mode requires n >= 1; a value
/// outside (0, 1] is clamped and reported through the warning hook.
double beta(const AdmissionState& state);

/// Hoeffding headroom term; requires n >= 1. Zero when n == 1.
double epsilon(const AdmissionState& state, double muSBps, double betaValue);

/// QoE-aware aggregate rate estimate: mu_s + n * epsilon (0 when n == 0).
double proIaar(const AdmissionState& state);

/// Admission decision for one new session: walks the ladder from qp 2
/// (highest rate) downward and accepts at the first rung whose rate fits
/// proIaar + x_new <= C_l; rejects when no rung fits. On acceptance the
/// session is recorded with the rung rate as its initial measurement and
/// `activityProbability` as its p_i. `audit`, when non-null, receives the
/// full decision record.
AdmissionDecision admit(AdmissionState& state, const VariantLadder& ladder,
                        std::uint32_t sessionId, std::int64_t timeUs,
                        AdmissionAudit* audit = nullptr,
                        double activityProbability = 1.0);

/// CSV serialization of audit rows (header + one line per decision).
std::string admissionAuditHeader();
std::string admissionAuditRow(const AdmissionAudit& audit);

}  // namespace qoesim

#endif  // QOESIM_ADMISSION_HPP
