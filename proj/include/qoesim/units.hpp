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

#ifndef QOESIM_UNITS_HPP
#define QOESIM_UNITS_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace qoesim {

/// Fatal logic error inside the simulation (scheduling into the past,
/// arithmetic overflow, broken invariant). Never caught by the engine.
class SimError : public std::logic_error {
public:
    explicit SimError(const std::string& what) : std::logic_error(what) {}
};

/// Virtual time in integer microseconds. Non-negative, overflow-checked.
class SimTime {
public:
    constexpr SimTime() : m_us(0) {}

    static SimTime micros(std::int64_t us) {
        if (us < 0) throw SimError("SimTime must be non-negative");
        return SimTime(us);
    }
    static SimTime millis(std::int64_t ms) { return micros(mulChecked(ms, 1000)); }
    /// Whole or fractional seconds; fractional values round to the
    /// nearest microsecond.
    template <typename T>
        requires std::is_arithmetic_v<T>
    static SimTime seconds(T s) {
        if constexpr (std::is_integral_v<T>) {
            return micros(mulChecked(static_cast<std::int64_t>(s), 1000000));
        } else {
            return micros(static_cast<std::int64_t>(
                std::llround(static_cast<double>(s) * 1e6)));
        }
    }

    std::int64_t us() const { return m_us; }
    double toSeconds() const { return static_cast<double>(m_us) * 1e-6; }

    SimTime operator+(SimTime rhs) const {
        std::int64_t r = 0;
        if (__builtin_add_overflow(m_us, rhs.m_us, &r)) {
            throw SimError("SimTime addition overflow");
        }
        return SimTime(r);
    }
    SimTime operator-(SimTime rhs) const {
        if (rhs.m_us > m_us) throw SimError("SimTime subtraction would be negative");
        return SimTime(m_us - rhs.m_us);
    }

    bool operator==(const SimTime&) const = default;
    auto operator<=>(const SimTime&) const = default;

private:
    explicit constexpr SimTime(std::int64_t us) : m_us(us) {}

    static std::int64_t mulChecked(std::int64_t a, std::int64_t b) {
        std::int64_t r = 0;
        if (__builtin_mul_overflow(a, b, &r)) throw SimError("SimTime overflow");
        return r;
    }

    std::int64_t m_us;
};

/// Bit rate in exact integer bits per second. Used for configured
/// quantities (link capacity, ladder rungs, drain rates). Derived
/// real-valued rates (measured loads, Pro-IAAR) travel as double bps.
class BitRate {
public:
    constexpr BitRate() : m_bps(0) {}

    static BitRate bps(std::int64_t v) {
        if (v < 0) throw SimError("BitRate must be non-negative");
        return BitRate(v);
    }
    static BitRate kbps(std::int64_t v) { return bps(v * 1000); }
    static BitRate mbps(double v) {
        if (v < 0) throw SimError("BitRate must be non-negative");
        return bps(static_cast<std::int64_t>(v * 1e6 + 0.5));
    }

    std::int64_t bitsPerSecond() const { return m_bps; }
    double toMbps() const { return static_cast<double>(m_bps) * 1e-6; }

    BitRate operator+(BitRate rhs) const {
        std::int64_t r = 0;
        if (__builtin_add_overflow(m_bps, rhs.m_bps, &r)) {
            throw SimError("BitRate addition overflow");
        }
        return BitRate(r);
    }

    bool operator==(const BitRate&) const = default;
    auto operator<=>(const BitRate&) const = default;

private:
    explicit constexpr BitRate(std::int64_t bps) : m_bps(bps) {}

    std::int64_t m_bps;
};

}  // namespace qoesim

#endif  // QOESIM_UNITS_HPP
