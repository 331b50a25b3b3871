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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "qoesim/engine.hpp"
#include "qoesim/rng.hpp"
#include "qoesim/units.hpp"

using namespace qoesim;

TEST_CASE("SimTime factories and accessors") {
    CHECK(SimTime::micros(1500000).us() == 1500000);
    CHECK(SimTime::millis(1500).us() == 1500000);
    CHECK(SimTime::seconds(1.5).us() == 1500000);
    CHECK(SimTime::seconds(1.5).toSeconds() == doctest::Approx(1.5));
    CHECK((SimTime::millis(2) + SimTime::millis(3)).us() == 5000);
    CHECK((SimTime::millis(5) - SimTime::millis(3)).us() == 2000);
}

TEST_CASE("BitRate factories and accessors") {
    CHECK(BitRate::mbps(7.0).bitsPerSecond() == 7000000);
    CHECK(BitRate::kbps(96).bitsPerSecond() == 96000);
    CHECK(BitRate::bps(1234).bitsPerSecond() == 1234);
    CHECK(BitRate::mbps(7.0).toMbps() == doctest::Approx(7.0));
    CHECK_THROWS_AS(BitRate::bps(-1), SimError);
}

TEST_CASE("pcg32 reference vector (seed=42, stream=54)") {
    Pcg32 rng(42, 54);
    CHECK(rng.nextU32() == 0xa15c02b7u);
    CHECK(rng.nextU32() == 0x7b47f409u);
    CHECK(rng.nextU32() == 0xba1d3330u);
}

TEST_CASE("pcg32 streams are independent and reproducible") {
    Pcg32 a1(7, 100), a2(7, 100), b(7, 101);
    bool anyDifferent = false;
    for (int i = 0; i < 64; ++i) {
        std::uint32_t v = a1.nextU32();
        CHECK(v == a2.nextU32());
        if (v != b.nextU32()) anyDifferent = true;
    }
    CHECK(anyDifferent);
}

TEST_CASE("pcg32 derived draws stay in range") {
    Pcg32 rng(123, 9);
    for (int i = 0; i < 1000; ++i) {
        double d = rng.nextDouble();
        CHECK(d >= 0.0);
        CHECK(d < 1.0);
        std::uint32_t k = rng.below(13);
        CHECK(k < 13u);
        double u = rng.uniform(2.0, 5.0);
        CHECK(u >= 2.0);
        CHECK(u < 5.0);
    }
}

TEST_CASE("pcg32 normal has roughly standard moments") {
    Pcg32 rng(2024, 77);
    const int n = 20000;
    double sum = 0.0, sumSq = 0.0;
    for (int i = 0; i < n; ++i) {
        double x = rng.normal();
        sum += x;
        sumSq += x * x;
    }
    double mean = sum / n;
    double var = sumSq / n - mean * mean;
    CHECK(mean == doctest::Approx(0.0).epsilon(0.05));
    CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("engine processes events in fire-time order") {
    SimEngine engine;
    std::vector<int> order;
    engine.schedule(SimTime::micros(30), EventKind::MeasurementTick, 1,
                    [&] { order.push_back(3); });
    engine.schedule(SimTime::micros(10), EventKind::MeasurementTick, 1,
                    [&] { order.push_back(1); });
    engine.schedule(SimTime::micros(20), EventKind::MeasurementTick, 1,
                    [&] { order.push_back(2); });
    engine.runUntil(SimTime::micros(100));
    CHECK(order == std::vector<int>{1, 2, 3});
    CHECK(engine.now().us() == 100);
}

TEST_CASE("simultaneous events fire in scheduling order") {
    SimEngine engine;
    std::vector<int> order;
    for (int i = 0; i < 8; ++i) {
        engine.schedule(SimTime::micros(50), EventKind::PacketArrival, 1,
                        [&order, i] { order.push_back(i); });
    }
    engine.runUntil(SimTime::micros(50));
    REQUIRE(order.size() == 8);
    for (int i = 0; i < 8; ++i) CHECK(order[i] == i);
}

TEST_CASE("events scheduled while running are honoured") {
    SimEngine engine;
    std::vector<int> order;
    engine.schedule(SimTime::micros(10), EventKind::GopBoundary, 2, [&] {
        order.push_back(1);
        engine.schedule(SimTime::micros(15), EventKind::GopBoundary, 2,
                        [&] { order.push_back(2); });
        // Same-time self-reschedule must fire after already queued peers.
        engine.schedule(engine.now(), EventKind::GopBoundary, 2,
                        [&] { order.push_back(3); });
    });
    engine.runUntil(SimTime::micros(20));
    CHECK(order == std::vector<int>{1, 3, 2});
}

TEST_CASE("runUntil boundary is inclusive and clock is monotonic") {
    SimEngine engine;
    int fired = 0;
    engine.schedule(SimTime::micros(100), EventKind::SimEnd, 0,
                    [&] { ++fired; });
    engine.schedule(SimTime::micros(101), EventKind::SimEnd, 0,
                    [&] { ++fired; });
    engine.runUntil(SimTime::micros(100));
    CHECK(fired == 1);
    CHECK(engine.pendingCount() == 1);
    engine.runUntil(SimTime::micros(200));
    CHECK(fired == 2);
}

TEST_CASE("scheduling in the past throws") {
    SimEngine engine;
    engine.schedule(SimTime::micros(10), EventKind::SimEnd, 0, [] {});
    engine.runUntil(SimTime::micros(50));
    CHECK_THROWS_AS(engine.schedule(SimTime::micros(49), EventKind::SimEnd, 0,
                                    [] {}),
                    SimError);
    // Scheduling exactly at the current clock is allowed.
    CHECK_NOTHROW(engine.schedule(SimTime::micros(50), EventKind::SimEnd, 0,
                                  [] {}));
}

TEST_CASE("event log hook sees every processed event in order") {
    SimEngine engine;
    std::vector<std::string> log;
    engine.setEventLog([&](std::int64_t t, std::uint64_t seq, EventKind kind,
                           std::uint32_t entity) {
        log.push_back(std::to_string(t) + "," + std::to_string(seq) + "," +
                      eventKindName(kind) + "," + std::to_string(entity));
    });
    engine.schedule(SimTime::micros(5), EventKind::PacketArrival, 3, [] {});
    engine.schedule(SimTime::micros(2), EventKind::GopBoundary, 4, [] {});
    engine.runUntil(SimTime::micros(10));
    REQUIRE(log.size() == 2);
    CHECK(log[0] == "2,1,GopBoundary,4");
    CHECK(log[1] == "5,0,PacketArrival,3");
}

TEST_CASE("counters track scheduled and processed events") {
    SimEngine engine;
    for (int i = 1; i <= 5; ++i) {
        engine.schedule(SimTime::micros(i * 10), EventKind::SimEnd, 0, [] {});
    }
    CHECK(engine.scheduledCount() == 5);
    engine.runUntil(SimTime::micros(30));
    CHECK(engine.processedCount() == 3);
    CHECK(engine.pendingCount() == 2);
}

TEST_CASE("identical schedules replay identically") {
    auto run = [] {
        SimEngine engine;
        std::string trace;
        engine.setEventLog([&](std::int64_t t, std::uint64_t seq, EventKind k,
                               std::uint32_t e) {
            trace += std::to_string(t) + ":" + std::to_string(seq) + ":" +
                     eventKindName(k) + ":" + std::to_string(e) + ";";
        });
        Pcg32 rng(99, 5);
        for (int i = 0; i < 200; ++i) {
            engine.schedule(SimTime::micros(rng.below(1000)),
                            EventKind::PacketArrival, rng.below(16), [] {});
        }
        engine.runUntil(SimTime::millis(1));
        return trace;
    };
    CHECK(run() == run());
}
