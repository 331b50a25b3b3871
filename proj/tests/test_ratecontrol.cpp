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

#include "qoesim/packet.hpp"
#include "qoesim/ratecontrol.hpp"
#include "qoesim/rng.hpp"

using namespace qoesim;

namespace {

FeedbackReport clean() { return {}; }

FeedbackReport ecn() {
    FeedbackReport r;
    r.ecnSeen = true;
    return r;
}

FeedbackReport loss() {
    FeedbackReport r;
    r.lossEvents = 2;
    return r;
}

}  // namespace

TEST_CASE("ecn feedback stages a one-rung downgrade applied at the boundary") {
    RateController rc(AdaptMode::Adaptive, 5);
    CHECK(rc.currentQp() == 5);
    rc.onFeedback(ecn());
    CHECK(rc.currentQp() == 5);  // not yet applied
    REQUIRE(rc.pendingQp().has_value());
    CHECK(*rc.pendingQp() == 6);
    CHECK(rc.onGopBoundary() == 6);
    CHECK(rc.currentQp() == 6);
    CHECK_FALSE(rc.pendingQp().has_value());
}

TEST_CASE("loss feedback also downgrades") {
    RateController rc(AdaptMode::Adaptive, 5);
    rc.onFeedback(loss());
    CHECK(rc.onGopBoundary() == 6);
}

TEST_CASE("downgrade saturates at qp 31") {
    RateController rc(AdaptMode::Adaptive, 31);
    rc.onFeedback(ecn());
    CHECK(rc.onGopBoundary() == 31);
    rc.onFeedback(loss());
    rc.onFeedback(ecn());
    CHECK(rc.onGopBoundary() == 31);
}

TEST_CASE("down step larger than one") {
    RateController rc(AdaptMode::Adaptive, 5, /*downStep=*/3);
    rc.onFeedback(ecn());
    CHECK(rc.onGopBoundary() == 8);
    RateController edge(AdaptMode::Adaptive, 30, /*downStep=*/3);
    edge.onFeedback(ecn());
    CHECK(edge.onGopBoundary() == 31);  // clamped
}

TEST_CASE("quiet intervals stage a one-rung upgrade") {
    RateController rc(AdaptMode::Adaptive, 10, 1, /*quietIntervals=*/3);
    rc.onFeedback(clean());
    rc.onFeedback(clean());
    CHECK_FALSE(rc.pendingQp().has_value());
    rc.onFeedback(clean());
    REQUIRE(rc.pendingQp().has_value());
    CHECK(*rc.pendingQp() == 9);
    CHECK(rc.onGopBoundary() == 9);
    // The quiet counter restarts after an upgrade.
    rc.onFeedback(clean());
    rc.onFeedback(clean());
    CHECK(rc.onGopBoundary() == 9);
    rc.onFeedback(clean());
    CHECK(rc.onGopBoundary() == 8);
}

TEST_CASE("upgrade saturates at qp 2") {
    RateController rc(AdaptMode::Adaptive, 2, 1, 1);
    rc.onFeedback(clean());
    CHECK(rc.onGopBoundary() == 2);
}

TEST_CASE("congestion resets quiet progress") {
    RateController rc(AdaptMode::Adaptive, 10, 1, 3);
    rc.onFeedback(clean());
    rc.onFeedback(clean());
    rc.onFeedback(ecn());  // wipes the streak, stages a downgrade
    rc.onFeedback(clean());
    rc.onFeedback(clean());
    CHECK(rc.onGopBoundary() == 11);  // the downgrade won
    rc.onFeedback(clean());
    CHECK(rc.onGopBoundary() == 10);  // streak completed after the reset
}

TEST_CASE("multiple congested reports within one gop collapse to one step") {
    RateController rc(AdaptMode::Adaptive, 10);
    rc.onFeedback(ecn());
    rc.onFeedback(loss());
    rc.onFeedback(ecn());
    CHECK(rc.onGopBoundary() == 11);
}

TEST_CASE("non-adaptive mode never moves") {
    RateController rc(AdaptMode::NonAdaptive, 2);
    for (int i = 0; i < 50; ++i) {
        rc.onFeedback(ecn());
        rc.onFeedback(loss());
        rc.onFeedback(clean());
        CHECK(rc.onGopBoundary() == 2);
    }
    CHECK(rc.currentQp() == 2);
}

TEST_CASE("timeline fires only on actual changes, with the right trigger") {
    RateController rc(AdaptMode::Adaptive, 30, 1, 1);
    std::vector<std::string> events;
    rc.setTimeline([&](QpTrigger t, int oldQp, int newQp) {
        events.push_back(std::string(qpTriggerName(t)) + ":" +
                         std::to_string(oldQp) + ">" + std::to_string(newQp));
    });
    rc.onFeedback(ecn());   // 30 -> pending 31
    rc.onGopBoundary();     // applies
    rc.onFeedback(ecn());   // already at 31: no pending change
    rc.onGopBoundary();
    rc.onFeedback(clean()); // quiet upgrade 31 -> 30
    rc.onGopBoundary();
    REQUIRE(events.size() == 4);
    CHECK(events[0] == "ecn:30>31");
    CHECK(events[1] == "gop_apply:30>31");
    CHECK(events[2] == "quiet:31>30");
    CHECK(events[3] == "gop_apply:31>30");
}

TEST_CASE("controller rejects out-of-range initial qp") {
    CHECK_THROWS_AS(RateController(AdaptMode::Adaptive, 1), SimError);
    CHECK_THROWS_AS(RateController(AdaptMode::Adaptive, 32), SimError);
    CHECK_NOTHROW(RateController(AdaptMode::Adaptive, 2));
    CHECK_NOTHROW(RateController(AdaptMode::Adaptive, 31));
}

TEST_CASE("shaper passes traffic within the bucket depth immediately") {
    LeakyBucket bucket;
    bucket.configure(1.2e6, 50000.0);  // fresh bucket starts full
    CHECK(bucket.creditBits() == doctest::Approx(50000.0));
    SimTime at = SimTime::millis(10);
    CHECK(bucket.shape(at, 20000).us() == at.us());
    CHECK(bucket.shape(at, 20000).us() == at.us());
    // Credit nearly exhausted: the next burst waits for drain.
    SimTime third = bucket.shape(at, 20000);
    CHECK(third.us() > at.us());
}

TEST_CASE("shaper releases are monotonic and drain-rate limited") {
    LeakyBucket bucket;
    const double drain = 1.0e6;
    bucket.configure(drain, 10000.0);
    Pcg32 rng(3, 8);
    SimTime arrival;
    SimTime lastRelease;
    std::int64_t totalBits = 0;
    SimTime firstRelease;
    for (int i = 0; i < 2000; ++i) {
        arrival = arrival + SimTime::micros(rng.below(800));
        const std::int64_t bits = 800 + rng.below(12000);
        SimTime release = bucket.shape(arrival, bits);
        CHECK(release.us() >= arrival.us());
        CHECK(release.us() >= lastRelease.us());
        if (i == 0) firstRelease = release;
        lastRelease = release;
        totalBits += bits;
    }
    // Long-run released rate stays within drain plus one bucket of burst.
    const double window = lastRelease.toSeconds() - firstRelease.toSeconds();
    REQUIRE(window > 0.0);
    const double rate = static_cast<double>(totalBits) / window;
    CHECK(rate <= drain * 1.05 + 10000.0 / window);
}

TEST_CASE("idle time refills credit up to the depth") {
    LeakyBucket bucket;
    bucket.configure(1.0e6, 8000.0);
    // Drain the bucket dry at t=0.
    bucket.shape(SimTime::micros(0), 8000);
    // 4 ms idle refills 4000 bits; an 8000-bit packet still waits 4 ms.
    SimTime release = bucket.shape(SimTime::millis(4), 8000);
    CHECK(release.us() == doctest::Approx(8000).epsilon(0.01));
    // A long idle caps the refill at one depth.
    bucket.shape(SimTime::seconds(10), 1);
    CHECK(bucket.creditBits() <= 8000.0);
}

TEST_CASE("reconfigure keeps credit but caps it at the new depth") {
    LeakyBucket bucket;
    bucket.configure(1.0e6, 50000.0);
    CHECK(bucket.creditBits() == doctest::Approx(50000.0));
    bucket.configure(2.0e6, 10000.0);  // shrink: credit must clamp
    CHECK(bucket.creditBits() == doctest::Approx(10000.0));
    CHECK(bucket.drainBps() == doctest::Approx(2.0e6));
    bucket.configure(2.0e6, 30000.0);  // grow: credit is kept, not refilled
    CHECK(bucket.creditBits() == doctest::Approx(10000.0));
}

TEST_CASE("shaper timing is deterministic") {
    auto run = [] {
        LeakyBucket bucket;
        bucket.configure(1.7e6, 42000.0);
        Pcg32 rng(12, 2);
        std::vector<std::int64_t> releases;
        SimTime arrival;
        for (int i = 0; i < 500; ++i) {
            arrival = arrival + SimTime::micros(rng.below(1500));
            releases.push_back(bucket.shape(arrival, 500 + rng.below(9000)).us());
        }
        return releases;
    };
    CHECK(run() == run());
}
