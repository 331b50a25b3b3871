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

#include <cstdio>
#include <filesystem>

#include "qoesim/rng.hpp"
#include "qoesim/trace.hpp"

using namespace qoesim;

namespace {

ContentProfile testProfile() {
    ContentProfile p;
    p.name = "unit";
    p.resolution = Resolution::CIF;
    p.frameRate = 30;
    p.gopLength = 30;
    p.durationFrames = 900;
    p.baseRateQp2 = BitRate::mbps(2.0);
    p.burstiness = 0.3;
    p.iToPRatio = 5.0;
    p.gamma = 1.0;
    return p;
}

VariantLadder testLadder() {
    return generateLadder(testProfile(), Pcg32(7, rng_stream::kTraceLadder));
}

}  // namespace

TEST_CASE("ladder has one rung per qp with the right shape") {
    auto ladder = testLadder();
    for (int qp = kQpMin; qp <= kQpMax; ++qp) {
        const VideoTrace& t = ladder.variant(qp);
        CHECK(t.qp == qp);
        REQUIRE(t.frames.size() == 900);
        int iFrames = 0;
        for (const auto& f : t.frames) {
            CHECK(f.sizeBytes >= 1);
            if (f.type == FrameType::I) ++iFrames;
        }
        CHECK(iFrames == 30);  // one per GoP
        for (std::size_t i = 0; i < t.frames.size(); ++i) {
            CHECK(t.frames[i].index == static_cast<std::int32_t>(i));
            CHECK((t.frames[i].type == FrameType::I) == (i % 30 == 0));
        }
    }
    CHECK_THROWS_AS(ladder.variant(1), SimError);
    CHECK_THROWS_AS(ladder.variant(32), SimError);
}

TEST_CASE("rung mean rates follow base * (2/qp)^gamma within 2%") {
    auto ladder = testLadder();
    const double base = 2.0e6;
    for (int qp = kQpMin; qp <= kQpMax; ++qp) {
        const double expected = base * 2.0 / qp;
        CHECK(ladder.variant(qp).meanRateBps() ==
              doctest::Approx(expected).epsilon(0.02));
        CHECK(static_cast<double>(ladder.nominalRate(qp).bitsPerSecond()) ==
              doctest::Approx(expected).epsilon(0.02));
    }
    CHECK(ladder.highestRate().bitsPerSecond() ==
          ladder.nominalRate(kQpMin).bitsPerSecond());
    CHECK(ladder.lowestRate().bitsPerSecond() ==
          ladder.nominalRate(kQpMax).bitsPerSecond());
}

TEST_CASE("rates decrease strictly down the ladder") {
    auto ladder = testLadder();
    for (int qp = kQpMin; qp < kQpMax; ++qp) {
        CHECK(ladder.nominalRate(qp).bitsPerSecond() >
              ladder.nominalRate(qp + 1).bitsPerSecond());
    }
}

TEST_CASE("gamma shapes the ladder") {
    ContentProfile p = testProfile();
    p.gamma = 2.0;
    auto ladder = generateLadder(p, Pcg32(7, rng_stream::kTraceLadder));
    // (2/4)^2 = 1/4 of base at qp 4.
    CHECK(ladder.variant(4).meanRateBps() ==
          doctest::Approx(0.25 * 2.0e6).epsilon(0.02));
}

TEST_CASE("I frames are larger than P frames on average") {
    auto ladder = testLadder();
    const VideoTrace& t = ladder.variant(10);
    double iSum = 0.0, pSum = 0.0;
    int iN = 0, pN = 0;
    for (const auto& f : t.frames) {
        if (f.type == FrameType::I) {
            iSum += static_cast<double>(f.sizeBytes);
            ++iN;
        } else {
            pSum += static_cast<double>(f.sizeBytes);
            ++pN;
        }
    }
    const double ratio = (iSum / iN) / (pSum / pN);
    CHECK(ratio > 3.0);
    CHECK(ratio < 7.0);
}

TEST_CASE("ladder generation is deterministic and rng is taken by value") {
    Pcg32 rng(42, rng_stream::kTraceLadder);
    auto a = generateLadder(testProfile(), rng);
    auto b = generateLadder(testProfile(), rng);
    for (int qp = kQpMin; qp <= kQpMax; ++qp) {
        REQUIRE(a.variant(qp).frames.size() == b.variant(qp).frames.size());
        for (std::size_t i = 0; i < a.variant(qp).frames.size(); ++i) {
            CHECK(a.variant(qp).frames[i].sizeBytes ==
                  b.variant(qp).frames[i].sizeBytes);
        }
    }
    // The caller's stream must be untouched by ladder generation.
    Pcg32 fresh(42, rng_stream::kTraceLadder);
    CHECK(rng.nextU32() == fresh.nextU32());
}

TEST_CASE("frameAt wraps the trace and absoluteFrameAt does not") {
    auto ladder = testLadder();
    const VideoTrace& t = ladder.variant(5);  // 900 frames @30fps = 30 s
    CHECK(&frameAt(t, SimTime::micros(0)) == &t.frames[0]);
    CHECK(&frameAt(t, SimTime::micros(33334)) == &t.frames[1]);
    CHECK(absoluteFrameAt(t, SimTime::seconds(30)) == 900);
    CHECK(&frameAt(t, SimTime::seconds(30)) == &t.frames[0]);
    CHECK(absoluteFrameAt(t, SimTime::seconds(31)) == 930);
    CHECK(&frameAt(t, SimTime::seconds(31)) == &t.frames[30]);
}

TEST_CASE("frameEmitOffset inverts absoluteFrameAt exactly") {
    auto ladder = testLadder();
    const VideoTrace& t = ladder.variant(8);
    for (std::int64_t n : {0, 1, 2, 29, 30, 899, 900, 901, 2699}) {
        SimTime at = frameEmitOffset(30, n);
        CHECK(absoluteFrameAt(t, at) == n);
    }
    CHECK(frameEmitOffset(30, 0).us() == 0);
    CHECK(frameEmitOffset(30, 1).us() == 33334);  // ceil(1e6/30)
    CHECK(frameEmitOffset(30, 3).us() == 100000);
}

TEST_CASE("packetize fills all packets except possibly the last") {
    auto split = packetize(3000, 1052, 28);
    REQUIRE(split.size() == 3);
    CHECK(split[0].payloadBytes == 1024);
    CHECK(split[0].wireBytes == 1052);
    CHECK(split[1].payloadBytes == 1024);
    CHECK(split[2].payloadBytes == 952);
    CHECK(split[2].wireBytes == 980);

    auto one = packetize(1024, 1052, 28);
    REQUIRE(one.size() == 1);
    CHECK(one[0].payloadBytes == 1024);
    CHECK(one[0].wireBytes == 1052);

    auto tiny = packetize(1, 1052, 28);
    REQUIRE(tiny.size() == 1);
    CHECK(tiny[0].payloadBytes == 1);
    CHECK(tiny[0].wireBytes == 29);

    CHECK(packetize(0, 1052, 28).empty());

    // Total payload always equals the frame size.
    for (std::int64_t size : {1, 1023, 1024, 1025, 2048, 5000, 99999}) {
        std::int64_t total = 0;
        for (const auto& s : packetize(size, 1052, 28)) {
            total += s.payloadBytes;
            CHECK(s.payloadBytes >= 1);
            CHECK(s.payloadBytes <= 1024);
            CHECK(s.wireBytes == s.payloadBytes + 28);
        }
        CHECK(total == size);
    }
}

TEST_CASE("export/import round-trips the ladder") {
    namespace fs = std::filesystem;
    auto dir = fs::temp_directory_path() / "qoesim_trace_roundtrip";
    fs::remove_all(dir);
    fs::create_directories(dir);

    auto ladder = testLadder();
    exportLadder(ladder, dir.string());
    auto back = importLadder((dir / "ladder_manifest.json").string());

    CHECK(back.profile().frameRate == ladder.profile().frameRate);
    CHECK(back.profile().gopLength == ladder.profile().gopLength);
    for (int qp = kQpMin; qp <= kQpMax; ++qp) {
        const auto& a = ladder.variant(qp);
        const auto& b = back.variant(qp);
        REQUIRE(a.frames.size() == b.frames.size());
        CHECK(a.qp == b.qp);
        for (std::size_t i = 0; i < a.frames.size(); ++i) {
            CHECK(a.frames[i].sizeBytes == b.frames[i].sizeBytes);
            CHECK(a.frames[i].type == b.frames[i].type);
        }
        CHECK(a.totalBytes() == b.totalBytes());
    }
    fs::remove_all(dir);
}

TEST_CASE("profile validation rejects nonsense") {
    ContentProfile p = testProfile();
    p.frameRate = 0;
    CHECK_THROWS_AS(p.validate(), SimError);
    p = testProfile();
    p.gopLength = 0;
    CHECK_THROWS_AS(p.validate(), SimError);
    p = testProfile();
    p.durationFrames = 0;
    CHECK_THROWS_AS(p.validate(), SimError);
    p = testProfile();
    p.iToPRatio = 0.5;
    CHECK_THROWS_AS(p.validate(), SimError);
    p = testProfile();
    p.burstiness = -0.1;
    CHECK_THROWS_AS(p.validate(), SimError);
    CHECK_NOTHROW(testProfile().validate());
}
