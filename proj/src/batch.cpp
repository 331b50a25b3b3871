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

#include "qoesim/batch.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qoesim/format.hpp"

namespace qoesim {

namespace fs = std::filesystem;

namespace {

void writeFile(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw SimError("cannot write " + path.string());
    }
    out << content;
}

void writeCdf(const fs::path& path, std::vector<double> values) {
    const auto cdf = aggregateCdf(std::move(values));
    std::string body = "value,cum_fraction\n";
    for (const auto& [value, fraction] : cdf) {
        body += formatG(value);
        body += ',';
        body += formatG(fraction);
        body += '\n';
    }
    writeFile(path, body);
}

constexpr const char* kPlotScript =
    "# gnuplot script: plot any of the cdf_*.csv files in this directory\n"
    "# usage: gnuplot -e \"metric='cdf_mos'\" plot_cdf.gp\n"
    "if (!exists(\"metric\")) metric = 'cdf_mos'\n"
    "set datafile separator ','\n"
    "set key bottom right\n"
    "set ylabel 'cumulative fraction'\n"
    "set xlabel metric\n"
    "set grid\n"
    "plot metric.'.csv' skip 1 using 1:2 with steps title metric\n";

}  // namespace

RunResult runScenarioToDir(const ScenarioConfig& config, std::uint64_t seed,
                           const std::string& dir, bool dumpEvents,
                           bool dumpPackets, bool dumpAdmission) {
    fs::create_directories(dir);
    const fs::path base(dir);

    std::ofstream events;
    std::ofstream packets;
    std::ofstream admission;
    std::ofstream qpTimeline(base / "qp_timeline.csv", std::ios::binary);
    qpTimeline << "time_us,flow,old_qp,new_qp,trigger\n";

    RunOutputs outputs;
    if (dumpEvents) {
        events.open(base / "events.csv", std::ios::binary);
        events << "time_us,sequence,kind,entity\n";
        outputs.events = &events;
    }
    if (dumpPackets) {
        packets.open(base / "packets.csv", std::ios::binary);
        outputs.packets = &packets;
    }
    if (dumpAdmission) {
        admission.open(base / "admission.csv", std::ios::binary);
        outputs.admission = &admission;
    }
    outputs.qpTimeline = &qpTimeline;

    const RunResult result = runScenario(config, seed, outputs);

    writeFile(base / "summary.csv", runSummaryCsv(result));
    writeFile(base / "run_stats.json", runStatsJson(result).dump(2) + "\n");
    return result;
}

BatchResult runBatch(const ScenarioConfig& config,
                     const BatchOptions& options) {
    if (config.seeds.empty()) {
        throw SimError("batch needs at least one seed");
    }
    std::vector<std::uint64_t> seeds = config.seeds;
    std::sort(seeds.begin(), seeds.end());

    fs::create_directories(options.outDir);
    const fs::path base(options.outDir);

    writeFile(base / "effective_config.json", toJson(config).dump(2) + "\n");

    BatchResult batch;
    for (const std::uint64_t seed : seeds) {
        const fs::path runDir = base / ("seed_" + std::to_string(seed));
        try {
            batch.runs.push_back(runScenarioToDir(
                config, seed, runDir.string(), options.dumpEvents,
                options.dumpPackets, options.dumpAdmission));
        } catch (const std::exception& e) {
            throw SimError("seed " + std::to_string(seed) +
                           " failed: " + e.what());
        }
    }

    nlohmann::json manifest;
    manifest["name"] = config.name;
    manifest["architecture"] = architectureName(config.architecture);
    manifest["seeds"] = seeds;
    manifest["config_hash"] = configHash(config);
    manifest["theta"] = config.theta;
    manifest["runs"] = batch.runs.size();
    writeFile(base / "manifest.json", manifest.dump(2) + "\n");

    std::vector<double> mos;
    std::vector<double> delayMs;
    std::vector<double> lossRatio;
    std::vector<double> decoded;
    std::vector<double> util;
    std::vector<double> videoPackets;
    for (const RunResult& run : batch.runs) {
        mos.push_back(run.meanVideoMos);
        delayMs.push_back(run.meanVideoDelayMs);
        lossRatio.push_back(run.meanVideoLossRatio);
        decoded.push_back(static_cast<double>(run.sessionsDecoded));
        util.push_back(run.utilization);
        videoPackets.push_back(static_cast<double>(run.videoPacketsSent));
    }
    writeCdf(base / "cdf_mos.csv", mos);
    writeCdf(base / "cdf_delay_ms.csv", delayMs);
    writeCdf(base / "cdf_loss_ratio.csv", lossRatio);
    writeCdf(base / "cdf_decoded_sessions.csv", decoded);
    writeCdf(base / "cdf_utilization.csv", util);
    writeCdf(base / "cdf_video_packets.csv", videoPackets);
    writeFile(base / "plot_cdf.gp", kPlotScript);
    return batch;
}

namespace {

struct DirStats {
    std::string label;
    double meanDecoded = 0.0;
    double meanMos = 0.0;
    double meanDelayMs = 0.0;
    double meanLoss = 0.0;
    double meanUtilization = 0.0;
    std::size_t runs = 0;
};

std::vector<std::string> splitCsv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        cells.push_back(cell);
    }
    return cells;
}

/// Recomputes per-run aggregates from the written summary CSVs so this
/// table never depends on in-memory state.
DirStats readDir(const std::string& dir) {
    const fs::path base(dir);
    DirStats stats;

    std::ifstream manifestIn(base / "manifest.json");
    if (!manifestIn) {
        throw SimError("no manifest.json in " + dir);
    }
    nlohmann::json manifest;
    manifestIn >> manifest;
    stats.label = manifest.value("architecture", dir);
    const std::vector<std::uint64_t> seeds =
        manifest.value("seeds", std::vector<std::uint64_t>{});

    for (const std::uint64_t seed : seeds) {
        const fs::path runDir = base / ("seed_" + std::to_string(seed));
        std::ifstream csv(runDir / "summary.csv");
        if (!csv) {
            throw SimError("missing summary.csv for seed " +
                           std::to_string(seed) + " in " + dir);
        }
        std::string line;
        std::getline(csv, line);  // header
        double mosSum = 0.0;
        int mosCount = 0;
        double delaySum = 0.0;
        int delayCount = 0;
        double lossSum = 0.0;
        int decodedCount = 0;
        while (std::getline(csv, line)) {
            if (line.empty()) {
                continue;
            }
            const std::vector<std::string> cells = splitCsv(line);
            if (cells.size() < 8 || cells[1] != "video" || cells[2] != "1") {
                continue;  // only admitted video rows enter the trends
            }
            decodedCount += cells[3] == "1" ? 1 : 0;
            mosSum += std::stod(cells[4]);
            ++mosCount;
            delaySum += std::stod(cells[5]);
            ++delayCount;
            lossSum += std::stod(cells[6]);
        }
        stats.meanDecoded += decodedCount;
        if (mosCount > 0) {
            stats.meanMos += mosSum / mosCount;
            stats.meanDelayMs += delaySum / delayCount;
            stats.meanLoss += lossSum / mosCount;
        }

        std::ifstream statsIn(runDir / "run_stats.json");
        if (statsIn) {
            nlohmann::json runStats;
            statsIn >> runStats;
            stats.meanUtilization += runStats.value("utilization", 0.0);
        }
        ++stats.runs;
    }
    if (stats.runs > 0) {
        const auto n = static_cast<double>(stats.runs);
        stats.meanDecoded /= n;
        stats.meanMos /= n;
        stats.meanDelayMs /= n;
        stats.meanLoss /= n;
        stats.meanUtilization /= n;
    }
    return stats;
}

std::string pad(const std::string& text, std::size_t width) {
    std::string out = text;
    while (out.size() < width) {
        out += ' ';
    }
    return out;
}

}  // namespace

std::string compareTable(const std::vector<std::string>& resultDirs) {
    if (resultDirs.empty()) {
        throw SimError("compare needs at least one result directory");
    }
    std::vector<DirStats> all;
    all.reserve(resultDirs.size());
    for (const std::string& dir : resultDirs) {
        all.push_back(readDir(dir));
    }

    constexpr std::size_t kMetricWidth = 22;
    constexpr std::size_t kCellWidth = 14;
    std::string table = pad("metric", kMetricWidth);
    for (const DirStats& stats : all) {
        table += pad(stats.label, kCellWidth);
    }
    table += '\n';

    auto row = [&](const std::string& name, auto getter) {
        table += pad(name, kMetricWidth);
        for (const DirStats& stats : all) {
            table += pad(formatG(getter(stats)), kCellWidth);
        }
        table += '\n';
    };
    row("runs", [](const DirStats& s) { return static_cast<double>(s.runs); });
    row("mean_decoded_sessions",
        [](const DirStats& s) { return s.meanDecoded; });
    row("mean_video_mos", [](const DirStats& s) { return s.meanMos; });
    row("mean_video_delay_ms",
        [](const DirStats& s) { return s.meanDelayMs; });
    row("mean_video_loss_ratio",
        [](const DirStats& s) { return s.meanLoss; });
    row("mean_utilization",
        [](const DirStats& s) { return s.meanUtilization; });
    return table;
}

}  // namespace qoesim
