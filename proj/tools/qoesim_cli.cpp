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

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qoesim/batch.hpp"
#include "qoesim/scenario.hpp"
#include "qoesim/simulation.hpp"

namespace {

qoesim::ScenarioConfig loadOrExit(const std::string& path) {
    const qoesim::ConfigResult loaded = qoesim::loadConfig(path);
    if (!loaded.ok()) {
        std::cerr << "invalid config " << path << ":\n";
        for (const std::string& err : loaded.errors) {
            std::cerr << "  " << err << '\n';
        }
        std::exit(1);
    }
    return *loaded.config;
}

std::vector<std::uint64_t> readSeedFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "cannot open seed file " << path << '\n';
        std::exit(1);
    }
    std::vector<std::uint64_t> seeds;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        try {
            seeds.push_back(std::stoull(line));
        } catch (const std::exception&) {
            std::cerr << "bad seed line: " << line << '\n';
            std::exit(1);
        }
    }
    if (seeds.empty()) {
        std::cerr << "seed file " << path << " holds no seeds\n";
        std::exit(1);
    }
    return seeds;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qoesim: packet-level simulator of QoE-aware video "
                 "streaming over a shared bottleneck"};
    app.require_subcommand(1);

    std::string configPath;
    std::string outDir = "results";
    std::string seedFile;
    std::uint64_t seed = 0;
    bool seedSet = false;
    bool dumpEvents = false;
    bool dumpPackets = false;
    bool dumpAdmission = false;
    std::vector<std::string> compareDirs;

    CLI::App* run = app.add_subcommand("run", "run one scenario + seed");
    run->add_option("--config", configPath, "scenario config JSON")
        ->required();
    run->add_option("--seed", seed, "PRNG seed")
        ->each([&seedSet](const std::string&) { seedSet = true; });
    run->add_option("--out", outDir, "output directory");
    run->add_flag("--dump-events", dumpEvents, "write the event log");
    run->add_flag("--dump-packets", dumpPackets, "write the per-packet log");
    run->add_flag("--dump-admission", dumpAdmission,
                  "write the admission audit log");

    CLI::App* batch = app.add_subcommand("batch", "run the seed list");
    batch->add_option("--config", configPath, "scenario config JSON")
        ->required();
    batch->add_option("--seeds", seedFile,
                      "file with one seed per line (overrides config)");
    batch->add_option("--out", outDir, "output directory");
    batch->add_flag("--dump-events", dumpEvents, "write event logs");
    batch->add_flag("--dump-packets", dumpPackets, "write per-packet logs");
    batch->add_flag("--dump-admission", dumpAdmission,
                    "write admission audit logs");

    CLI::App* compare =
        app.add_subcommand("compare", "trend table over result directories");
    compare->add_option("dirs", compareDirs, "batch result directories")
        ->required();

    CLI::App* validate = app.add_subcommand("validate", "config lint");
    validate->add_option("--config", configPath, "scenario config JSON")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            const qoesim::ScenarioConfig cfg = loadOrExit(configPath);
            if (!seedSet) {
                seed = cfg.seeds.empty() ? 1 : cfg.seeds.front();
            }
            const qoesim::RunResult result = qoesim::runScenarioToDir(
                cfg, seed, outDir, dumpEvents, dumpPackets, dumpAdmission);
            std::ofstream echo(outDir + "/effective_config.json",
                               std::ios::binary);
            echo << qoesim::toJson(cfg).dump(2) << '\n';
            std::cout << qoesim::runStatsJson(result).dump(2) << '\n';
            return 0;
        }
        if (batch->parsed()) {
            qoesim::ScenarioConfig cfg = loadOrExit(configPath);
            if (!seedFile.empty()) {
                cfg.seeds = readSeedFile(seedFile);
            }
            if (cfg.seeds.empty()) {
                std::cerr << "no seeds: provide --seeds or a seeds list in "
                             "the config\n";
                return 1;
            }
            qoesim::BatchOptions options;
            options.outDir = outDir;
            options.dumpEvents = dumpEvents;
            options.dumpPackets = dumpPackets;
            options.dumpAdmission = dumpAdmission;
            const qoesim::BatchResult result = qoesim::runBatch(cfg, options);
            std::cout << "batch complete: " << result.runs.size()
                      << " runs -> " << outDir << '\n';
            return 0;
        }
        if (compare->parsed()) {
            std::cout << qoesim::compareTable(compareDirs);
            return 0;
        }
        if (validate->parsed()) {
            const qoesim::ConfigResult loaded = qoesim::loadConfig(configPath);
            if (!loaded.ok()) {
                std::cerr << "invalid config " << configPath << ":\n";
                for (const std::string& err : loaded.errors) {
                    std::cerr << "  " << err << '\n';
                }
                return 1;
            }
            std::cout << qoesim::toJson(*loaded.config).dump(2) << '\n';
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
