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

#ifndef QOESIM_BATCH_HPP
#define QOESIM_BATCH_HPP

#include <string>
#include <vector>

#include "qoesim/simulation.hpp"

namespace qoesim {

struct BatchOptions {
    std::string outDir;
    bool dumpEvents = false;
    bool dumpPackets = false;
    bool dumpAdmission = false;
};

struct BatchResult {
    std::vector<RunResult> runs;  // ascending seed order
};

/// Runs every configured seed into outDir/seed_<N>/, then aggregates
/// per-run means into one empirical CDF file per metric plus a batch
/// manifest.  Results depend only on (config, seed set): seeds are
/// processed in sorted order regardless of list order.  A failing seed
/// aborts the batch with a diagnostic naming it.
BatchResult runBatch(const ScenarioConfig& config, const BatchOptions& options);

/// Writes the per-run artifacts (summary.csv, run_stats.json, optional
/// dumps) for a single scenario execution into `dir`.
RunResult runScenarioToDir(const ScenarioConfig& config, std::uint64_t seed,
                           const std::string& dir, bool dumpEvents,
                           bool dumpPackets, bool dumpAdmission);

/// Renders a metric-by-directory trend table from previously written
/// batch result directories.
std::string compareTable(const std::vector<std::string>& resultDirs);

}  // namespace qoesim

#endif  // QOESIM_BATCH_HPP
