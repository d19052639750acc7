#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ccv/config.hpp"
#include "ccv/qaoa.hpp"
#include "ccv/wigner.hpp"

namespace ccv::harness {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSimulation = 3;

struct CliOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    int jobs = 1;
    bool dry_run = false;
};

nlohmann::json result_to_json(const RunResult& result, const ExperimentConfig& cfg,
                              std::uint64_t seed);

/// Executes one run and writes result.json, trace.csv, samples.csv and
/// optional Wigner grids into the config's output directory.
int cmd_run(const CliOptions& opts);

/// Grid execution over axis x seeds; writes report.csv (one row per cell per
/// seed plus median/mean aggregate rows). Axis is depth, size or cutoff.
int cmd_sweep(const CliOptions& opts, const std::string& axis, const std::vector<double>& values);

/// Paired CCV / CV-baseline runs over the config's seeds; writes report.csv.
int cmd_compare(const CliOptions& opts);

/// Recomputes a Wigner grid from a result.json state snapshot.
int cmd_wigner(const std::string& result_path, int mode);

}  // namespace ccv::harness
