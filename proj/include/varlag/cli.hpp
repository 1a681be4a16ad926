#pragma once

#include "varlag/config.hpp"

#include <string>
#include <vector>

namespace varlag::cli {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 2;
inline constexpr int kExitBadConfig = 3;
inline constexpr int kExitBadDataset = 4;
inline constexpr int kExitSweepFailures = 5;

// Effective settings for one run after merging defaults < config file < flags.
// `overrides` holds flag-supplied keys; `config_path` an optional file.
struct RunOptions {
    std::string config_path;
    KeyValueConfig overrides;
};

int cmd_learn(const std::string& data_csv, const std::string& out_dir, const RunOptions& opts);
int cmd_simulate(const std::string& out_dir, const RunOptions& opts);
int cmd_sweep(const std::string& spec_path, const std::string& out_dir, const RunOptions& opts);
int cmd_evaluate(const std::string& learnt_path, const std::string& truth_path,
                 std::string* out_json = nullptr);

int run(int argc, char** argv);  // full CLI entry point

}  // namespace varlag::cli
