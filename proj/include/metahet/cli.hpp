// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "metahet/effect_sizes.hpp"
#include "metahet/model.hpp"

namespace metahet {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitComputeError = 3;

enum class OutputFormat { Table, Json, Csv };

struct AnalyzeOptions {
  std::filesystem::path input;
  EffectSizeKind kind = EffectSizeKind::Mean;
  SmdMethod smd_method = SmdMethod::HedgesG;
  OutputFormat format = OutputFormat::Table;
  std::optional<std::filesystem::path> out;
};

struct SimulateOptions {
  std::filesystem::path config;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<int> reps;
};

// Each command writes its result to `out` (or the --out file) and its
// diagnostics to `err`, and returns a process exit status.
int cmd_analyze(const AnalyzeOptions& options, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err);
int cmd_example(const std::string& name, std::ostream& out, std::ostream& err);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace metahet
