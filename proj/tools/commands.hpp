#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dgad::cli {

struct Options {
  std::string command;
  std::filesystem::path config;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::optional<std::filesystem::path> checkpoint;
  int limit = 10;
};

enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2, kDataError = 3, kNumericError = 4 };

// Runs one subcommand and maps library errors to exit codes. Diagnostics go
// to stderr; written artifact paths are printed on stdout.
int run(const Options& opts);

}  // namespace dgad::cli
