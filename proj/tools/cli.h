#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rainbench/benchmark.h"
#include "rainbench/dataset.h"
#include "rainbench/rng.h"
#include "rainbench/survey.h"

namespace rainbench::cli {

namespace fs = std::filesystem;

struct IngestOptions {
  fs::path annotations;
  fs::path images;
  std::size_t per_class = 1000;
  std::uint64_t seed = kDefaultSeed;
  fs::path out;
};

struct PairOptions {
  fs::path clean_dir;
  fs::path rain_dir;
  SplitCounts counts;
  std::uint64_t seed = kDefaultSeed;
  fs::path out;
  std::optional<fs::path> layout;
};

struct BenchOptions {
  fs::path manifest;
  std::vector<ModelOutputSet> models;
  fs::path report;
  bool gallery = true;
  unsigned threads = 0;
};

struct ScoreOptions {
  fs::path reference;
  fs::path candidate;
};

struct SurveyServeOptions {
  fs::path syn_pool;
  fs::path real_pool;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<fs::path> log;
  std::optional<fs::path> static_dir;
  QuizShape shape;
  std::uint64_t seed = kDefaultSeed;
};

struct SurveyReportOptions {
  fs::path log;
  Verdict positive = Verdict::kFake;
  std::optional<fs::path> out;
};

using Command =
    std::variant<IngestOptions, PairOptions, BenchOptions, ScoreOptions, SurveyServeOptions, SurveyReportOptions>;

// Bad command line. exit_code is 2, or 0 when the user asked for --help.
class UsageError : public std::runtime_error {
 public:
  UsageError(std::string message, int exit_code) : std::runtime_error(std::move(message)), exit_code_(exit_code) {}
  int exit_code() const { return exit_code_; }

 private:
  int exit_code_;
};

Command parse_cli(const std::vector<std::string>& args);

/// Executes a parsed command; returns the process exit status.
int run(const Command& cmd);

}  // namespace rainbench::cli
