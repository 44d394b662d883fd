#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lmc/gateway.hpp"

namespace lmc {

// Everything a command needs beyond its own arguments. Exactly one of
// backend_url / mock_script selects the backend; commands that never talk
// to a backend ignore both.
struct RunConfig {
  std::filesystem::path corpus_manifest;
  std::string backend_url;
  std::filesystem::path mock_script;
  std::optional<std::string> prompt_override;
  int concurrency_limit = 1;
  double timeout_seconds = 600.0;
  std::filesystem::path output_dir;
};

// Exit codes shared by all commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitUnresolved = 3;

// Benchmarks each model standalone over the corpus: per-model prediction
// records plus one report table covering both score modes. On a backend
// failure, everything gathered so far is flushed next to a FAILURE marker.
int cmd_bench(const RunConfig& config, const std::vector<std::string>& models,
              std::ostream& out);

// Runs one chain over the corpus: records, stage traces, and a combined +
// per-stage report table.
int cmd_chain(const RunConfig& config, const std::filesystem::path& chain_file,
              std::ostream& out);

// Builds chain proposals from a bench report table: proposal files plus a
// residual ranking table. Uses the in-document F1 for the fit, like the
// benchmark plots.
int cmd_propose(const RunConfig& config,
                const std::filesystem::path& bench_report, int k,
                std::ostream& out);

// Extracts the date of birth from a single text file through a chain.
// Prints the date (or NOT_FOUND), the resolving stage, and elapsed seconds;
// exits kExitUnresolved when the chain is exhausted without a valid answer.
int cmd_extract(const RunConfig& config,
                const std::filesystem::path& chain_file,
                const std::filesystem::path& text_file, std::ostream& out);

// Re-derives a report table from stored prediction records, so scoring
// changes never require re-querying models.
int cmd_report(const RunConfig& config,
               const std::filesystem::path& records_file,
               const std::string& subject, std::ostream& out);

}  // namespace lmc
