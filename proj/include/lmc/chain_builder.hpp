#pragma once

#include <span>
#include <string>
#include <vector>

#include "lmc/cascade.hpp"
#include "lmc/eval.hpp"

namespace lmc {

// One model's standalone benchmark result, the raw material chains are
// built from.
struct ModelBenchmark {
  ModelSpec model;
  double mean_tps = 0.0;
  double f1_in_document = 0.0;
  double f1_matches_target = 0.0;

  double f1(ScoreMode mode) const {
    return mode == ScoreMode::kInDocument ? f1_in_document
                                          : f1_matches_target;
  }
};

// The speed/accuracy trend line, anchored at (0, best F1): models above it
// punch above their cost, models below it underdeliver.
struct CorrelationLine {
  double anchor_y = 0.0;  // max F1 among the benchmarks
  double slope = 0.0;     // F1 points per tokens-per-second
  double pearson_r = 0.0;

  double value_at(double mean_tps) const {
    return anchor_y + slope * mean_tps;
  }
};

class FitError : public Error {
 public:
  using Error::Error;
};

struct RankedModel {
  ModelBenchmark benchmark;
  double residual = 0.0;  // F1 minus the line at the model's mean TPS
};

struct ChainProposal {
  ChainConfig chain;  // always length >= 2
  std::string rationale;
  std::vector<RankedModel> residuals;  // the ranking the proposal came from
};

// Pearson correlation of (mean TPS, F1) plus the least-squares slope with
// the intercept forced through (0, max F1). Throws FitError on fewer than
// two points or zero TPS variance; zero F1 variance yields pearson_r = 0.
CorrelationLine fit_correlation(std::span<const ModelBenchmark> benchmarks,
                                ScoreMode mode);

// Descending residual; ties broken by higher mean TPS, then by name.
std::vector<RankedModel> rank_by_residual(
    std::span<const ModelBenchmark> benchmarks, const CorrelationLine& line,
    ScoreMode mode);

// Chain candidates from the top-k residual models:
//   - the k models ordered fastest first,
//   - its k-1 prefix (when that still has >= 2 models),
//   - the prefix reversed, to probe order sensitivity (for k == 2 this is
//     the full pair reversed).
// Throws std::invalid_argument for k < 2 or k > benchmark count.
std::vector<ChainProposal> propose_chains(
    std::span<const ModelBenchmark> benchmarks, int k,
    ScoreMode mode = ScoreMode::kInDocument);

// Assembles benchmarks from a bench report table (both modes per subject).
std::vector<ModelBenchmark> benchmarks_from_report(
    std::span<const ReportRow> rows);

}  // namespace lmc
