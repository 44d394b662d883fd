#pragma once

#include <span>
#include <string>
#include <vector>

#include "lmc/cascade.hpp"
#include "lmc/corpus.hpp"

namespace lmc {

// Which notion of "correct" a score uses: the prediction occurs anywhere in
// the document's candidate set, or it equals the expert-assigned target.
enum class ScoreMode { kInDocument, kMatchesTarget };

std::string to_string(ScoreMode mode);

struct ConfusionMatrix {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  long tn = 0;

  long total() const { return tp + fp + fn + tn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

// Percentages in [0, 100]. Every zero-denominator case is defined as 0.
struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct TpsStats {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double mean = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

struct StageReport {
  int stage_index = 0;
  std::string model_name;
  int documents_in = 0;
  ConfusionMatrix matrix;
  Metrics metrics;
  TpsStats tps;
};

// One scored subject (a model run standalone, or a whole chain) under one
// mode. Chains additionally carry per-stage breakdowns.
struct MetricsReport {
  std::string subject;
  ScoreMode mode = ScoreMode::kInDocument;
  ConfusionMatrix matrix;
  Metrics metrics;
  TpsStats tps;
  std::size_t n_documents = 0;
  std::vector<StageReport> per_stage;
};

// Confusion counts over one full corpus pass. An answered document is TP or
// FP by the mode's correctness; an unanswered one is FN when a correct
// answer was obtainable (the document has candidates, resp. a target) and
// TN otherwise. Throws std::invalid_argument unless records map one-to-one
// onto corpus documents.
ConfusionMatrix score(std::span<const PredictionRecord> records,
                      const Corpus& corpus, ScoreMode mode);

// Same counting applied to what a single stage saw and answered.
ConfusionMatrix score_stage(const StageTrace& stage, const Corpus& corpus,
                            ScoreMode mode);

double f1_score(double precision, double recall);
Metrics compute_metrics(const ConfusionMatrix& m);

// Characters over 4-character tokens per elapsed second.
double tokens_per_second(const Document& doc, double elapsed_seconds);

// A chain's throughput on one document: stage latencies add up.
double chain_tps(const Document& doc, const PredictionRecord& record);

// Order statistics with linear interpolation between ranks; the mean is
// arithmetic. Throws std::invalid_argument on an empty sample.
TpsStats summarize_tps(std::vector<double> samples);

// Seconds per token, the cost estimate. Throws std::invalid_argument when
// the report's mean TPS is not positive.
double reciprocal_mean_tps(const MetricsReport& report);

// Builds the (mode x subject) reports for one chain run: the combined
// record-level score plus one StageReport per stage.
std::vector<MetricsReport> report_chain_run(const std::string& subject,
                                            const ChainRunResult& run,
                                            const Corpus& corpus);

// CSV rows, one per subject x mode, percentages to 1 decimal place. The
// header is emitted once at the top. Byte-deterministic for fixed input.
std::string render_report_table(std::span<const MetricsReport> reports);

// Round-trips render_report_table output back into (subject, mode, mean
// tps, f1) tuples for downstream chain building.
struct ReportRow {
  std::string subject;
  ScoreMode mode = ScoreMode::kInDocument;
  std::size_t n_documents = 0;
  ConfusionMatrix matrix;
  Metrics metrics;
  TpsStats tps;
};
std::vector<ReportRow> parse_report_table(const std::string& csv);

}  // namespace lmc
