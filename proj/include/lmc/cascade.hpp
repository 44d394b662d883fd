#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lmc/corpus.hpp"
#include "lmc/dates.hpp"
#include "lmc/errors.hpp"
#include "lmc/gateway.hpp"

namespace lmc {

// An ordered stack of models, head first. Later models are expected to be
// slower and more predictive; they only ever see the documents the earlier
// ones failed on. The same model may appear more than once.
struct ChainConfig {
  std::string id;
  std::vector<ModelSpec> models;
  PromptTemplate prompt;
};

// Per-document outcome of a chain run.
//
// A document is resolved when some stage's answer is a member of its
// candidate set; stage_index then names that stage. Documents that exhaust
// the chain keep the last stage's answer fields with in_document false and
// no stage_index. elapsed_seconds_total sums the latencies of exactly the
// stages that queried the document.
struct PredictionRecord {
  std::string document_id;
  std::optional<int> stage_index;
  std::optional<std::string> model_name;
  std::optional<std::string> raw_response;
  std::optional<CanonicalDate> answer;
  bool in_document = false;
  std::optional<bool> matches_target;
  double elapsed_seconds_total = 0.0;

  bool operator==(const PredictionRecord&) const = default;
};

struct StageDocumentOutcome {
  std::string document_id;
  double seconds = 0.0;
  std::optional<CanonicalDate> answer;
  bool accepted = false;

  bool operator==(const StageDocumentOutcome&) const = default;
};

// What one stage saw and did: documents_in = resolved + unresolved, and
// per_document holds the stage's outcomes in corpus order.
struct StageTrace {
  int stage_index = 0;
  std::string model_name;
  int documents_in = 0;
  int resolved = 0;
  int unresolved = 0;
  std::vector<StageDocumentOutcome> per_document;

  bool operator==(const StageTrace&) const = default;
};

struct ChainRunResult {
  std::vector<PredictionRecord> records;  // one per corpus document, in order
  std::vector<StageTrace> stages;
};

// A backend failure mid-run. Records of documents resolved before the
// failing call survive in partial().
class ChainRunError : public Error {
 public:
  ChainRunError(int stage_index, std::string model_name,
                std::string document_id, std::string cause,
                ChainRunResult partial)
      : Error("chain run failed at stage " + std::to_string(stage_index) +
              " [model=" + model_name + ", document=" + document_id +
              "]: " + cause),
        stage_index_(stage_index),
        model_name_(std::move(model_name)),
        document_id_(std::move(document_id)),
        partial_(std::move(partial)) {}

  int stage_index() const { return stage_index_; }
  const std::string& model_name() const { return model_name_; }
  const std::string& document_id() const { return document_id_; }
  const ChainRunResult& partial() const { return partial_; }

 private:
  int stage_index_;
  std::string model_name_;
  std::string document_id_;
  ChainRunResult partial_;
};

struct RunOptions {
  int concurrency = 1;  // worker cap per stage; the backend gate also applies
  ThinkingMarkers markers;
};

// True iff an answer exists and is one of the document's candidate dates.
bool validate_response(const std::optional<CanonicalDate>& answer,
                       const CandidateSet& candidates);

// Disjoint-union of two record lists, reordered to corpus order. Throws
// std::invalid_argument on overlapping ids or ids unknown to the corpus.
std::vector<PredictionRecord> merge(std::vector<PredictionRecord> resolved,
                                    std::vector<PredictionRecord> later,
                                    const Corpus& corpus);

// Runs the cascade: candidate sets are extracted once per document, stage 0
// queries the head model on every document, and each later stage sees only
// the documents all earlier stages failed to resolve. Stops when the model
// stack is exhausted or nothing is left unresolved. Stage 0 is always
// traced, even for an empty corpus.
ChainRunResult run_chain(const Corpus& corpus, const ChainConfig& chain,
                         Backend& backend, const RunOptions& options = {});

}  // namespace lmc
