#include "lmc/cascade.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace lmc {

namespace {

struct WorkItem {
  const Document* doc = nullptr;
  CandidateSet candidates;
  std::string prompt;
  PredictionRecord record;
};

void fill_matches_target(PredictionRecord& record, const Document& doc) {
  if (!doc.target) return;
  record.matches_target = record.answer && *record.answer == *doc.target;
}

}  // namespace

bool validate_response(const std::optional<CanonicalDate>& answer,
                       const CandidateSet& candidates) {
  return answer.has_value() && candidates.contains(*answer);
}

std::vector<PredictionRecord> merge(std::vector<PredictionRecord> resolved,
                                    std::vector<PredictionRecord> later,
                                    const Corpus& corpus) {
  std::unordered_map<std::string, std::size_t> order;
  order.reserve(corpus.documents.size());
  for (std::size_t i = 0; i < corpus.documents.size(); ++i)
    order.emplace(corpus.documents[i].id, i);

  std::unordered_set<std::string> seen;
  seen.reserve(resolved.size() + later.size());
  std::vector<PredictionRecord> merged;
  merged.reserve(resolved.size() + later.size());

  for (auto* side : {&resolved, &later}) {
    for (auto& record : *side) {
      if (!order.contains(record.document_id))
        throw std::invalid_argument("merge: unknown document id '" +
                                    record.document_id + "'");
      if (!seen.insert(record.document_id).second)
        throw std::invalid_argument("merge: overlapping document id '" +
                                    record.document_id + "'");
      merged.push_back(std::move(record));
    }
  }
  std::sort(merged.begin(), merged.end(),
            [&](const PredictionRecord& a, const PredictionRecord& b) {
              return order.at(a.document_id) < order.at(b.document_id);
            });
  return merged;
}

ChainRunResult run_chain(const Corpus& corpus, const ChainConfig& chain,
                         Backend& backend, const RunOptions& options) {
  if (chain.models.empty())
    throw ConfigError("chain '" + chain.id + "' has no models");
  for (const ModelSpec& model : chain.models)
    if (model.name.empty())
      throw ConfigError("chain '" + chain.id + "' names an empty model");
  render_prompt(chain.prompt, Document{});  // reject bad templates up front

  std::vector<WorkItem> items;
  items.reserve(corpus.documents.size());
  for (const Document& doc : corpus.documents) {
    WorkItem item;
    item.doc = &doc;
    item.candidates = extract_candidates(doc.text);
    item.prompt = render_prompt(chain.prompt, doc);
    item.record.document_id = doc.id;
    items.push_back(std::move(item));
  }

  std::vector<std::size_t> worklist(items.size());
  for (std::size_t i = 0; i < worklist.size(); ++i) worklist[i] = i;

  ChainRunResult result;
  std::vector<PredictionRecord> resolved_records;

  auto partial_result = [&] {
    ChainRunResult partial;
    partial.records = resolved_records;
    partial.stages = result.stages;
    return partial;
  };

  for (std::size_t stage = 0; stage < chain.models.size(); ++stage) {
    if (stage > 0 && worklist.empty()) break;
    const ModelSpec& model = chain.models[stage];

    // Query every document in the stage; workers share an index counter and
    // write into per-document slots so ordering stays deterministic.
    std::vector<GenerationResult> responses(worklist.size());
    std::vector<std::exception_ptr> failures(worklist.size());
    auto query_one = [&](std::size_t slot) {
      const WorkItem& item = items[worklist[slot]];
      try {
        responses[slot] = backend.generate(
            GenerationRequest{model, item.prompt, item.doc->id});
      } catch (...) {
        failures[slot] = std::current_exception();
      }
    };

    const int workers = static_cast<int>(
        std::min<std::size_t>(std::max(options.concurrency, 1),
                              worklist.size()));
    if (workers <= 1) {
      for (std::size_t slot = 0; slot < worklist.size(); ++slot) {
        query_one(slot);
        if (failures[slot]) break;
      }
    } else {
      std::atomic<std::size_t> next{0};
      std::vector<std::thread> pool;
      pool.reserve(static_cast<std::size_t>(workers));
      for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
          for (std::size_t slot = next.fetch_add(1); slot < worklist.size();
               slot = next.fetch_add(1))
            query_one(slot);
        });
      for (auto& t : pool) t.join();
    }

    StageTrace trace;
    trace.stage_index = static_cast<int>(stage);
    trace.model_name = model.name;
    trace.documents_in = static_cast<int>(worklist.size());

    std::vector<std::size_t> still_unresolved;
    for (std::size_t slot = 0; slot < worklist.size(); ++slot) {
      WorkItem& item = items[worklist[slot]];
      if (failures[slot]) {
        std::string cause;
        try {
          std::rethrow_exception(failures[slot]);
        } catch (const std::exception& e) {
          cause = e.what();
        } catch (...) {
          cause = "unknown error";
        }
        throw ChainRunError(static_cast<int>(stage), model.name,
                            item.doc->id, cause, partial_result());
      }
      const GenerationResult& response = responses[slot];
      const auto answer = extract_answer(response.raw_text, options.markers);
      const bool accepted = validate_response(answer, item.candidates);

      PredictionRecord& record = item.record;
      record.model_name = model.name;
      record.raw_response = response.raw_text;
      record.answer = answer;
      record.in_document = accepted;
      record.elapsed_seconds_total += response.elapsed_seconds;

      trace.per_document.push_back(StageDocumentOutcome{
          item.doc->id, response.elapsed_seconds, answer, accepted});
      if (accepted) {
        record.stage_index = static_cast<int>(stage);
        fill_matches_target(record, *item.doc);
        resolved_records.push_back(record);
        ++trace.resolved;
      } else {
        still_unresolved.push_back(worklist[slot]);
        ++trace.unresolved;
      }
    }
    result.stages.push_back(std::move(trace));
    worklist = std::move(still_unresolved);
  }

  // Documents that survived every stage keep their last answer fields.
  std::vector<PredictionRecord> unresolved_records;
  unresolved_records.reserve(worklist.size());
  for (std::size_t idx : worklist) {
    WorkItem& item = items[idx];
    fill_matches_target(item.record, *item.doc);
    unresolved_records.push_back(std::move(item.record));
  }

  result.records = merge(std::move(resolved_records),
                         std::move(unresolved_records), corpus);
  return result;
}

}  // namespace lmc
