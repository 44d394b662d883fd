#include "lmc/io.hpp"

#include <fstream>

#include "lmc/errors.hpp"

namespace lmc {

namespace {

using nlohmann::json;

json date_to_json(const std::optional<CanonicalDate>& date) {
  if (!date) return nullptr;
  return date->to_string();
}

std::optional<CanonicalDate> date_from_json(const json& j,
                                            const std::string& context) {
  if (j.is_null()) return std::nullopt;
  if (!j.is_string())
    throw LoadError(context + ": date field must be a string or null");
  auto date = parse_strict_ddmmyyyy(j.get<std::string>());
  if (!date)
    throw LoadError(context + ": invalid date '" + j.get<std::string>() + "'");
  return date;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LoadError("cannot write " + path.string());
  out << content;
}

json parse_json(const std::string& text, const std::string& context) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw LoadError(context + ": malformed JSON");
  return j;
}

}  // namespace

json to_json(const PredictionRecord& record) {
  json j;
  j["document_id"] = record.document_id;
  j["stage_index"] =
      record.stage_index ? json(*record.stage_index) : json(nullptr);
  j["model_name"] =
      record.model_name ? json(*record.model_name) : json(nullptr);
  j["raw_response"] =
      record.raw_response ? json(*record.raw_response) : json(nullptr);
  j["answer"] = date_to_json(record.answer);
  j["in_document"] = record.in_document;
  j["matches_target"] =
      record.matches_target ? json(*record.matches_target) : json(nullptr);
  j["elapsed_seconds_total"] = record.elapsed_seconds_total;
  return j;
}

PredictionRecord record_from_json(const json& j) {
  PredictionRecord record;
  try {
    record.document_id = j.at("document_id").get<std::string>();
    if (!j.at("stage_index").is_null())
      record.stage_index = j.at("stage_index").get<int>();
    if (!j.at("model_name").is_null())
      record.model_name = j.at("model_name").get<std::string>();
    if (!j.at("raw_response").is_null())
      record.raw_response = j.at("raw_response").get<std::string>();
    record.answer = date_from_json(j.at("answer"), "prediction record");
    record.in_document = j.at("in_document").get<bool>();
    if (!j.at("matches_target").is_null())
      record.matches_target = j.at("matches_target").get<bool>();
    record.elapsed_seconds_total = j.at("elapsed_seconds_total").get<double>();
  } catch (const json::exception& e) {
    throw LoadError(std::string("malformed prediction record: ") + e.what());
  }
  return record;
}

json to_json(const StageTrace& trace) {
  json docs = json::array();
  for (const StageDocumentOutcome& outcome : trace.per_document) {
    docs.push_back({{"document_id", outcome.document_id},
                    {"seconds", outcome.seconds},
                    {"answer", date_to_json(outcome.answer)},
                    {"accepted", outcome.accepted}});
  }
  return json{{"stage_index", trace.stage_index},
              {"model_name", trace.model_name},
              {"documents_in", trace.documents_in},
              {"resolved", trace.resolved},
              {"unresolved", trace.unresolved},
              {"per_document", std::move(docs)}};
}

StageTrace stage_from_json(const json& j) {
  StageTrace trace;
  try {
    trace.stage_index = j.at("stage_index").get<int>();
    trace.model_name = j.at("model_name").get<std::string>();
    trace.documents_in = j.at("documents_in").get<int>();
    trace.resolved = j.at("resolved").get<int>();
    trace.unresolved = j.at("unresolved").get<int>();
    for (const json& doc : j.at("per_document")) {
      StageDocumentOutcome outcome;
      outcome.document_id = doc.at("document_id").get<std::string>();
      outcome.seconds = doc.at("seconds").get<double>();
      outcome.answer = date_from_json(doc.at("answer"), "stage trace");
      outcome.accepted = doc.at("accepted").get<bool>();
      trace.per_document.push_back(std::move(outcome));
    }
  } catch (const json::exception& e) {
    throw LoadError(std::string("malformed stage trace: ") + e.what());
  }
  return trace;
}

json to_json(const ChainConfig& chain) {
  json models = json::array();
  for (const ModelSpec& model : chain.models) {
    models.push_back({{"name", model.name},
                      {"options",
                       {{"temperature", model.options.temperature},
                        {"random_seed", model.options.random_seed},
                        {"repeat_last_n", model.options.repeat_last_n}}}});
  }
  return json{{"id", chain.id},
              {"models", std::move(models)},
              {"prompt", chain.prompt.text}};
}

ChainConfig chain_from_json(const json& j) {
  ChainConfig chain;
  try {
    chain.id = j.at("id").get<std::string>();
    for (const json& entry : j.at("models")) {
      ModelSpec model;
      if (entry.is_string()) {
        model.name = entry.get<std::string>();
      } else {
        model.name = entry.at("name").get<std::string>();
        if (entry.contains("options")) {
          const json& opts = entry["options"];
          model.options.temperature = opts.value("temperature", 0.0);
          model.options.random_seed = opts.value("random_seed", 0);
          model.options.repeat_last_n = opts.value("repeat_last_n", 0);
        }
      }
      if (model.name.empty())
        throw ConfigError("chain model entry has an empty name");
      chain.models.push_back(std::move(model));
    }
    chain.prompt = j.contains("prompt") && !j["prompt"].is_null()
                       ? PromptTemplate{j["prompt"].get<std::string>()}
                       : default_prompt_template();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed chain configuration: ") +
                      e.what());
  }
  if (chain.models.empty())
    throw ConfigError("chain configuration lists no models");
  return chain;
}

void write_records_jsonl(const std::filesystem::path& path,
                         std::span<const PredictionRecord> records) {
  std::string out;
  for (const PredictionRecord& record : records) {
    out += to_json(record).dump();
    out += '\n';
  }
  write_text_file(path, out);
}

std::vector<PredictionRecord> read_records_jsonl(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path.string());
  std::vector<PredictionRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(record_from_json(parse_json(line, path.string())));
  }
  return records;
}

void write_stages_jsonl(const std::filesystem::path& path,
                        std::span<const StageTrace> stages) {
  std::string out;
  for (const StageTrace& stage : stages) {
    out += to_json(stage).dump();
    out += '\n';
  }
  write_text_file(path, out);
}

std::vector<StageTrace> read_stages_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path.string());
  std::vector<StageTrace> stages;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    stages.push_back(stage_from_json(parse_json(line, path.string())));
  }
  return stages;
}

ChainConfig load_chain_config(const std::filesystem::path& path) {
  return chain_from_json(parse_json(read_text_file(path), path.string()));
}

void save_chain_config(const std::filesystem::path& path,
                       const ChainConfig& chain) {
  write_text_file(path, to_json(chain).dump(2) + "\n");
}

void save_proposal(const std::filesystem::path& path,
                   const ChainProposal& proposal) {
  json j = to_json(proposal.chain);
  j["rationale"] = proposal.rationale;
  json ranking = json::array();
  for (const RankedModel& r : proposal.residuals) {
    ranking.push_back({{"model", r.benchmark.model.name},
                       {"mean_tps", r.benchmark.mean_tps},
                       {"residual", r.residual}});
  }
  j["residuals"] = std::move(ranking);
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace lmc
