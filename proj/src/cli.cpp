#include "lmc/cli.hpp"

#include <fstream>
#include <memory>
#include <ostream>

#include "lmc/cascade.hpp"
#include "lmc/chain_builder.hpp"
#include "lmc/corpus.hpp"
#include "lmc/eval.hpp"
#include "lmc/io.hpp"

namespace lmc {

namespace {

void validate_backend_choice(const RunConfig& config) {
  const bool real = !config.backend_url.empty();
  const bool mock = !config.mock_script.empty();
  if (real == mock)
    throw ConfigError(
        "exactly one of --backend-url and --mock-script must be given");
  if (config.concurrency_limit < 1)
    throw ConfigError("concurrency limit must be at least 1");
  if (!(config.timeout_seconds > 0.0))
    throw ConfigError("timeout must be positive");
}

std::unique_ptr<Backend> make_backend(const RunConfig& config) {
  validate_backend_choice(config);
  if (!config.mock_script.empty())
    return std::make_unique<MockBackend>(
        MockBackend::parse_script(config.mock_script),
        config.concurrency_limit);
  HttpBackendConfig http;
  http.base_url = config.backend_url;
  http.timeout_seconds = config.timeout_seconds;
  http.max_in_flight = config.concurrency_limit;
  return std::make_unique<HttpBackend>(std::move(http));
}

PromptTemplate prompt_for(const RunConfig& config) {
  if (config.prompt_override) return PromptTemplate{*config.prompt_override};
  return default_prompt_template();
}

void ensure_output_dir(const RunConfig& config) {
  if (config.output_dir.empty())
    throw ConfigError("an output directory is required (--out)");
  std::filesystem::create_directories(config.output_dir);
}

std::string sanitize_filename(const std::string& name) {
  std::string out;
  out.reserve(name.size());
  for (char c : name) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                      (c >= '0' && c <= '9') || c == '.' || c == '-' ||
                      c == '_';
    out.push_back(keep ? c : '_');
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LoadError("cannot write " + path.string());
  out << body;
}

void flush_failure(const RunConfig& config, const ChainRunError& error) {
  ensure_output_dir(config);
  write_records_jsonl(config.output_dir / "partial_records.jsonl",
                      error.partial().records);
  write_stages_jsonl(config.output_dir / "partial_stages.jsonl",
                     error.partial().stages);
  write_file(config.output_dir / "FAILURE", std::string(error.what()) + "\n");
}

}  // namespace

int cmd_bench(const RunConfig& config, const std::vector<std::string>& models,
              std::ostream& out) {
  if (models.empty())
    throw std::invalid_argument("bench requires at least one model");
  auto backend = make_backend(config);
  ensure_output_dir(config);
  const Corpus corpus = load_corpus(config.corpus_manifest);
  const PromptTemplate prompt = prompt_for(config);

  std::vector<MetricsReport> reports;
  for (const std::string& name : models) {
    ChainConfig single{name, {ModelSpec{name, {}}}, prompt};
    ChainRunResult run;
    try {
      run = run_chain(corpus, single, *backend,
                      RunOptions{config.concurrency_limit, {}});
    } catch (const ChainRunError& e) {
      flush_failure(config, e);
      out << "bench failed: " << e.what() << "\n";
      return kExitFailure;
    }
    write_records_jsonl(
        config.output_dir / ("records_" + sanitize_filename(name) + ".jsonl"),
        run.records);
    for (MetricsReport& report : report_chain_run(name, run, corpus)) {
      report.per_stage.clear();  // a standalone model has no stage breakdown
      reports.push_back(std::move(report));
    }
  }

  const std::string table = render_report_table(reports);
  write_file(config.output_dir / "report.csv", table);
  out << table;
  return kExitOk;
}

int cmd_chain(const RunConfig& config, const std::filesystem::path& chain_file,
              std::ostream& out) {
  auto backend = make_backend(config);
  ensure_output_dir(config);
  const Corpus corpus = load_corpus(config.corpus_manifest);
  ChainConfig chain = load_chain_config(chain_file);
  if (config.prompt_override) chain.prompt = prompt_for(config);

  ChainRunResult run;
  try {
    run = run_chain(corpus, chain, *backend,
                    RunOptions{config.concurrency_limit, {}});
  } catch (const ChainRunError& e) {
    flush_failure(config, e);
    out << "chain run failed: " << e.what() << "\n";
    return kExitFailure;
  }

  write_records_jsonl(config.output_dir / "records.jsonl", run.records);
  write_stages_jsonl(config.output_dir / "stages.jsonl", run.stages);
  const std::string table =
      render_report_table(report_chain_run(chain.id, run, corpus));
  write_file(config.output_dir / "report.csv", table);
  out << table;
  return kExitOk;
}

int cmd_propose(const RunConfig& config,
                const std::filesystem::path& bench_report, int k,
                std::ostream& out) {
  if (k < 2) throw std::invalid_argument("-k must be at least 2");
  ensure_output_dir(config);

  std::ifstream in(bench_report, std::ios::binary);
  if (!in) throw LoadError("cannot open " + bench_report.string());
  const std::string csv(std::istreambuf_iterator<char>(in), {});
  const std::vector<ReportRow> rows = parse_report_table(csv);
  const std::vector<ModelBenchmark> benchmarks = benchmarks_from_report(rows);

  const std::vector<ChainProposal> proposals =
      propose_chains(benchmarks, k, ScoreMode::kInDocument);

  std::string ranking = "rank,model,mean_tps,f1,residual\n";
  for (std::size_t i = 0; i < proposals.front().residuals.size(); ++i) {
    const RankedModel& r = proposals.front().residuals[i];
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%zu,%s,%.3f,%.1f,%.3f\n", i + 1,
                  r.benchmark.model.name.c_str(), r.benchmark.mean_tps,
                  r.benchmark.f1_in_document, r.residual);
    ranking += buf;
  }
  write_file(config.output_dir / "ranking.csv", ranking);

  for (const ChainProposal& proposal : proposals) {
    const auto path = config.output_dir /
                      ("proposal_" + sanitize_filename(proposal.chain.id) +
                       ".json");
    save_proposal(path, proposal);
    out << proposal.chain.id << ": " << proposal.rationale << "\n";
  }
  out << "wrote " << proposals.size() << " proposals to "
      << config.output_dir.string() << "\n";
  return kExitOk;
}

int cmd_extract(const RunConfig& config,
                const std::filesystem::path& chain_file,
                const std::filesystem::path& text_file, std::ostream& out) {
  auto backend = make_backend(config);
  ChainConfig chain = load_chain_config(chain_file);
  if (config.prompt_override) chain.prompt = prompt_for(config);

  std::ifstream in(text_file, std::ios::binary);
  if (!in) throw LoadError("cannot open " + text_file.string());
  const std::string raw(std::istreambuf_iterator<char>(in), {});
  if (!is_valid_utf8(raw))
    throw LoadError(text_file.string() + " is not valid UTF-8");

  Document doc;
  doc.id = text_file.stem().string();
  doc.text = normalize_text(raw);
  doc.char_count = count_scalar_values(doc.text);
  Corpus corpus;
  corpus.documents.push_back(std::move(doc));
  corpus.source_path = text_file.string();

  const ChainRunResult run =
      run_chain(corpus, chain, *backend,
                RunOptions{config.concurrency_limit, {}});
  const PredictionRecord& record = run.records.front();

  char seconds[32];
  std::snprintf(seconds, sizeof(seconds), "%.3f",
                record.elapsed_seconds_total);
  if (record.stage_index) {
    out << record.answer->to_string() << "\tstage=" << *record.stage_index
        << "\tmodel=" << *record.model_name << "\tseconds=" << seconds
        << "\n";
    return kExitOk;
  }
  out << "NOT_FOUND\tstage=-\tmodel=-\tseconds=" << seconds << "\n";
  return kExitUnresolved;
}

int cmd_report(const RunConfig& config,
               const std::filesystem::path& records_file,
               const std::string& subject, std::ostream& out) {
  ensure_output_dir(config);
  const Corpus corpus = load_corpus(config.corpus_manifest);
  const std::vector<PredictionRecord> records =
      read_records_jsonl(records_file);

  ChainRunResult run;
  run.records = records;
  const std::string table =
      render_report_table(report_chain_run(subject, run, corpus));
  write_file(config.output_dir / "report.csv", table);
  out << table;
  return kExitOk;
}

}  // namespace lmc
