#include "lmc/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "lmc/errors.hpp"

namespace lmc {

namespace {

std::string fmt(double value, const char* spec) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, value);
  return buf;
}

double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

struct DocFacts {
  const Document* doc = nullptr;
  bool has_candidates = false;
};

std::unordered_map<std::string, DocFacts> corpus_facts(const Corpus& corpus) {
  std::unordered_map<std::string, DocFacts> facts;
  facts.reserve(corpus.documents.size());
  for (const Document& doc : corpus.documents)
    facts[doc.id] = DocFacts{&doc, !extract_candidates(doc.text).empty()};
  return facts;
}

void tally(ConfusionMatrix& m, bool answered, bool correct, bool obtainable) {
  if (answered)
    correct ? ++m.tp : ++m.fp;
  else
    obtainable ? ++m.fn : ++m.tn;
}

}  // namespace

std::string to_string(ScoreMode mode) {
  return mode == ScoreMode::kInDocument ? "in_document" : "matches_target";
}

ConfusionMatrix score(std::span<const PredictionRecord> records,
                      const Corpus& corpus, ScoreMode mode) {
  if (records.size() != corpus.documents.size())
    throw std::invalid_argument("score: record/document count mismatch");
  auto facts = corpus_facts(corpus);

  std::unordered_set<std::string> seen;
  seen.reserve(records.size());
  ConfusionMatrix m;
  for (const PredictionRecord& record : records) {
    auto it = facts.find(record.document_id);
    if (it == facts.end())
      throw std::invalid_argument("score: record for unknown document '" +
                                  record.document_id + "'");
    if (!seen.insert(record.document_id).second)
      throw std::invalid_argument("score: duplicate record for document '" +
                                  record.document_id + "'");
    const DocFacts& doc = it->second;
    const bool answered = record.answer.has_value();
    if (mode == ScoreMode::kInDocument) {
      tally(m, answered, record.in_document, doc.has_candidates);
    } else {
      tally(m, answered, record.matches_target.value_or(false),
            doc.doc->target.has_value());
    }
  }
  return m;
}

ConfusionMatrix score_stage(const StageTrace& stage, const Corpus& corpus,
                            ScoreMode mode) {
  auto facts = corpus_facts(corpus);
  ConfusionMatrix m;
  for (const StageDocumentOutcome& outcome : stage.per_document) {
    auto it = facts.find(outcome.document_id);
    if (it == facts.end())
      throw std::invalid_argument("score_stage: unknown document '" +
                                  outcome.document_id + "'");
    const DocFacts& doc = it->second;
    const bool answered = outcome.answer.has_value();
    if (mode == ScoreMode::kInDocument) {
      tally(m, answered, outcome.accepted, doc.has_candidates);
    } else {
      const bool correct = answered && doc.doc->target.has_value() &&
                           *outcome.answer == *doc.doc->target;
      tally(m, answered, correct, doc.doc->target.has_value());
    }
  }
  return m;
}

double f1_score(double precision, double recall) {
  if (precision + recall <= 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

Metrics compute_metrics(const ConfusionMatrix& m) {
  Metrics out;
  const double tp = static_cast<double>(m.tp);
  if (m.tp + m.fp > 0) out.precision = 100.0 * tp / static_cast<double>(m.tp + m.fp);
  if (m.tp + m.fn > 0) out.recall = 100.0 * tp / static_cast<double>(m.tp + m.fn);
  out.f1 = f1_score(out.precision, out.recall);
  return out;
}

double tokens_per_second(const Document& doc, double elapsed_seconds) {
  if (!(elapsed_seconds > 0.0))
    throw std::invalid_argument("tokens_per_second: non-positive seconds");
  return static_cast<double>(doc.char_count) / (4.0 * elapsed_seconds);
}

double chain_tps(const Document& doc, const PredictionRecord& record) {
  return tokens_per_second(doc, record.elapsed_seconds_total);
}

TpsStats summarize_tps(std::vector<double> samples) {
  if (samples.empty())
    throw std::invalid_argument("summarize_tps: empty sample");
  std::sort(samples.begin(), samples.end());
  TpsStats stats;
  stats.min = samples.front();
  stats.max = samples.back();
  stats.q1 = quantile(samples, 0.25);
  stats.median = quantile(samples, 0.5);
  stats.q3 = quantile(samples, 0.75);
  stats.mean = std::accumulate(samples.begin(), samples.end(), 0.0) /
               static_cast<double>(samples.size());
  return stats;
}

double reciprocal_mean_tps(const MetricsReport& report) {
  if (!(report.tps.mean > 0.0))
    throw std::invalid_argument("reciprocal_mean_tps: non-positive mean");
  return 1.0 / report.tps.mean;
}

std::vector<MetricsReport> report_chain_run(const std::string& subject,
                                            const ChainRunResult& run,
                                            const Corpus& corpus) {
  std::unordered_map<std::string, const Document*> docs;
  for (const Document& doc : corpus.documents) docs[doc.id] = &doc;

  std::vector<double> combined_tps;
  combined_tps.reserve(run.records.size());
  for (const PredictionRecord& record : run.records)
    combined_tps.push_back(chain_tps(*docs.at(record.document_id), record));

  std::vector<MetricsReport> reports;
  for (ScoreMode mode : {ScoreMode::kInDocument, ScoreMode::kMatchesTarget}) {
    MetricsReport report;
    report.subject = subject;
    report.mode = mode;
    report.matrix = score(run.records, corpus, mode);
    report.metrics = compute_metrics(report.matrix);
    if (!combined_tps.empty()) report.tps = summarize_tps(combined_tps);
    report.n_documents = corpus.documents.size();

    for (const StageTrace& stage : run.stages) {
      StageReport sr;
      sr.stage_index = stage.stage_index;
      sr.model_name = stage.model_name;
      sr.documents_in = stage.documents_in;
      sr.matrix = score_stage(stage, corpus, mode);
      sr.metrics = compute_metrics(sr.matrix);
      std::vector<double> stage_tps;
      stage_tps.reserve(stage.per_document.size());
      for (const StageDocumentOutcome& outcome : stage.per_document)
        stage_tps.push_back(
            tokens_per_second(*docs.at(outcome.document_id), outcome.seconds));
      if (!stage_tps.empty()) sr.tps = summarize_tps(stage_tps);
      report.per_stage.push_back(std::move(sr));
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

std::string render_report_table(std::span<const MetricsReport> reports) {
  std::ostringstream out;
  out << "subject,mode,n,tp,fp,fn,tn,precision,recall,f1,"
         "tps_min,tps_q1,tps_median,tps_mean,tps_q3,tps_max\n";

  auto row = [&](const std::string& subject, ScoreMode mode, std::size_t n,
                 const ConfusionMatrix& m, const Metrics& metrics,
                 const TpsStats& tps) {
    out << subject << ',' << to_string(mode) << ',' << n << ',' << m.tp << ','
        << m.fp << ',' << m.fn << ',' << m.tn << ','
        << fmt(metrics.precision, "%.1f") << ',' << fmt(metrics.recall, "%.1f")
        << ',' << fmt(metrics.f1, "%.1f") << ',' << fmt(tps.min, "%.3f") << ','
        << fmt(tps.q1, "%.3f") << ',' << fmt(tps.median, "%.3f") << ','
        << fmt(tps.mean, "%.3f") << ',' << fmt(tps.q3, "%.3f") << ','
        << fmt(tps.max, "%.3f") << '\n';
  };

  for (const MetricsReport& report : reports) {
    row(report.subject, report.mode, report.n_documents, report.matrix,
        report.metrics, report.tps);
    for (const StageReport& sr : report.per_stage)
      row(report.subject + "/" + std::to_string(sr.stage_index) + ":" +
              sr.model_name,
          report.mode, static_cast<std::size_t>(sr.documents_in), sr.matrix,
          sr.metrics, sr.tps);
  }
  return std::move(out).str();
}

std::vector<ReportRow> parse_report_table(const std::string& csv) {
  std::vector<ReportRow> rows;
  std::istringstream in(csv);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first) {
      first = false;
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 16)
      throw LoadError("malformed report row: " + line);

    ReportRow row;
    row.subject = fields[0];
    if (fields[1] == "in_document")
      row.mode = ScoreMode::kInDocument;
    else if (fields[1] == "matches_target")
      row.mode = ScoreMode::kMatchesTarget;
    else
      throw LoadError("unknown score mode: " + fields[1]);
    try {
      row.n_documents = std::stoul(fields[2]);
      row.matrix = ConfusionMatrix{std::stol(fields[3]), std::stol(fields[4]),
                                   std::stol(fields[5]), std::stol(fields[6])};
      row.metrics =
          Metrics{std::stod(fields[7]), std::stod(fields[8]),
                  std::stod(fields[9])};
      row.tps = TpsStats{std::stod(fields[10]), std::stod(fields[11]),
                         std::stod(fields[12]), std::stod(fields[13]),
                         std::stod(fields[14]), std::stod(fields[15])};
    } catch (const std::exception&) {
      throw LoadError("unparseable number in report row: " + line);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace lmc
