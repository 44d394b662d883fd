#include "lmc/chain_builder.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace lmc {

CorrelationLine fit_correlation(std::span<const ModelBenchmark> benchmarks,
                                ScoreMode mode) {
  if (benchmarks.size() < 2)
    throw FitError("correlation fit needs at least 2 benchmarks, got " +
                   std::to_string(benchmarks.size()));

  const double n = static_cast<double>(benchmarks.size());
  double sum_x = 0.0, sum_y = 0.0, max_y = benchmarks[0].f1(mode);
  for (const ModelBenchmark& b : benchmarks) {
    sum_x += b.mean_tps;
    sum_y += b.f1(mode);
    max_y = std::max(max_y, b.f1(mode));
  }
  const double mean_x = sum_x / n;
  const double mean_y = sum_y / n;

  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  double anchored_num = 0.0, anchored_den = 0.0;
  for (const ModelBenchmark& b : benchmarks) {
    const double dx = b.mean_tps - mean_x;
    const double dy = b.f1(mode) - mean_y;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
    anchored_num += b.mean_tps * (b.f1(mode) - max_y);
    anchored_den += b.mean_tps * b.mean_tps;
  }
  if (sxx <= 0.0)
    throw FitError("correlation fit needs distinct mean TPS values");

  CorrelationLine line;
  line.anchor_y = max_y;
  line.slope = anchored_den > 0.0 ? anchored_num / anchored_den : 0.0;
  line.pearson_r = syy > 0.0 ? sxy / std::sqrt(sxx * syy) : 0.0;
  return line;
}

std::vector<RankedModel> rank_by_residual(
    std::span<const ModelBenchmark> benchmarks, const CorrelationLine& line,
    ScoreMode mode) {
  std::vector<RankedModel> ranked;
  ranked.reserve(benchmarks.size());
  for (const ModelBenchmark& b : benchmarks)
    ranked.push_back(RankedModel{b, b.f1(mode) - line.value_at(b.mean_tps)});

  std::sort(ranked.begin(), ranked.end(),
            [](const RankedModel& a, const RankedModel& b) {
              if (a.residual != b.residual) return a.residual > b.residual;
              if (a.benchmark.mean_tps != b.benchmark.mean_tps)
                return a.benchmark.mean_tps > b.benchmark.mean_tps;
              return a.benchmark.model.name < b.benchmark.model.name;
            });
  return ranked;
}

namespace {

ChainConfig make_chain(const std::string& id,
                       const std::vector<ModelBenchmark>& members) {
  ChainConfig chain;
  chain.id = id;
  chain.prompt = default_prompt_template();
  for (const ModelBenchmark& b : members) chain.models.push_back(b.model);
  return chain;
}

std::string member_names(const std::vector<ModelBenchmark>& members) {
  std::ostringstream names;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (i) names << ", ";
    names << members[i].model.name;
  }
  return names.str();
}

}  // namespace

std::vector<ChainProposal> propose_chains(
    std::span<const ModelBenchmark> benchmarks, int k, ScoreMode mode) {
  if (k < 2) throw std::invalid_argument("chain length must be at least 2");
  const CorrelationLine line = fit_correlation(benchmarks, mode);
  if (static_cast<std::size_t>(k) > benchmarks.size())
    throw std::invalid_argument(
        "chain length " + std::to_string(k) + " exceeds the " +
        std::to_string(benchmarks.size()) + " available benchmarks");
  const std::vector<RankedModel> ranked =
      rank_by_residual(benchmarks, line, mode);

  std::vector<ModelBenchmark> top;
  top.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) top.push_back(ranked[static_cast<std::size_t>(i)].benchmark);
  // Fastest first: cheap models take the bulk, slow ones mop up.
  std::sort(top.begin(), top.end(),
            [](const ModelBenchmark& a, const ModelBenchmark& b) {
              if (a.mean_tps != b.mean_tps) return a.mean_tps > b.mean_tps;
              return a.model.name < b.model.name;
            });

  std::vector<ChainProposal> proposals;
  auto add = [&](const std::string& id,
                 const std::vector<ModelBenchmark>& members,
                 const std::string& why) {
    ChainProposal proposal;
    proposal.chain = make_chain(id, members);
    proposal.rationale = why + " (" + member_names(members) + ")";
    proposal.residuals = ranked;
    proposals.push_back(std::move(proposal));
  };

  add("top" + std::to_string(k) + "_fastest_first", top,
      "the " + std::to_string(k) +
          " models furthest above the correlation line, fastest first");

  std::vector<ModelBenchmark> prefix(top.begin(), top.end() - 1);
  if (prefix.size() >= 2) {
    add("top" + std::to_string(k) + "_prefix", prefix,
        "the same selection without its slowest member");
    std::vector<ModelBenchmark> reversed(prefix.rbegin(), prefix.rend());
    add("top" + std::to_string(k) + "_prefix_reversed", reversed,
        "the prefix reversed, to probe order sensitivity");
  } else {
    std::vector<ModelBenchmark> reversed(top.rbegin(), top.rend());
    add("top" + std::to_string(k) + "_reversed", reversed,
        "the full selection reversed, to probe order sensitivity");
  }
  return proposals;
}

std::vector<ModelBenchmark> benchmarks_from_report(
    std::span<const ReportRow> rows) {
  std::map<std::string, ModelBenchmark> by_subject;
  std::vector<std::string> order;
  for (const ReportRow& row : rows) {
    auto it = by_subject.find(row.subject);
    if (it == by_subject.end()) {
      ModelBenchmark b;
      b.model.name = row.subject;
      b.mean_tps = row.tps.mean;
      it = by_subject.emplace(row.subject, std::move(b)).first;
      order.push_back(row.subject);
    }
    if (row.mode == ScoreMode::kInDocument)
      it->second.f1_in_document = row.metrics.f1;
    else
      it->second.f1_matches_target = row.metrics.f1;
  }
  std::vector<ModelBenchmark> benchmarks;
  benchmarks.reserve(order.size());
  for (const std::string& subject : order)
    benchmarks.push_back(by_subject.at(subject));
  return benchmarks;
}

}  // namespace lmc
