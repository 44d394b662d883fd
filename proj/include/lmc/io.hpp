#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "lmc/cascade.hpp"
#include "lmc/chain_builder.hpp"

namespace lmc {

// File formats shared by the CLI and anything replaying its outputs.
// Prediction records and stage traces are line-delimited JSON so long runs
// stay appendable and auditable; chain configurations and proposals are
// single JSON documents.

nlohmann::json to_json(const PredictionRecord& record);
PredictionRecord record_from_json(const nlohmann::json& j);

nlohmann::json to_json(const StageTrace& trace);
StageTrace stage_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ChainConfig& chain);
ChainConfig chain_from_json(const nlohmann::json& j);

void write_records_jsonl(const std::filesystem::path& path,
                         std::span<const PredictionRecord> records);
std::vector<PredictionRecord> read_records_jsonl(
    const std::filesystem::path& path);

void write_stages_jsonl(const std::filesystem::path& path,
                        std::span<const StageTrace> stages);
std::vector<StageTrace> read_stages_jsonl(const std::filesystem::path& path);

// Chain configuration document:
//   {"id": "...", "models": ["name" | {"name": ..., "options": {...}}, ...],
//    "prompt": "optional template override"}
ChainConfig load_chain_config(const std::filesystem::path& path);
void save_chain_config(const std::filesystem::path& path,
                       const ChainConfig& chain);

// A proposal file is a loadable chain configuration with the rationale and
// residual ranking attached; load_chain_config ignores the extras.
void save_proposal(const std::filesystem::path& path,
                   const ChainProposal& proposal);

}  // namespace lmc
