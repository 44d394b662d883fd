#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lmc/cli.hpp"
#include "lmc/errors.hpp"

namespace {

std::string read_file_or_throw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw lmc::LoadError("cannot open prompt file: " + path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void add_common_options(CLI::App* cmd, lmc::RunConfig& config,
                        std::string& prompt_file, bool with_backend = true) {
  cmd->add_option("--manifest", config.corpus_manifest,
                  "corpus manifest (id,path[,DD/MM/YYYY] per line)");
  if (with_backend) {
    cmd->add_option("--backend-url", config.backend_url,
                    "generate endpoint base URL, e.g. http://127.0.0.1:11434")
        ->envname("LMCHAIN_BACKEND_URL");
    cmd->add_option("--mock-script", config.mock_script,
                    "scripted mock backend (model\\tdoc\\tseconds\\tresponse)");
    cmd->add_option("--concurrency", config.concurrency_limit,
                    "max in-flight requests per stage")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--timeout", config.timeout_seconds,
                    "request timeout in seconds")
        ->envname("LMCHAIN_TIMEOUT_SECONDS")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--prompt-file", prompt_file,
                    "file holding a prompt template with one '_' placeholder");
  }
  cmd->add_option("--out", config.output_dir, "output directory");
}

}  // namespace

namespace {

int run_cli(int argc, char** argv) {
  CLI::App app{
      "lmchain: cascading language-model extraction with candidate-answer "
      "validation"};
  app.require_subcommand(1);

  lmc::RunConfig config;
  std::string prompt_file;

  auto* bench = app.add_subcommand(
      "bench", "benchmark models standalone over a corpus");
  std::vector<std::string> models;
  add_common_options(bench, config, prompt_file);
  bench->add_option("--models", models, "model names to benchmark")
      ->required()
      ->delimiter(',');
  bench->get_option("--manifest")->required();
  bench->get_option("--out")->required();

  auto* chain = app.add_subcommand("chain", "run a model chain over a corpus");
  std::string chain_file;
  add_common_options(chain, config, prompt_file);
  chain->add_option("--chain", chain_file, "chain configuration JSON")
      ->required();
  chain->get_option("--manifest")->required();
  chain->get_option("--out")->required();

  auto* propose =
      app.add_subcommand("propose", "build chain proposals from a bench report");
  std::string bench_report;
  int k = 0;
  add_common_options(propose, config, prompt_file, /*with_backend=*/false);
  propose->add_option("--bench-report", bench_report, "bench report.csv")
      ->required();
  propose->add_option("--k,-k", k, "chain length")->required();
  propose->get_option("--out")->required();

  auto* extract = app.add_subcommand(
      "extract", "extract the date of birth from one text file");
  std::string text_file;
  add_common_options(extract, config, prompt_file);
  extract->add_option("--chain", chain_file, "chain configuration JSON")
      ->required();
  extract->add_option("--text", text_file, "plain-text input file")
      ->required();

  auto* report = app.add_subcommand(
      "report", "re-derive a report table from stored prediction records");
  std::string records_file;
  std::string subject = "records";
  add_common_options(report, config, prompt_file, /*with_backend=*/false);
  report->add_option("--records", records_file, "prediction records JSONL")
      ->required();
  report->add_option("--subject", subject, "subject label for the table");
  report->get_option("--manifest")->required();
  report->get_option("--out")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? lmc::kExitOk : lmc::kExitUsage;
  }

  try {
    if (!prompt_file.empty())
      config.prompt_override = read_file_or_throw(prompt_file);

    if (bench->parsed()) return lmc::cmd_bench(config, models, std::cout);
    if (chain->parsed()) return lmc::cmd_chain(config, chain_file, std::cout);
    if (propose->parsed())
      return lmc::cmd_propose(config, bench_report, k, std::cout);
    if (extract->parsed())
      return lmc::cmd_extract(config, chain_file, text_file, std::cout);
    if (report->parsed())
      return lmc::cmd_report(config, records_file, subject, std::cout);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return lmc::kExitUsage;
  } catch (const lmc::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return lmc::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return lmc::kExitFailure;
  }
  return lmc::kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << "\n";
    return lmc::kExitFailure;
  }
}
