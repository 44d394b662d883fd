#include "lmc/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "lmc/errors.hpp"
#include "lmc/io.hpp"
#include "test_support.hpp"

using lmc::ConfigError;
using lmc::RunConfig;
using test_support::slurp;
using test_support::TempDir;

namespace {

// A three-document corpus where every text carries its target plus a decoy.
void write_corpus(const TempDir& dir) {
  dir.write("docs/a.txt", "dob 01/02/1990\nseen 03/04/2020\n");
  dir.write("docs/b.txt", "dob 05/06/1985\nseen 07/08/2021\n");
  dir.write("docs/c.txt", "dob 09/10/1970\nseen 11/12/2022\n");
  dir.write("manifest.csv",
            "a,docs/a.txt,01/02/1990\n"
            "b,docs/b.txt,05/06/1985\n"
            "c,docs/c.txt,09/10/1970\n");
}

// fast resolves a and b; slow resolves c.
void write_script(const TempDir& dir) {
  dir.write("script.tsv",
            "fast\ta\t0.5\t01/02/1990\n"
            "fast\tb\t0.5\tThe DOB is 05/06/1985.\n"
            "fast\tc\t0.5\tI do not know\n"
            "slow\ta\t2.0\t01/02/1990\n"
            "slow\tb\t2.0\t05/06/1985\n"
            "slow\tc\t2.0\t<think>check 11/12/2022</think> 09/10/1970\n");
}

RunConfig mock_config(const TempDir& dir, const std::string& out_name) {
  RunConfig config;
  config.corpus_manifest = dir.path() / "manifest.csv";
  config.mock_script = dir.path() / "script.tsv";
  config.output_dir = dir.path() / out_name;
  return config;
}

}  // namespace

TEST_CASE("backend selection must be unambiguous") {
  TempDir dir;
  write_corpus(dir);
  write_script(dir);
  std::ostringstream out;

  RunConfig neither = mock_config(dir, "out");
  neither.mock_script.clear();
  CHECK_THROWS_AS(lmc::cmd_bench(neither, {"fast"}, out), ConfigError);

  RunConfig both = mock_config(dir, "out");
  both.backend_url = "http://127.0.0.1:11434";
  CHECK_THROWS_AS(lmc::cmd_bench(both, {"fast"}, out), ConfigError);

  RunConfig bad_limits = mock_config(dir, "out");
  bad_limits.concurrency_limit = 0;
  CHECK_THROWS_AS(lmc::cmd_bench(bad_limits, {"fast"}, out), ConfigError);
}

TEST_CASE("cmd_bench") {
  TempDir dir;
  write_corpus(dir);
  write_script(dir);
  std::ostringstream out;

  SUBCASE("two models over three documents") {
    RunConfig config = mock_config(dir, "bench_out");
    CHECK(lmc::cmd_bench(config, {"fast", "slow"}, out) == lmc::kExitOk);

    const std::string table = slurp(config.output_dir / "report.csv");
    // One row per subject x mode plus the header.
    CHECK(std::count(table.begin(), table.end(), '\n') == 5);
    CHECK(table.find("fast,in_document,3,") != std::string::npos);
    CHECK(table.find("fast,matches_target,3,") != std::string::npos);
    CHECK(table.find("slow,in_document,3,") != std::string::npos);

    const auto fast_records =
        lmc::read_records_jsonl(config.output_dir / "records_fast.jsonl");
    REQUIRE(fast_records.size() == 3);
    CHECK(fast_records[0].in_document);
    CHECK(fast_records[1].in_document);
    CHECK_FALSE(fast_records[2].in_document);

    // Determinism: a second run produces byte-identical outputs.
    RunConfig again = mock_config(dir, "bench_out2");
    std::ostringstream out2;
    CHECK(lmc::cmd_bench(again, {"fast", "slow"}, out2) == lmc::kExitOk);
    CHECK(slurp(again.output_dir / "report.csv") == table);
  }

  SUBCASE("empty model list is a usage error") {
    RunConfig config = mock_config(dir, "bench_out");
    CHECK_THROWS_AS(lmc::cmd_bench(config, {}, out), std::invalid_argument);
  }

  SUBCASE("unscripted model flushes partial output and fails") {
    RunConfig config = mock_config(dir, "bench_fail");
    CHECK(lmc::cmd_bench(config, {"ghost"}, out) == lmc::kExitFailure);
    CHECK(std::filesystem::exists(config.output_dir / "FAILURE"));
    CHECK(std::filesystem::exists(config.output_dir /
                                  "partial_records.jsonl"));
    CHECK(slurp(config.output_dir / "FAILURE").find("ghost") !=
          std::string::npos);
  }
}

TEST_CASE("cmd_chain") {
  TempDir dir;
  write_corpus(dir);
  write_script(dir);
  dir.write("chain.json", R"({"id": "duo", "models": ["fast", "slow"]})");
  std::ostringstream out;

  SUBCASE("writes records, stages, and the report") {
    RunConfig config = mock_config(dir, "chain_out");
    CHECK(lmc::cmd_chain(config, dir.path() / "chain.json", out) ==
          lmc::kExitOk);

    const auto records =
        lmc::read_records_jsonl(config.output_dir / "records.jsonl");
    REQUIRE(records.size() == 3);
    CHECK(records[0].stage_index == 0);
    CHECK(records[1].stage_index == 0);
    CHECK(records[2].stage_index == 1);  // c needed the slow model

    const auto stages =
        lmc::read_stages_jsonl(config.output_dir / "stages.jsonl");
    REQUIRE(stages.size() == 2);
    CHECK(stages[0].documents_in == 3);
    CHECK(stages[0].resolved == 2);
    CHECK(stages[1].documents_in == 1);

    const std::string table = slurp(config.output_dir / "report.csv");
    CHECK(table.find("duo,in_document,3,3,0,0,0,100.0,100.0,100.0,") !=
          std::string::npos);
    CHECK(table.find("duo/0:fast,") != std::string::npos);
    CHECK(table.find("duo/1:slow,") != std::string::npos);

    // Byte-identical on a second run.
    RunConfig again = mock_config(dir, "chain_out2");
    std::ostringstream out2;
    CHECK(lmc::cmd_chain(again, dir.path() / "chain.json", out2) ==
          lmc::kExitOk);
    CHECK(slurp(again.output_dir / "report.csv") == table);
  }

  SUBCASE("single-model chain matches bench records in substance") {
    RunConfig config = mock_config(dir, "chain_single");
    dir.write("single.json", R"({"id": "solo", "models": ["slow"]})");
    CHECK(lmc::cmd_chain(config, dir.path() / "single.json", out) ==
          lmc::kExitOk);

    RunConfig bench_config = mock_config(dir, "bench_single");
    CHECK(lmc::cmd_bench(bench_config, {"slow"}, out) == lmc::kExitOk);

    const auto chain_records =
        lmc::read_records_jsonl(config.output_dir / "records.jsonl");
    const auto bench_records = lmc::read_records_jsonl(
        bench_config.output_dir / "records_slow.jsonl");
    CHECK(chain_records == bench_records);
  }

  SUBCASE("chain naming an unscripted model fails with its name") {
    RunConfig config = mock_config(dir, "chain_fail");
    dir.write("bad.json", R"({"id": "bad", "models": ["fast", "ghost"]})");
    std::ostringstream captured;
    CHECK(lmc::cmd_chain(config, dir.path() / "bad.json", captured) ==
          lmc::kExitFailure);
    CHECK(captured.str().find("ghost") != std::string::npos);
    CHECK(std::filesystem::exists(config.output_dir / "FAILURE"));
  }
}

TEST_CASE("prompt overrides are validated before any backend call") {
  TempDir dir;
  write_corpus(dir);
  write_script(dir);
  std::ostringstream out;

  RunConfig config = mock_config(dir, "po");
  config.prompt_override = "no placeholder here";
  CHECK_THROWS_AS(lmc::cmd_bench(config, {"fast"}, out), ConfigError);

  config.prompt_override = "DOC: _ ANSWER:";
  CHECK(lmc::cmd_bench(config, {"fast"}, out) == lmc::kExitOk);
}

TEST_CASE("cmd_propose") {
  TempDir dir;
  std::ostringstream out;

  // A synthetic bench report with two clear standouts and one laggard.
  const std::string report =
      "subject,mode,n,tp,fp,fn,tn,precision,recall,f1,"
      "tps_min,tps_q1,tps_median,tps_mean,tps_q3,tps_max\n"
      "quick,in_document,10,9,1,0,0,90.0,100.0,94.7,"
      "900.000,950.000,1000.000,1000.000,1050.000,1100.000\n"
      "quick,matches_target,10,8,2,0,0,80.0,100.0,88.9,"
      "900.000,950.000,1000.000,1000.000,1050.000,1100.000\n"
      "spry,in_document,10,9,1,0,0,90.0,100.0,94.7,"
      "400.000,450.000,500.000,500.000,550.000,600.000\n"
      "spry,matches_target,10,7,3,0,0,70.0,100.0,82.4,"
      "400.000,450.000,500.000,500.000,550.000,600.000\n"
      "slug,in_document,10,5,5,0,0,50.0,100.0,66.7,"
      "40.000,45.000,50.000,50.000,55.000,60.000\n"
      "slug,matches_target,10,5,5,0,0,50.0,100.0,66.7,"
      "40.000,45.000,50.000,50.000,55.000,60.000\n";
  const auto report_path = dir.write("bench_report.csv", report);

  SUBCASE("writes proposals and the ranking") {
    RunConfig config;
    config.output_dir = dir.path() / "proposals";
    CHECK(lmc::cmd_propose(config, report_path, 3, out) == lmc::kExitOk);
    CHECK(std::filesystem::exists(config.output_dir / "ranking.csv"));

    int proposal_files = 0;
    for (const auto& entry :
         std::filesystem::directory_iterator(config.output_dir))
      if (entry.path().filename().string().starts_with("proposal_"))
        ++proposal_files;
    CHECK(proposal_files == 3);

    // Every proposal loads back as a runnable chain.
    const auto chain = lmc::load_chain_config(
        config.output_dir / "proposal_top3_fastest_first.json");
    REQUIRE(chain.models.size() == 3);
    CHECK(chain.models[0].name == "quick");  // fastest first
  }

  SUBCASE("k below 2 is a usage error") {
    RunConfig config;
    config.output_dir = dir.path() / "p2";
    CHECK_THROWS_AS(lmc::cmd_propose(config, report_path, 0, out),
                    std::invalid_argument);
  }

  SUBCASE("single-row report surfaces a fit error") {
    RunConfig config;
    config.output_dir = dir.path() / "p3";
    const auto tiny = dir.write(
        "tiny.csv",
        "subject,mode,n,tp,fp,fn,tn,precision,recall,f1,"
        "tps_min,tps_q1,tps_median,tps_mean,tps_q3,tps_max\n"
        "only,in_document,1,1,0,0,0,100.0,100.0,100.0,"
        "1.000,1.000,1.000,1.000,1.000,1.000\n");
    CHECK_THROWS_AS(lmc::cmd_propose(config, tiny, 2, out), lmc::FitError);
  }
}

TEST_CASE("cmd_extract") {
  TempDir dir;
  write_corpus(dir);
  write_script(dir);
  dir.write("chain.json", R"({"id": "duo", "models": ["fast", "slow"]})");

  SUBCASE("resolves at stage 0") {
    // The mock keys on the document id, which for extract is the file stem.
    dir.write("extra.tsv",
              "fast\tnote\t0.5\tThe DOB is 14/03/1962.\n"
              "slow\tnote\t2.0\tI do not know\n");
    dir.write("note.txt", "dob 14/03/1962 seen 01/01/2020\n");
    RunConfig config = mock_config(dir, "x1");
    config.mock_script = dir.path() / "extra.tsv";
    std::ostringstream out;
    CHECK(lmc::cmd_extract(config, dir.path() / "chain.json",
                           dir.path() / "note.txt", out) == lmc::kExitOk);
    CHECK(out.str().find("14/03/1962") != std::string::npos);
    CHECK(out.str().find("stage=0") != std::string::npos);
    CHECK(out.str().find("seconds=0.500") != std::string::npos);
  }

  SUBCASE("no candidates in the text means unresolved") {
    dir.write("empty_note.txt", "no dates here at all\n");
    dir.write("e.tsv",
              "fast\tempty_note\t0.5\t01/01/2000\n"
              "slow\tempty_note\t2.0\t01/01/2000\n");
    RunConfig config = mock_config(dir, "x2");
    config.mock_script = dir.path() / "e.tsv";
    std::ostringstream out;
    CHECK(lmc::cmd_extract(config, dir.path() / "chain.json",
                           dir.path() / "empty_note.txt",
                           out) == lmc::kExitUnresolved);
    CHECK(out.str().find("NOT_FOUND") != std::string::npos);
  }

  SUBCASE("exhaustion with wrong answers means unresolved") {
    dir.write("hard.txt", "dob 14/03/1962\n");
    dir.write("h.tsv",
              "fast\thard\t0.5\t09/09/2088\n"
              "slow\thard\t2.0\tI do not know\n");
    RunConfig config = mock_config(dir, "x3");
    config.mock_script = dir.path() / "h.tsv";
    std::ostringstream out;
    CHECK(lmc::cmd_extract(config, dir.path() / "chain.json",
                           dir.path() / "hard.txt",
                           out) == lmc::kExitUnresolved);
    // Full chain latency is still reported.
    CHECK(out.str().find("seconds=2.500") != std::string::npos);
  }
}

TEST_CASE("cmd_report re-derives tables from stored records") {
  TempDir dir;
  write_corpus(dir);
  write_script(dir);
  dir.write("chain.json", R"({"id": "duo", "models": ["fast", "slow"]})");
  std::ostringstream out;

  RunConfig chain_config = mock_config(dir, "chain_out");
  REQUIRE(lmc::cmd_chain(chain_config, dir.path() / "chain.json", out) ==
          lmc::kExitOk);

  RunConfig report_config = mock_config(dir, "report_out");
  std::ostringstream report_out;
  CHECK(lmc::cmd_report(report_config,
                        chain_config.output_dir / "records.jsonl", "duo",
                        report_out) == lmc::kExitOk);

  // The combined rows match what the chain run reported.
  const std::string chain_table = slurp(chain_config.output_dir / "report.csv");
  const std::string derived = slurp(report_config.output_dir / "report.csv");
  std::istringstream chain_lines(chain_table);
  std::string line;
  std::vector<std::string> combined_rows;
  while (std::getline(chain_lines, line))
    if (line.starts_with("duo,")) combined_rows.push_back(line);
  for (const std::string& row : combined_rows)
    CHECK(derived.find(row) != std::string::npos);
}
