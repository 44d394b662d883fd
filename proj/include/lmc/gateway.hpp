#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>

#include "lmc/corpus.hpp"
#include "lmc/dates.hpp"

namespace lmc {

// Decoding options sent with every generation call. All zero by default,
// which makes responses deterministic for a fixed model and prompt.
struct GenerationOptions {
  double temperature = 0.0;
  int random_seed = 0;
  int repeat_last_n = 0;

  bool operator==(const GenerationOptions&) const = default;
};

struct ModelSpec {
  std::string name;  // backend identifier, e.g. "qwen3:0.6b"
  GenerationOptions options;
};

struct GenerationResult {
  std::string raw_text;
  double elapsed_seconds = 0.0;  // always > 0
  std::string backend;
};

// A prompt with exactly one '_' placeholder for the document text.
struct PromptTemplate {
  std::string text;
};

// The stock extraction prompt used when a run does not override it.
PromptTemplate default_prompt_template();

// Substitutes the document text for the placeholder. Throws ConfigError
// when the template has zero or multiple '_' markers.
std::string render_prompt(const PromptTemplate& tmpl, const Document& doc);

// Delimiters of chain-of-thought blocks that reasoning models emit and
// that answer extraction must ignore.
struct ThinkingMarkers {
  std::string open = "<think>";
  std::string close = "</think>";
};

// Removes every open..close block (an unclosed opener removes through the
// end), then returns the first date the candidate grammar finds in what is
// left. Absent when no date remains, e.g. for "I do not know".
std::optional<CanonicalDate> extract_answer(
    std::string_view raw_text, const ThinkingMarkers& markers = {});

// The remainder of raw_text after thinking-block removal.
std::string strip_thinking(std::string_view raw_text,
                           const ThinkingMarkers& markers = {});

struct GenerationRequest {
  ModelSpec model;
  std::string prompt;
  std::string document_id;  // replay key for the mock backend; ignored on the wire
};

// Uniform access to a generation backend. generate() is safe to call from
// multiple threads; a counting gate caps in-flight requests (default 1,
// matching a single locally served model).
class Backend {
 public:
  explicit Backend(int max_in_flight = 1);
  virtual ~Backend() = default;

  Backend(const Backend&) = delete;
  Backend& operator=(const Backend&) = delete;

  GenerationResult generate(const GenerationRequest& request);

  virtual std::string describe() const = 0;

 protected:
  virtual GenerationResult do_generate(const GenerationRequest& request) = 0;

 private:
  std::counting_semaphore<> gate_;
};

struct HttpBackendConfig {
  std::string base_url = "http://127.0.0.1:11434";
  std::string endpoint_path = "/api/generate";
  double timeout_seconds = 600.0;
  int max_in_flight = 1;
};

// Talks to a real generate endpoint: POST {model, prompt, stream:false,
// options:{temperature, seed, repeat_last_n}}, answer text under the
// "response" key. Elapsed seconds cover the whole request. No retries.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(HttpBackendConfig config);

  std::string describe() const override;
  const HttpBackendConfig& config() const { return config_; }

 protected:
  GenerationResult do_generate(const GenerationRequest& request) override;

 private:
  HttpBackendConfig config_;
};

// Script-driven stand-in keyed by (model name, document id). Elapsed
// seconds come from the script, not the wall clock, so runs replay exactly.
class MockBackend : public Backend {
 public:
  struct Scripted {
    double latency_seconds = 0.0;
    std::string response;
  };
  using ScriptTable = std::map<std::pair<std::string, std::string>, Scripted>;

  explicit MockBackend(int max_in_flight = 1);
  explicit MockBackend(ScriptTable table, int max_in_flight = 1);

  // Script file: one record per line,
  //   model<TAB>document_id<TAB>latency_seconds<TAB>response text
  // where the response runs to the end of the line. Blank lines and lines
  // starting with '#' are skipped.
  static ScriptTable parse_script(const std::filesystem::path& path);

  void script(const std::string& model, const std::string& document_id,
              double latency_seconds, std::string response);

  std::string describe() const override;

 protected:
  GenerationResult do_generate(const GenerationRequest& request) override;

 private:
  ScriptTable table_;
};

}  // namespace lmc
