#include "lmc/gateway.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include "httplib.h"
#include "json.hpp"
#include "lmc/errors.hpp"

namespace lmc {

namespace {

constexpr std::string_view kDefaultPrompt =
    "TEXT: _. QUESTION: What is the patient's date of birth? The date must "
    "be in DD/MM/YYYY format. Return 'I do not know' if the date of birth "
    "is not written in the TEXT.";

class GateGuard {
 public:
  explicit GateGuard(std::counting_semaphore<>& gate) : gate_(gate) {
    gate_.acquire();
  }
  ~GateGuard() { gate_.release(); }
  GateGuard(const GateGuard&) = delete;
  GateGuard& operator=(const GateGuard&) = delete;

 private:
  std::counting_semaphore<>& gate_;
};

}  // namespace

PromptTemplate default_prompt_template() {
  return PromptTemplate{std::string(kDefaultPrompt)};
}

std::string render_prompt(const PromptTemplate& tmpl, const Document& doc) {
  std::size_t first = tmpl.text.find('_');
  if (first == std::string::npos)
    throw ConfigError("prompt template has no '_' placeholder");
  if (tmpl.text.find('_', first + 1) != std::string::npos)
    throw ConfigError("prompt template has more than one '_' placeholder");

  std::string prompt;
  prompt.reserve(tmpl.text.size() + doc.text.size());
  prompt.append(tmpl.text, 0, first);
  prompt.append(doc.text);
  prompt.append(tmpl.text, first + 1, std::string::npos);
  return prompt;
}

std::string strip_thinking(std::string_view raw_text,
                           const ThinkingMarkers& markers) {
  std::string out;
  out.reserve(raw_text.size());
  std::size_t pos = 0;
  while (pos < raw_text.size()) {
    std::size_t open = raw_text.find(markers.open, pos);
    if (open == std::string_view::npos) {
      out.append(raw_text.substr(pos));
      break;
    }
    out.append(raw_text.substr(pos, open - pos));
    std::size_t close = raw_text.find(markers.close, open + markers.open.size());
    if (close == std::string_view::npos) break;  // unclosed: drop the rest
    pos = close + markers.close.size();
  }
  return out;
}

std::optional<CanonicalDate> extract_answer(std::string_view raw_text,
                                            const ThinkingMarkers& markers) {
  const std::string visible = strip_thinking(raw_text, markers);
  CandidateSet found = extract_candidates(visible);
  if (found.matches.empty()) return std::nullopt;
  return found.matches.front().date;
}

Backend::Backend(int max_in_flight)
    : gate_(max_in_flight < 1 ? 1 : max_in_flight) {}

GenerationResult Backend::generate(const GenerationRequest& request) {
  if (request.model.name.empty())
    throw ConfigError("generation request has an empty model name");
  GateGuard guard(gate_);
  GenerationResult result = do_generate(request);
  if (!(result.elapsed_seconds > 0.0))
    result.elapsed_seconds = std::numeric_limits<double>::min();
  return result;
}

HttpBackend::HttpBackend(HttpBackendConfig config)
    : Backend(config.max_in_flight), config_(std::move(config)) {}

std::string HttpBackend::describe() const {
  return config_.base_url + config_.endpoint_path;
}

GenerationResult HttpBackend::do_generate(const GenerationRequest& request) {
  nlohmann::json body = {
      {"model", request.model.name},
      {"prompt", request.prompt},
      {"stream", false},
      {"options",
       {{"temperature", request.model.options.temperature},
        {"seed", request.model.options.random_seed},
        {"repeat_last_n", request.model.options.repeat_last_n}}},
  };

  httplib::Client client(config_.base_url);
  const auto timeout = std::chrono::duration<double>(config_.timeout_seconds);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  const auto started = std::chrono::steady_clock::now();
  httplib::Result res =
      client.Post(config_.endpoint_path, body.dump(), "application/json");
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();

  if (!res) {
    const std::string cause = httplib::to_string(res.error());
    if (res.error() == httplib::Error::ConnectionTimeout ||
        res.error() == httplib::Error::Read)
      throw TimeoutError(request.model.name,
                         cause + " after " +
                             std::to_string(config_.timeout_seconds) + "s");
    throw BackendError(request.model.name, cause);
  }
  if (res->status < 200 || res->status >= 300)
    throw BackendError(request.model.name,
                       "HTTP " + std::to_string(res->status) + ": " +
                           res->body.substr(0, 256));

  nlohmann::json parsed = nlohmann::json::parse(res->body, nullptr, false);
  if (parsed.is_discarded() || !parsed.contains("response") ||
      !parsed["response"].is_string())
    throw BackendError(request.model.name,
                       "malformed response body: " + res->body.substr(0, 256));

  return GenerationResult{parsed["response"].get<std::string>(), elapsed,
                          describe()};
}

MockBackend::MockBackend(int max_in_flight) : Backend(max_in_flight) {}

MockBackend::MockBackend(ScriptTable table, int max_in_flight)
    : Backend(max_in_flight), table_(std::move(table)) {}

MockBackend::ScriptTable MockBackend::parse_script(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open mock script: " + path.string());

  ScriptTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;

    std::size_t t1 = line.find('\t');
    std::size_t t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    std::size_t t3 = t2 == std::string::npos ? t2 : line.find('\t', t2 + 1);
    if (t3 == std::string::npos)
      throw LoadError("malformed mock script record at " + path.string() +
                      ":" + std::to_string(line_no) +
                      " (expected model\\tdoc\\tlatency\\tresponse)");

    const std::string model = line.substr(0, t1);
    const std::string doc = line.substr(t1 + 1, t2 - t1 - 1);
    const std::string latency_text = line.substr(t2 + 1, t3 - t2 - 1);
    double latency = 0.0;
    try {
      latency = std::stod(latency_text);
    } catch (const std::exception&) {
      latency = std::nan("");
    }
    if (!(latency > 0.0))
      throw LoadError("bad latency '" + latency_text + "' at " +
                      path.string() + ":" + std::to_string(line_no));

    table[{model, doc}] = Scripted{latency, line.substr(t3 + 1)};
  }
  return table;
}

void MockBackend::script(const std::string& model,
                         const std::string& document_id,
                         double latency_seconds, std::string response) {
  table_[{model, document_id}] =
      Scripted{latency_seconds, std::move(response)};
}

std::string MockBackend::describe() const { return "mock"; }

GenerationResult MockBackend::do_generate(const GenerationRequest& request) {
  auto it = table_.find({request.model.name, request.document_id});
  if (it == table_.end())
    throw BackendError(request.model.name,
                       "no scripted response for document '" +
                           request.document_id + "'");
  return GenerationResult{it->second.response, it->second.latency_seconds,
                          describe()};
}

}  // namespace lmc
