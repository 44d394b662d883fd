#pragma once

#include <stdexcept>
#include <string>

namespace lmc {

// Base for all recoverable errors raised by this library. Precondition
// breaches of pure operations throw std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Corpus manifests, mock scripts, stored records: anything file-shaped.
class LoadError : public Error {
 public:
  using Error::Error;
};

// Bad prompt templates, malformed chain configurations, invalid run options.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A generation backend failed to produce a response.
class BackendError : public Error {
 public:
  BackendError(const std::string& model, const std::string& cause)
      : Error("backend error [model=" + model + "]: " + cause), model_(model) {}

  const std::string& model() const { return model_; }

 private:
  std::string model_;
};

class TimeoutError : public BackendError {
 public:
  using BackendError::BackendError;
};

}  // namespace lmc
