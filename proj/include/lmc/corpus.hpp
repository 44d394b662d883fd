#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lmc/dates.hpp"

namespace lmc {

// One input text plus its optional expert-assigned target date of birth.
// char_count is the number of unicode scalar values in the normalized text,
// which is what the throughput metric divides by.
struct Document {
  std::string id;
  std::string text;
  std::size_t char_count = 0;
  std::optional<CanonicalDate> target;
};

struct Corpus {
  std::vector<Document> documents;  // manifest record order
  std::string source_path;

  const Document* find(std::string_view id) const;
};

// Strips leading and trailing whitespace from every line, drops lines that
// become empty, and joins the survivors with single newlines. Idempotent.
std::string normalize_text(std::string_view raw);

// Counts unicode scalar values in valid UTF-8 (encoding-independent, unlike
// a byte count).
std::size_t count_scalar_values(std::string_view utf8);

bool is_valid_utf8(std::string_view bytes);

// Loads a corpus from a manifest: one record per line in the form
//   id,relative/path.txt[,DD/MM/YYYY]
// with `#` comment lines and blank lines ignored, paths resolved against
// the manifest's directory, and fields trimmed. Document text is normalized
// on load. Throws LoadError naming the offending record on a missing or
// non-UTF-8 file, a malformed target date, or a duplicate id.
Corpus load_corpus(const std::filesystem::path& manifest_path);

}  // namespace lmc
