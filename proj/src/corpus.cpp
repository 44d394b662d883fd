#include "lmc/corpus.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "lmc/errors.hpp"

namespace lmc {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v';
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (is_space(s[b]) || s[b] == '\n')) ++b;
  while (e > b && (is_space(s[e - 1]) || s[e - 1] == '\n')) --e;
  return s.substr(b, e - b);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

}  // namespace

const Document* Corpus::find(std::string_view id) const {
  for (const auto& doc : documents)
    if (doc.id == id) return &doc;
  return nullptr;
}

std::string normalize_text(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  std::size_t pos = 0;
  while (pos <= raw.size()) {
    std::size_t eol = raw.find('\n', pos);
    std::string_view line =
        raw.substr(pos, (eol == std::string_view::npos ? raw.size() : eol) - pos);
    std::size_t b = 0, e = line.size();
    while (b < e && is_space(line[b])) ++b;
    while (e > b && is_space(line[e - 1])) --e;
    if (e > b) {
      if (!out.empty()) out.push_back('\n');
      out.append(line.substr(b, e - b));
    }
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return out;
}

std::size_t count_scalar_values(std::string_view utf8) {
  std::size_t n = 0;
  for (unsigned char c : utf8)
    if ((c & 0xC0) != 0x80) ++n;
  return n;
}

bool is_valid_utf8(std::string_view bytes) {
  std::size_t i = 0;
  while (i < bytes.size()) {
    unsigned char c = static_cast<unsigned char>(bytes[i]);
    std::size_t len;
    unsigned cp;
    if (c < 0x80) {
      len = 1;
      cp = c;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1Fu;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0Fu;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07u;
    } else {
      return false;
    }
    if (i + len > bytes.size()) return false;
    for (std::size_t k = 1; k < len; ++k) {
      unsigned char cc = static_cast<unsigned char>(bytes[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3Fu);
    }
    // Overlong encodings, surrogates and out-of-range values are invalid.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
        (len == 4 && cp < 0x10000))
      return false;
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
    i += len;
  }
  return true;
}

Corpus load_corpus(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in)
    throw LoadError("cannot open manifest: " + manifest_path.string());

  const std::filesystem::path base = manifest_path.parent_path();
  Corpus corpus;
  corpus.source_path = manifest_path.string();
  std::unordered_set<std::string> seen_ids;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view record = trim(line);
    if (record.empty() || record.front() == '#') continue;

    auto where = [&] {
      return manifest_path.string() + ":" + std::to_string(line_no);
    };

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = record.find(',', start);
      if (comma == std::string_view::npos) {
        fields.push_back(trim(record.substr(start)));
        break;
      }
      fields.push_back(trim(record.substr(start, comma - start)));
      start = comma + 1;
    }
    if (fields.size() < 2 || fields.size() > 3 || fields[0].empty() ||
        fields[1].empty())
      throw LoadError("malformed manifest record at " + where() +
                      " (expected id,path[,target])");

    Document doc;
    doc.id = std::string(fields[0]);
    if (!seen_ids.insert(doc.id).second)
      throw LoadError("duplicate document id '" + doc.id + "' at " + where());

    const std::filesystem::path text_path = base / std::string(fields[1]);
    std::string raw;
    try {
      raw = read_file(text_path);
    } catch (const LoadError& e) {
      throw LoadError("record '" + doc.id + "' at " + where() + ": " +
                      e.what());
    }
    if (!is_valid_utf8(raw))
      throw LoadError("record '" + doc.id + "' at " + where() + ": file " +
                      text_path.string() + " is not valid UTF-8");

    doc.text = normalize_text(raw);
    doc.char_count = count_scalar_values(doc.text);

    if (fields.size() == 3 && !fields[2].empty()) {
      auto target = parse_strict_ddmmyyyy(fields[2]);
      if (!target)
        throw LoadError("record '" + doc.id + "' at " + where() +
                        ": invalid target date '" + std::string(fields[2]) +
                        "'");
      doc.target = *target;
    }
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

}  // namespace lmc
