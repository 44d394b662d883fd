#include "lmc/dates.hpp"

#include <array>
#include <cctype>
#include <cstdio>
#include <stdexcept>
#include <unordered_map>

namespace lmc {

namespace {

bool ascii_digit(char c) { return c >= '0' && c <= '9'; }
bool ascii_alpha(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}
char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}
bool is_separator(char c) { return c == '/' || c == '.' || c == '-'; }
bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

// Maximal run of ASCII digits starting at pos.
std::size_t digit_run(std::string_view text, std::size_t pos) {
  std::size_t end = pos;
  while (end < text.size() && ascii_digit(text[end])) ++end;
  return end - pos;
}

int to_int(std::string_view digits) {
  int v = 0;
  for (char c : digits) v = v * 10 + (c - '0');
  return v;
}

int month_from_name(std::string_view word) {
  static const std::unordered_map<std::string, int> table = {
      {"jan", 1},  {"january", 1},   {"feb", 2},  {"february", 2},
      {"mar", 3},  {"march", 3},     {"apr", 4},  {"april", 4},
      {"may", 5},  {"jun", 6},       {"june", 6}, {"jul", 7},
      {"july", 7}, {"aug", 8},       {"august", 8},
      {"sep", 9},  {"september", 9}, {"oct", 10}, {"october", 10},
      {"nov", 11}, {"november", 11}, {"dec", 12}, {"december", 12},
  };
  std::string lower;
  lower.reserve(word.size());
  for (char c : word) lower.push_back(ascii_lower(c));
  auto it = table.find(lower);
  return it == table.end() ? 0 : it->second;
}

struct ShapeMatch {
  int day = 0;
  int month = 0;
  int year = 0;  // already pivoted / validated for digit count, not calendar
  std::size_t length = 0;
};

// Numeric form at pos: <day><sep><month><sep><year>. Token lengths are the
// full digit runs, so "123/4/56" has no day token and "1/1/111" no year.
// The caller has already checked that pos is not preceded by a digit.
std::optional<ShapeMatch> match_numeric(std::string_view text,
                                        std::size_t pos) {
  std::size_t p = pos;
  std::size_t day_len = digit_run(text, p);
  if (day_len < 1 || day_len > 2) return std::nullopt;
  int day = to_int(text.substr(p, day_len));
  if (day < 1 || day > 31) return std::nullopt;
  p += day_len;

  if (p >= text.size() || !is_separator(text[p])) return std::nullopt;
  char sep = text[p];
  ++p;

  std::size_t month_len = digit_run(text, p);
  if (month_len < 1 || month_len > 2) return std::nullopt;
  int month = to_int(text.substr(p, month_len));
  if (month < 1 || month > 12) return std::nullopt;
  p += month_len;

  if (p >= text.size() || text[p] != sep) return std::nullopt;
  ++p;

  std::size_t year_len = digit_run(text, p);
  if (year_len != 2 && year_len != 4) return std::nullopt;
  int year = to_int(text.substr(p, year_len));
  if (year_len == 2) year = resolve_two_digit_year(year);
  p += year_len;

  return ShapeMatch{day, month, year, p - pos};
}

// Textual form at pos: [the] <day>[suffix] of <month-name>[,] <year>.
// digit_before tells whether pos is immediately preceded by a digit.
std::optional<ShapeMatch> match_textual(std::string_view text, std::size_t pos,
                                        bool digit_before) {
  std::size_t p = pos;

  auto skip_spaces = [&](std::size_t at) {
    while (at < text.size() && is_space(text[at])) ++at;
    return at;
  };
  auto word_is = [&](std::size_t at, std::string_view w) {
    if (at + w.size() > text.size()) return false;
    for (std::size_t i = 0; i < w.size(); ++i)
      if (ascii_lower(text[at + i]) != w[i]) return false;
    std::size_t after = at + w.size();
    return after >= text.size() || !ascii_alpha(text[after]);
  };

  if (word_is(p, "the")) {
    // "the" must start on a word boundary.
    if (pos > 0 && (ascii_alpha(text[pos - 1]) || ascii_digit(text[pos - 1])))
      return std::nullopt;
    std::size_t after = skip_spaces(p + 3);
    if (after == p + 3) return std::nullopt;
    p = after;
  } else if (digit_before) {
    return std::nullopt;
  }

  std::size_t day_len = digit_run(text, p);
  if (day_len < 1 || day_len > 2) return std::nullopt;
  int day = to_int(text.substr(p, day_len));
  if (day < 1 || day > 31) return std::nullopt;
  p += day_len;

  // Optional ordinal suffix, glued to the digits.
  static constexpr std::array<std::string_view, 4> suffixes = {"st", "nd",
                                                               "rd", "th"};
  for (auto sfx : suffixes) {
    if (word_is(p, sfx)) {
      p += sfx.size();
      break;
    }
  }

  std::size_t q = skip_spaces(p);
  if (q == p || !word_is(q, "of")) return std::nullopt;
  p = skip_spaces(q + 2);
  if (p == q + 2) return std::nullopt;

  std::size_t name_start = p;
  while (p < text.size() && ascii_alpha(text[p])) ++p;
  int month = month_from_name(text.substr(name_start, p - name_start));
  if (month == 0) return std::nullopt;

  // At least one of comma / whitespace must separate month name and year.
  std::size_t year_at = p;
  if (year_at < text.size() && text[year_at] == ',') ++year_at;
  year_at = skip_spaces(year_at);
  if (year_at == p) return std::nullopt;

  std::size_t year_len = digit_run(text, year_at);
  if (year_len != 2 && year_len != 4) return std::nullopt;
  int year = to_int(text.substr(year_at, year_len));
  if (year_len == 2) year = resolve_two_digit_year(year);

  return ShapeMatch{day, month, year, year_at + year_len - pos};
}

}  // namespace

bool is_leap_year(int year) {
  return year % 4 == 0 && (year % 100 != 0 || year % 400 == 0);
}

int days_in_month(int month, int year) {
  static constexpr std::array<int, 12> lengths = {31, 28, 31, 30, 31, 30,
                                                  31, 31, 30, 31, 30, 31};
  if (month < 1 || month > 12) return 0;
  if (month == 2 && is_leap_year(year)) return 29;
  return lengths[static_cast<std::size_t>(month - 1)];
}

std::optional<CanonicalDate> CanonicalDate::create(int day, int month,
                                                   int year) {
  if (year < 1000 || year > 2999) return std::nullopt;
  if (month < 1 || month > 12) return std::nullopt;
  if (day < 1 || day > days_in_month(month, year)) return std::nullopt;
  return CanonicalDate(day, month, year);
}

std::string CanonicalDate::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%02d/%02d/%04d", day_, month_, year_);
  return buf;
}

int resolve_two_digit_year(int yy) {
  if (yy < 0 || yy > 99)
    throw std::invalid_argument("two-digit year out of range: " +
                                std::to_string(yy));
  return yy > 25 ? 1900 + yy : 2000 + yy;
}

CandidateSet extract_candidates(std::string_view text) {
  CandidateSet out;
  std::size_t p = 0;
  while (p < text.size()) {
    bool digit_before = p > 0 && ascii_digit(text[p - 1]);

    std::optional<ShapeMatch> m;
    if (!digit_before) m = match_numeric(text, p);
    if (!m) m = match_textual(text, p, digit_before);

    if (!m) {
      ++p;
      continue;
    }
    // Consume the shape whether or not it survives calendar validation.
    if (auto date = CanonicalDate::create(m->day, m->month, m->year)) {
      out.matches.push_back(DateMatch{*date, p, p + m->length,
                                      std::string(text.substr(p, m->length))});
      out.distinct_dates.insert(*date);
    }
    p += m->length;
  }
  return out;
}

std::optional<CanonicalDate> normalize_textual_date(std::string_view surface) {
  std::size_t begin = 0, end = surface.size();
  while (begin < end && is_space(surface[begin])) ++begin;
  while (end > begin && is_space(surface[end - 1])) --end;
  std::string_view trimmed = surface.substr(begin, end - begin);

  auto m = match_textual(trimmed, 0, /*digit_before=*/false);
  if (!m || m->length != trimmed.size()) return std::nullopt;
  return CanonicalDate::create(m->day, m->month, m->year);
}

std::optional<CanonicalDate> parse_strict_ddmmyyyy(std::string_view s) {
  std::size_t day_len = digit_run(s, 0);
  if (day_len < 1 || day_len > 2) return std::nullopt;
  std::size_t p = day_len;
  if (p >= s.size() || s[p] != '/') return std::nullopt;
  ++p;

  std::size_t month_len = digit_run(s, p);
  if (month_len < 1 || month_len > 2) return std::nullopt;
  int month = to_int(s.substr(p, month_len));
  p += month_len;
  if (p >= s.size() || s[p] != '/') return std::nullopt;
  ++p;

  std::size_t year_len = digit_run(s, p);
  if (year_len != 2 && year_len != 4) return std::nullopt;
  int year = to_int(s.substr(p, year_len));
  if (year_len == 2) year = resolve_two_digit_year(year);
  if (p + year_len != s.size()) return std::nullopt;

  return CanonicalDate::create(to_int(s.substr(0, day_len)), month, year);
}

}  // namespace lmc
