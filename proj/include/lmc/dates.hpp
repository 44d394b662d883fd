#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace lmc {

// A validated Gregorian calendar day. This is the single answer currency:
// document targets, extracted candidates and model answers all canonicalize
// to it. Years outside 1000-2999 are treated as date-shaped noise and never
// produce a CanonicalDate.
class CanonicalDate {
 public:
  // Returns nullopt unless (day, month, year) names a real calendar day,
  // e.g. rejects 31/02/any and 29/02 on non-leap years.
  static std::optional<CanonicalDate> create(int day, int month, int year);

  int day() const { return day_; }
  int month() const { return month_; }
  int year() const { return year_; }

  // Zero-padded DD/MM/YYYY.
  std::string to_string() const;

  auto operator<=>(const CanonicalDate&) const = default;

 private:
  CanonicalDate(int day, int month, int year)
      : day_(day), month_(month), year_(year) {}

  int day_;
  int month_;
  int year_;
};

bool is_leap_year(int year);
int days_in_month(int month, int year);

// One recognized occurrence of a date in a piece of text. Spans are byte
// offsets into the UTF-8 source; recognized surfaces are pure ASCII, so
// surface == text.substr(span_start, span_end - span_start) always holds.
struct DateMatch {
  CanonicalDate date;
  std::size_t span_start = 0;
  std::size_t span_end = 0;
  std::string surface;

  bool operator==(const DateMatch&) const = default;
};

// Every date occurrence found in a document, plus the deduplicated value
// set that model responses are validated against.
struct CandidateSet {
  std::vector<DateMatch> matches;  // in text order, non-overlapping
  std::set<CanonicalDate> distinct_dates;

  bool contains(const CanonicalDate& d) const {
    return distinct_dates.find(d) != distinct_dates.end();
  }
  bool empty() const { return matches.empty(); }

  bool operator==(const CandidateSet&) const = default;
};

// Scans text for every non-overlapping date occurrence, left to right.
//
// Two forms are recognized:
//   numeric:  day 1-31, separator, month 1-12, same separator, 2- or
//             4-digit year, separators drawn from {/ . -}. Digit runs
//             longer than the token (e.g. "123/4/56") never match.
//   textual:  [the] <day>[st|nd|rd|th] of <month-name>[,] <year>, month
//             names being the full English names or their 3-letter
//             abbreviations, case-insensitive.
//
// Two-digit years go through resolve_two_digit_year. Shapes that fail
// calendar validation are consumed but produce no match.
CandidateSet extract_candidates(std::string_view text);

// yy > 25 lands in the 20th century, yy <= 25 in the 21st:
// 62 -> 1962, 26 -> 1926, 25 -> 2025, 0 -> 2000.
// Throws std::invalid_argument outside [0, 99].
int resolve_two_digit_year(int yy);

// Canonicalizes one textual-form surface ("11th of Jun 62" -> 11/06/1962).
// Surrounding whitespace is ignored; anything else returns nullopt.
std::optional<CanonicalDate> normalize_textual_date(std::string_view surface);

// Strict parser for targets and stored answers: D/M/Y with '/' separators
// only, day and month 1 or 2 digits, year 2 or 4 digits, nothing else.
std::optional<CanonicalDate> parse_strict_ddmmyyyy(std::string_view s);

}  // namespace lmc
