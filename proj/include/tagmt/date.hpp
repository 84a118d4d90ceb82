#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace tagmt {

// Plain calendar date. Comparison is lexicographic on (year, month, day).
struct Date {
  int year = 0;
  int month = 0;
  int day = 0;

  auto operator<=>(const Date&) const = default;

  bool valid() const;
  std::string to_string() const;  // ISO-8601, YYYY-MM-DD

  // Parses "YYYY-MM-DD". Returns nullopt on malformed or non-calendar dates.
  static std::optional<Date> parse_iso(std::string_view s);
};

// Whole completed years from `from` to `to`. Requires from < to.
int years_between(const Date& from, const Date& to);

}  // namespace tagmt
