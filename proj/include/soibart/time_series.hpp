#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "soibart/errors.hpp"
#include "soibart/month.hpp"

namespace soibart {

// Gap-free run of consecutive monthly values anchored at a calendar month.
class TimeSeries {
 public:
  TimeSeries(MonthStamp start, std::vector<double> values)
      : start_(start), values_(std::move(values)) {
    if (values_.empty()) fail(ErrorCode::Empty, "time series must hold at least one value");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i]))
        fail(ErrorCode::InteriorGap,
             "non-finite value at " + stamp_at(i).str());
    }
  }

  std::size_t size() const { return values_.size(); }
  MonthStamp start() const { return start_; }
  MonthStamp end() const { return start_.plus_months(static_cast<long>(values_.size()) - 1); }
  MonthStamp stamp_at(std::size_t i) const { return start_.plus_months(static_cast<long>(i)); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }

  // Index of a stamp within the series, if covered.
  std::optional<std::size_t> index_of(MonthStamp stamp) const {
    const long offset = months_between(start_, stamp);
    if (offset < 0 || offset >= static_cast<long>(values_.size())) return std::nullopt;
    return static_cast<std::size_t>(offset);
  }

  TimeSeries slice(MonthStamp from, MonthStamp to) const {
    if (from > to) fail(ErrorCode::OutOfRange, "slice start after end");
    const auto lo = index_of(from);
    const auto hi = index_of(to);
    if (!lo || !hi)
      fail(ErrorCode::OutOfRange,
           "slice " + from.str() + ".." + to.str() + " outside " + start_.str() + ".." + end().str());
    return TimeSeries(from, std::vector<double>(values_.begin() + *lo, values_.begin() + *hi + 1));
  }

  bool operator==(const TimeSeries& other) const {
    return start_ == other.start_ && values_ == other.values_;
  }

 private:
  MonthStamp start_;
  std::vector<double> values_;
};

// Tokens treated as "month not observed" while parsing raw source files.
struct SentinelPolicy {
  std::vector<double> values{-999.9};
  double abs_threshold = 90.0;  // anything beyond plausible index range
  bool star_is_missing = true;

  bool is_missing(double v) const {
    if (std::abs(v) > abs_threshold) return true;
    for (double s : values)
      if (v == s) return true;
    return false;
  }
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline bool parse_double(std::string_view tok, double& out) {
  char buf[64];
  if (tok.size() >= sizeof(buf)) return false;
  std::memcpy(buf, tok.data(), tok.size());
  buf[tok.size()] = '\0';
  char* end = nullptr;
  out = std::strtod(buf, &end);
  return end == buf + tok.size();
}

inline bool is_year_token(std::string_view tok, int& year) {
  if (tok.size() != 4) return false;
  for (char c : tok)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  year = (tok[0] - '0') * 1000 + (tok[1] - '0') * 100 + (tok[2] - '0') * 10 + (tok[3] - '0');
  return year >= 1800 && year <= 2200;
}

// Shared tail of both parsers: trim missing months at the edges, reject
// missing months inside the run.
inline TimeSeries assemble(MonthStamp first, const std::vector<std::optional<double>>& months) {
  std::size_t lo = 0;
  std::size_t hi = months.size();
  while (lo < hi && !months[lo].has_value()) ++lo;
  while (hi > lo && !months[hi - 1].has_value()) --hi;
  if (lo == hi) fail(ErrorCode::Empty, "no observed months");
  std::vector<double> values;
  values.reserve(hi - lo);
  for (std::size_t i = lo; i < hi; ++i) {
    if (!months[i].has_value())
      fail(ErrorCode::InteriorGap,
           "missing value at " + first.plus_months(static_cast<long>(i)).str());
    values.push_back(*months[i]);
  }
  return TimeSeries(first.plus_months(static_cast<long>(lo)), std::move(values));
}

}  // namespace detail

// Bureau of Meteorology plain-text layout: one row per year, a 4-digit year
// followed by up to 12 monthly values. Header/prose lines are skipped. A short
// final row is an incomplete year still being recorded.
inline TimeSeries parse_bom_plaintext(std::string_view text,
                                      const SentinelPolicy& sentinels = {}) {
  std::vector<std::optional<double>> months;
  int first_year = 0;
  int prev_year = 0;
  bool seen_data = false;
  std::size_t line_no = 0;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
    ++line_no;

    const auto toks = detail::split_ws(line);
    if (toks.empty()) continue;
    int year = 0;
    if (!detail::is_year_token(toks[0], year)) continue;  // header or prose

    if (seen_data && year != prev_year + 1)
      fail(ErrorCode::NonConsecutiveYears,
           "line " + std::to_string(line_no) + ": year " + std::to_string(year) +
               " follows " + std::to_string(prev_year));
    if (toks.size() > 13)
      fail(ErrorCode::MalformedLine,
           "line " + std::to_string(line_no) + ": more than 12 monthly values");

    if (!seen_data) first_year = year;
    seen_data = true;
    prev_year = year;

    for (std::size_t m = 0; m < 12; ++m) {
      if (m + 1 >= toks.size()) {
        months.push_back(std::nullopt);  // short row: remaining months unobserved
        continue;
      }
      const auto tok = toks[m + 1];
      if (sentinels.star_is_missing && tok == "*") {
        months.push_back(std::nullopt);
        continue;
      }
      double v = 0.0;
      if (!detail::parse_double(tok, v))
        fail(ErrorCode::MalformedLine,
             "line " + std::to_string(line_no) + ": bad token '" + std::string(tok) + "'");
      months.push_back(sentinels.is_missing(v) ? std::optional<double>{} : std::optional<double>{v});
    }
  }

  if (!seen_data) fail(ErrorCode::Empty, "no data lines found");
  return detail::assemble(MonthStamp::checked(first_year, 1), months);
}

// Canonical CSV: header `year,month,value`, rows in calendar order.
inline TimeSeries parse_csv(std::string_view text) {
  std::vector<std::optional<double>> months;
  std::optional<MonthStamp> first;
  std::optional<MonthStamp> prev;
  bool header_seen = false;
  std::size_t line_no = 0;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    if (line.empty()) continue;

    if (!header_seen) {
      if (line != "year,month,value")
        fail(ErrorCode::MissingHeader, "expected 'year,month,value', got '" + std::string(line) + "'");
      header_seen = true;
      continue;
    }

    const std::size_t c1 = line.find(',');
    const std::size_t c2 = (c1 == std::string_view::npos) ? std::string_view::npos : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos)
      fail(ErrorCode::MalformedLine, "line " + std::to_string(line_no) + ": expected 3 fields");
    double fy = 0, fm = 0, fv = 0;
    if (!detail::parse_double(line.substr(0, c1), fy) ||
        !detail::parse_double(line.substr(c1 + 1, c2 - c1 - 1), fm) ||
        !detail::parse_double(line.substr(c2 + 1), fv))
      fail(ErrorCode::MalformedLine, "line " + std::to_string(line_no) + ": non-numeric field");

    const MonthStamp stamp = MonthStamp::checked(static_cast<int>(fy), static_cast<int>(fm));
    if (!first) {
      first = stamp;
    } else {
      const long step = months_between(*prev, stamp);
      if (step <= 0)
        fail(ErrorCode::UnsortedRows,
             "line " + std::to_string(line_no) + ": " + stamp.str() + " not after " + prev->str());
      for (long g = 1; g < step; ++g) months.push_back(std::nullopt);
    }
    prev = stamp;
    if (!std::isfinite(fv))
      fail(ErrorCode::MalformedLine, "line " + std::to_string(line_no) + ": non-finite value");
    months.push_back(fv);
  }

  if (!header_seen) fail(ErrorCode::MissingHeader, "empty input");
  if (!first) fail(ErrorCode::Empty, "no data rows");
  // Gaps were recorded as missing months; assemble() turns any of them into
  // an InteriorGap error since they are never at the edges here.
  return detail::assemble(*first, months);
}

// Full-precision so that parse_csv(emit_csv(ts)) == ts exactly.
inline std::string emit_csv(const TimeSeries& ts) {
  std::string out = "year,month,value\n";
  char buf[64];
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const MonthStamp s = ts.stamp_at(i);
    std::snprintf(buf, sizeof(buf), "%d,%d,%.17g\n", s.year, s.month, ts[i]);
    out += buf;
  }
  return out;
}

}  // namespace soibart
