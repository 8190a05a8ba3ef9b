#pragma once

#include <compare>
#include <cstdio>
#include <string>

#include "soibart/errors.hpp"

namespace soibart {

// Calendar anchor for one monthly observation. month is 1..12.
struct MonthStamp {
  int year = 1876;
  int month = 1;

  auto operator<=>(const MonthStamp&) const = default;

  static MonthStamp checked(int year, int month) {
    if (year < 1800) fail(ErrorCode::OutOfRange, "year before 1800: " + std::to_string(year));
    if (month < 1 || month > 12)
      fail(ErrorCode::OutOfRange, "month outside 1..12: " + std::to_string(month));
    return MonthStamp{year, month};
  }

  MonthStamp plus_months(long n) const {
    long total = static_cast<long>(year) * 12 + (month - 1) + n;
    MonthStamp out;
    out.year = static_cast<int>(total / 12);
    out.month = static_cast<int>(total % 12) + 1;
    if (out.month < 1) {  // total < 0 rounds toward zero
      out.month += 12;
      out.year -= 1;
    }
    return out;
  }

  std::string str() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
    return buf;
  }
};

// Signed month count from a to b; 0 when equal, 1 for the next month.
inline long months_between(MonthStamp a, MonthStamp b) {
  return (static_cast<long>(b.year) - a.year) * 12 + (b.month - a.month);
}

inline const char* month_abbrev(int month) {
  static const char* names[12] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                  "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  return (month >= 1 && month <= 12) ? names[month - 1] : "???";
}

}  // namespace soibart
