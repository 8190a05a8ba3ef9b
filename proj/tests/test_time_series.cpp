#include <catch2/catch_amalgamated.hpp>

#include "soibart/rng.hpp"
#include "soibart/time_series.hpp"
#include "test_support.hpp"

using namespace soibart;
using soibart_test::expect_error;

TEST_CASE("plaintext: single full year") {
  const auto ts = parse_bom_plaintext("1876 11.3 11.0 0.2 9.4 6.4 -3.0 -2.1 -0.4 0.2 7.4 4.5 3.1");
  CHECK(ts.start() == MonthStamp{1876, 1});
  CHECK(ts.size() == 12);
  CHECK(ts[0] == 11.3);
  CHECK(ts[11] == 3.1);
}

TEST_CASE("plaintext: header lines are skipped") {
  const auto ts = parse_bom_plaintext(
      "SOI archive\nYear Jan Feb\n1900 1.0 2.0 3.0 4.0 5.0 6.0 7.0 8.0 9.0 10.0 11.0 12.0\n"
      "1901 -1.0\n");
  CHECK(ts.start() == MonthStamp{1900, 1});
  CHECK(ts.size() == 13);  // partial final year
  CHECK(ts[12] == -1.0);
}

TEST_CASE("plaintext: non-consecutive years") {
  expect_error(ErrorCode::NonConsecutiveYears,
               [] { parse_bom_plaintext("1876 1.0 2.0\n1878 3.0"); });
}

TEST_CASE("plaintext: sentinel inside the run") {
  expect_error(ErrorCode::InteriorGap, [] { parse_bom_plaintext("1876 1.0 -999.9 3.0"); });
}

TEST_CASE("plaintext: sentinels trimmed at the edges") {
  const auto ts = parse_bom_plaintext("1876 * -999.9 1.5 2.5 99.9");
  CHECK(ts.start() == MonthStamp{1876, 3});
  CHECK(ts.size() == 2);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    CHECK(std::abs(ts[i]) <= 90.0);
    CHECK(ts[i] != -999.9);
  }
}

TEST_CASE("plaintext: malformed token") {
  expect_error(ErrorCode::MalformedLine, [] { parse_bom_plaintext("1876 1.0 oops 3.0"); });
}

TEST_CASE("plaintext: no data") {
  expect_error(ErrorCode::Empty, [] { parse_bom_plaintext("just a header\n"); });
  expect_error(ErrorCode::Empty, [] { parse_bom_plaintext("1876 * * *\n"); });
}

TEST_CASE("plaintext: configurable sentinel policy") {
  // default policy: 150 exceeds the plausibility threshold and is trimmed
  const auto ts = parse_bom_plaintext("1900 150.0 -77.7 1.0");
  CHECK(ts.start() == MonthStamp{1900, 2});
  CHECK(ts.size() == 2);
  CHECK(ts[0] == -77.7);

  // custom policy: 150 is data, -77.7 is the sentinel and now sits interior
  SentinelPolicy custom;
  custom.values = {-77.7};
  custom.abs_threshold = 1e9;
  expect_error(ErrorCode::InteriorGap,
               [&] { parse_bom_plaintext("1900 150.0 -77.7 1.0", custom); });
}

TEST_CASE("csv: two rows") {
  const auto ts = parse_csv("year,month,value\n2000,1,1.5\n2000,2,-2.0\n");
  CHECK(ts.start() == MonthStamp{2000, 1});
  CHECK(ts.size() == 2);
  CHECK(ts[1] == -2.0);
}

TEST_CASE("csv: gap is an error") {
  expect_error(ErrorCode::InteriorGap,
               [] { parse_csv("year,month,value\n2000,1,1.5\n2000,3,2.0\n"); });
}

TEST_CASE("csv: header only") {
  expect_error(ErrorCode::Empty, [] { parse_csv("year,month,value\n"); });
}

TEST_CASE("csv: missing header") {
  expect_error(ErrorCode::MissingHeader, [] { parse_csv("2000,1,1.5\n"); });
  expect_error(ErrorCode::MissingHeader, [] { parse_csv(""); });
}

TEST_CASE("csv: unsorted rows") {
  expect_error(ErrorCode::UnsortedRows,
               [] { parse_csv("year,month,value\n2000,2,1.0\n2000,1,2.0\n"); });
  expect_error(ErrorCode::UnsortedRows,
               [] { parse_csv("year,month,value\n2000,2,1.0\n2000,2,2.0\n"); });
}

TEST_CASE("csv round trip is exact") {
  Rng rng(12345);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 1 + rng.uniform_index(50);
    std::vector<double> values;
    for (std::size_t i = 0; i < n; ++i) values.push_back(rng.normal(0.0, 13.7));
    const TimeSeries ts(MonthStamp{1950 + static_cast<int>(rng.uniform_index(50)),
                                   1 + static_cast<int>(rng.uniform_index(12))},
                        values);
    CHECK(parse_csv(emit_csv(ts)) == ts);
  }
}

TEST_CASE("slice") {
  std::vector<double> values(1604);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = static_cast<double>(i);
  const TimeSeries ts(MonthStamp{1876, 1}, values);

  CHECK(ts.end() == MonthStamp{2009, 8});
  // month-count oracle: inclusive span = months_between + 1
  CHECK(months_between(MonthStamp{1876, 1}, MonthStamp{2009, 8}) + 1 == 1604);

  CHECK(ts.slice(ts.start(), ts.end()) == ts);
  const auto year2000 = ts.slice(MonthStamp{2000, 1}, MonthStamp{2000, 12});
  CHECK(year2000.size() == 12);
  CHECK(year2000[0] == ts[static_cast<std::size_t>(months_between(ts.start(), MonthStamp{2000, 1}))]);

  expect_error(ErrorCode::OutOfRange, [&] { ts.slice(MonthStamp{1875, 12}, MonthStamp{1876, 5}); });
  expect_error(ErrorCode::OutOfRange, [&] { ts.slice(MonthStamp{2009, 1}, MonthStamp{2009, 9}); });
  expect_error(ErrorCode::OutOfRange, [&] { ts.slice(MonthStamp{2000, 5}, MonthStamp{2000, 4}); });
}

TEST_CASE("month arithmetic") {
  CHECK(MonthStamp{1999, 12}.plus_months(1) == MonthStamp{2000, 1});
  CHECK(MonthStamp{2000, 1}.plus_months(-1) == MonthStamp{1999, 12});
  CHECK(MonthStamp{2000, 6}.plus_months(41) == MonthStamp{2003, 11});
  CHECK(months_between(MonthStamp{2000, 6}, MonthStamp{2003, 11}) == 41);
  Rng rng(7);
  for (int rep = 0; rep < 200; ++rep) {
    const MonthStamp a{1900 + static_cast<int>(rng.uniform_index(150)),
                       1 + static_cast<int>(rng.uniform_index(12))};
    const long delta = static_cast<long>(rng.uniform_index(500)) - 250;
    CHECK(months_between(a, a.plus_months(delta)) == delta);
  }
}
