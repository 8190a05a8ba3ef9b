#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include "soibart/errors.hpp"
#include "soibart/rng.hpp"
#include "soibart/time_series.hpp"

namespace soibart {

// Which months prior feed the regression, and (optionally) which calendar
// month the target is restricted to.
struct LagSpec {
  std::vector<int> lags;                 // strictly increasing, all >= 1
  std::optional<int> target_month;       // 1..12

  void validate() const {
    if (lags.empty()) fail(ErrorCode::InvalidConfig, "lag list is empty");
    int prev = 0;
    for (int lag : lags) {
      if (lag < 1) fail(ErrorCode::InvalidConfig, "lag must be >= 1");
      if (lag <= prev) fail(ErrorCode::InvalidConfig, "lags must be strictly increasing");
      prev = lag;
    }
    if (target_month && (*target_month < 1 || *target_month > 12))
      fail(ErrorCode::InvalidConfig, "target month outside 1..12");
  }

  int max_lag() const { return lags.back(); }

  // Compact syntax used throughout the CLI: "1..12,41,73".
  static LagSpec parse(const std::string& text, std::optional<int> target_month = std::nullopt) {
    LagSpec spec;
    spec.target_month = target_month;
    std::size_t i = 0;
    while (i < text.size()) {
      std::size_t j = text.find(',', i);
      if (j == std::string::npos) j = text.size();
      const std::string piece = text.substr(i, j - i);
      const std::size_t dots = piece.find("..");
      try {
        if (dots == std::string::npos) {
          spec.lags.push_back(std::stoi(piece));
        } else {
          const int lo = std::stoi(piece.substr(0, dots));
          const int hi = std::stoi(piece.substr(dots + 2));
          for (int k = lo; k <= hi; ++k) spec.lags.push_back(k);
        }
      } catch (const std::exception&) {
        fail(ErrorCode::InvalidConfig, "bad lag token '" + piece + "'");
      }
      i = j + 1;
    }
    spec.validate();
    return spec;
  }
};

// Lag-feature design matrix: row i predicts targets[i] observed at
// target_stamps[i] from the series values lags[j] months earlier.
struct SupervisedDataset {
  std::vector<std::string> feature_names;
  std::vector<std::vector<double>> rows;  // n x p
  std::vector<double> targets;
  std::vector<MonthStamp> target_stamps;

  std::size_t n() const { return rows.size(); }
  std::size_t p() const { return feature_names.size(); }
};

inline SupervisedDataset build_lag_matrix(const TimeSeries& series, const LagSpec& spec) {
  spec.validate();
  const int max_lag = spec.max_lag();
  if (static_cast<long>(series.size()) <= max_lag)
    fail(ErrorCode::SeriesTooShort,
         "series of length " + std::to_string(series.size()) +
             " cannot support lag " + std::to_string(max_lag));

  SupervisedDataset ds;
  ds.feature_names.reserve(spec.lags.size());
  for (int lag : spec.lags) ds.feature_names.push_back("lag_" + std::to_string(lag));

  for (std::size_t t = static_cast<std::size_t>(max_lag); t < series.size(); ++t) {
    const MonthStamp stamp = series.stamp_at(t);
    if (spec.target_month && stamp.month != *spec.target_month) continue;
    std::vector<double> row(spec.lags.size());
    for (std::size_t j = 0; j < spec.lags.size(); ++j)
      row[j] = series[t - static_cast<std::size_t>(spec.lags[j])];
    ds.rows.push_back(std::move(row));
    ds.targets.push_back(series[t]);
    ds.target_stamps.push_back(stamp);
  }
  if (ds.rows.empty())
    fail(ErrorCode::SeriesTooShort, "no eligible target months for this lag spec");
  return ds;
}

enum class Role : unsigned char { Train, Test };

struct SplitMask {
  std::vector<Role> assignment;
  std::uint64_t seed = 0;
  double train_fraction = 0.0;

  std::size_t n_train() const {
    return static_cast<std::size_t>(std::count(assignment.begin(), assignment.end(), Role::Train));
  }
  std::size_t n_test() const { return assignment.size() - n_train(); }

  std::vector<std::size_t> indices(Role role) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment.size(); ++i)
      if (assignment[i] == role) out.push_back(i);
    return out;
  }

  static SplitMask all_train(std::size_t n) {
    SplitMask mask;
    mask.assignment.assign(n, Role::Train);
    mask.train_fraction = 1.0;
    return mask;
  }
};

// Rounding rule fixed as floor(n*f + 0.5) so split sizes are exact and
// test expectations stay stable.
inline std::size_t train_count_for(std::size_t n, double train_fraction) {
  return static_cast<std::size_t>(std::floor(static_cast<double>(n) * train_fraction + 0.5));
}

inline SplitMask random_split(std::size_t n, double train_fraction, std::uint64_t seed) {
  if (n < 2) fail(ErrorCode::DegenerateSplit, "need at least 2 rows to split");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    fail(ErrorCode::InvalidConfig, "train fraction must be in (0,1)");
  const std::size_t n_train = train_count_for(n, train_fraction);
  if (n_train == 0 || n_train == n)
    fail(ErrorCode::DegenerateSplit, "split leaves one side empty");

  Rng rng(seed);
  const auto perm = rng.sample_indices(n, n_train);
  SplitMask mask;
  mask.assignment.assign(n, Role::Test);
  for (std::size_t i = 0; i < n_train; ++i) mask.assignment[perm[i]] = Role::Train;
  mask.seed = seed;
  mask.train_fraction = train_fraction;
  return mask;
}

// The three accuracy measures reported for every model.
struct FitStats {
  double corr = 0.0;
  double mae = 0.0;
  double rmse = 0.0;
  double n = 0.0;  // kept as double: averaged reports carry mean counts
};

// MAE and RMSE remain well defined when the actuals are constant.
struct ErrorStats {
  double mae = 0.0;
  double rmse = 0.0;
  std::size_t n = 0;
};

inline ErrorStats error_stats(const std::vector<double>& predicted,
                              const std::vector<double>& actual) {
  if (predicted.size() != actual.size())
    fail(ErrorCode::LengthMismatch,
         std::to_string(predicted.size()) + " predictions vs " + std::to_string(actual.size()) + " actuals");
  if (predicted.empty()) fail(ErrorCode::EmptyInput, "no observations");
  double abs_sum = 0.0, sq_sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double e = predicted[i] - actual[i];
    abs_sum += std::abs(e);
    sq_sum += e * e;
  }
  const double n = static_cast<double>(predicted.size());
  return ErrorStats{abs_sum / n, std::sqrt(sq_sum / n), predicted.size()};
}

inline FitStats fit_stats(const std::vector<double>& predicted,
                          const std::vector<double>& actual) {
  const ErrorStats err = error_stats(predicted, actual);
  if (predicted.size() < 2) fail(ErrorCode::TooFewRows, "need n >= 2 for a correlation");

  const double n = static_cast<double>(predicted.size());
  double mp = 0.0, ma = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    mp += predicted[i];
    ma += actual[i];
  }
  mp /= n;
  ma /= n;
  double spa = 0.0, spp = 0.0, saa = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double dp = predicted[i] - mp;
    const double da = actual[i] - ma;
    spa += dp * da;
    spp += dp * dp;
    saa += da * da;
  }
  if (saa == 0.0) fail(ErrorCode::ConstantActuals, "correlation undefined for constant actuals");
  // A constant predictor has no linear association; report 0 rather than NaN.
  const double corr = (spp == 0.0) ? 0.0 : spa / std::sqrt(spp * saa);
  return FitStats{corr, err.mae, err.rmse, n};
}

// Mean of per-run statistics, matching reports that average the measures over
// repeated fits rather than pooling the errors.
inline FitStats average_stats(const std::vector<FitStats>& stats) {
  if (stats.empty()) fail(ErrorCode::EmptyInput, "no runs to average");
  FitStats out;
  for (const FitStats& s : stats) {
    out.corr += s.corr;
    out.mae += s.mae;
    out.rmse += s.rmse;
    out.n += s.n;
  }
  const double k = static_cast<double>(stats.size());
  out.corr /= k;
  out.mae /= k;
  out.rmse /= k;
  out.n /= k;
  return out;
}

// Inspection export: lag_<k> feature columns plus target and its stamp.
inline std::string dataset_to_csv(const SupervisedDataset& ds) {
  std::string out;
  for (const auto& name : ds.feature_names) {
    out += name;
    out += ',';
  }
  out += "target,year,month\n";
  char buf[64];
  for (std::size_t i = 0; i < ds.n(); ++i) {
    for (double v : ds.rows[i]) {
      std::snprintf(buf, sizeof(buf), "%.17g,", v);
      out += buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g,%d,%d\n", ds.targets[i], ds.target_stamps[i].year,
                  ds.target_stamps[i].month);
    out += buf;
  }
  return out;
}

}  // namespace soibart
