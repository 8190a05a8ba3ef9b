#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "soibart/ar_model.hpp"
#include "soibart/bart.hpp"
#include "soibart/dataset.hpp"
#include "soibart/errors.hpp"
#include "soibart/parallel.hpp"
#include "soibart/rng.hpp"
#include "soibart/stats.hpp"
#include "soibart/time_series.hpp"

namespace soibart {

enum class Feedback { Mean, Median };

inline const char* feedback_name(Feedback f) { return f == Feedback::Mean ? "mean" : "median"; }

struct ForecastConfig {
  int horizon = 12;
  Feedback feedback = Feedback::Mean;
  std::size_t n_trajectories = 0;  // 0 = point forecast only
  std::vector<double> quantiles{0.05, 0.25, 0.50, 0.75, 0.95};
  bool refit_each_step = true;

  void validate() const {
    if (horizon < 1) fail(ErrorCode::InvalidConfig, "horizon must be >= 1");
    double prev = 0.0;
    for (double q : quantiles) {
      if (!(q > 0.0 && q < 1.0)) fail(ErrorCode::InvalidConfig, "quantiles must lie in (0,1)");
      if (q <= prev) fail(ErrorCode::InvalidConfig, "quantiles must be sorted and distinct");
      prev = q;
    }
  }
};

struct ForecastResult {
  std::vector<MonthStamp> stamps;                // one per horizon
  std::vector<double> point;                     // mean- or median-feedback path
  std::vector<double> quantile_levels;           // empty without trajectories
  std::vector<std::vector<double>> quantile_values;  // per horizon, per level
  Feedback feedback = Feedback::Mean;
  bool refit_each_step = true;
};

struct TrajectoryMatrix {
  std::vector<std::vector<double>> paths;  // n_trajectories x horizon
  std::vector<MonthStamp> stamps;
};

namespace detail {

// Lag vector for predicting the month immediately after `window`'s last
// entry. window must hold at least max_lag trailing values.
inline std::vector<double> lag_vector(const std::vector<double>& window, const LagSpec& spec) {
  std::vector<double> x(spec.lags.size());
  for (std::size_t j = 0; j < spec.lags.size(); ++j)
    x[j] = window[window.size() - static_cast<std::size_t>(spec.lags[j])];
  return x;
}

inline double point_prediction(const BartPosterior& posterior, std::span<const double> x,
                               Feedback feedback) {
  return feedback == Feedback::Mean ? posterior.predict_mean(x) : posterior.predict_median(x);
}

inline BartPosterior fit_full(const TimeSeries& series, const LagSpec& spec,
                              const BartConfig& config, std::uint64_t seed) {
  const SupervisedDataset ds = build_lag_matrix(series, spec);
  return fit(ds, SplitMask::all_train(ds.n()), config, seed);
}

// Feedback iteration against an arbitrary one-step predictor: predict, append
// the prediction as if observed, repeat.
template <typename StepFn>
std::vector<double> iterate_points(std::vector<double> window, const LagSpec& spec, int horizon,
                                   StepFn&& step) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(horizon));
  for (int h = 1; h <= horizon; ++h) {
    const double value = step(lag_vector(window, spec), h);
    window.push_back(value);
    out.push_back(value);
  }
  return out;
}

// Iterated point forecasts launched from one anchor index: the window holds
// true values up to and including the anchor, never beyond it.
template <typename Predictor>
std::vector<double> anchor_forecast(const std::vector<double>& series_values, std::size_t anchor,
                                    const LagSpec& spec, int horizon, Predictor&& predictor) {
  const std::size_t max_lag = static_cast<std::size_t>(spec.max_lag());
  std::vector<double> window(
      series_values.begin() + static_cast<std::ptrdiff_t>(anchor + 1 - max_lag),
      series_values.begin() + static_cast<std::ptrdiff_t>(anchor + 1));
  return iterate_points(std::move(window), spec, horizon,
                        [&](const std::vector<double>& x, int) { return predictor(x); });
}

}  // namespace detail

// Point-feedback multi-horizon forecast from the end of the series: predict
// one month ahead, append the point as if observed, continue. With
// refit_each_step the model is refitted on the extended series before every
// later step; otherwise the original posterior is reused on the extended lag
// window.
inline ForecastResult iterate_forecast(const TimeSeries& series, const LagSpec& spec,
                                       const BartConfig& config, const ForecastConfig& fconfig,
                                       std::uint64_t seed) {
  spec.validate();
  fconfig.validate();
  if (spec.target_month)
    fail(ErrorCode::InvalidConfig, "iterated forecasting needs an all-months lag spec");

  Rng seeder(seed);
  ForecastResult out;
  out.feedback = fconfig.feedback;
  out.refit_each_step = fconfig.refit_each_step;

  std::vector<double> working(series.values());
  MonthStamp stamp = series.end();
  BartPosterior posterior = detail::fit_full(series, spec, config, seeder.child(0).next_u64());

  for (int h = 1; h <= fconfig.horizon; ++h) {
    if (fconfig.refit_each_step && h > 1) {
      const TimeSeries extended(series.start(), working);
      posterior = detail::fit_full(extended, spec, config,
                                   seeder.child(static_cast<std::uint64_t>(h)).next_u64());
    }
    const auto x = detail::lag_vector(working, spec);
    const double point = detail::point_prediction(posterior, x, fconfig.feedback);
    working.push_back(point);
    stamp = stamp.plus_months(1);
    out.stamps.push_back(stamp);
    out.point.push_back(point);
  }
  return out;
}

// Predictive-interval machinery: each trajectory independently feeds back a
// random draw from the one-step predictive distribution instead of the point.
inline TrajectoryMatrix sample_trajectories(const TimeSeries& series, const LagSpec& spec,
                                            const BartConfig& config, int horizon,
                                            std::size_t n_trajectories, std::uint64_t seed,
                                            bool refit_each_step = false, unsigned jobs = 1) {
  spec.validate();
  if (spec.target_month)
    fail(ErrorCode::InvalidConfig, "iterated forecasting needs an all-months lag spec");
  if (horizon < 1) fail(ErrorCode::InvalidConfig, "horizon must be >= 1");
  if (n_trajectories < 1) fail(ErrorCode::InvalidConfig, "need at least one trajectory");

  Rng seeder(seed);
  const BartPosterior base = detail::fit_full(series, spec, config, seeder.child(0).next_u64());

  TrajectoryMatrix out;
  out.paths.assign(n_trajectories, std::vector<double>(static_cast<std::size_t>(horizon), 0.0));
  MonthStamp stamp = series.end();
  for (int h = 1; h <= horizon; ++h) out.stamps.push_back(stamp = stamp.plus_months(1));

  parallel_for(n_trajectories, jobs, [&](std::size_t t) {
    Rng rng = seeder.child(1 + t);
    std::vector<double> working(series.values());
    for (int h = 1; h <= horizon; ++h) {
      double value;
      if (refit_each_step && h > 1) {
        const TimeSeries extended(series.start(), working);
        const BartPosterior refit_posterior = detail::fit_full(
            extended, spec, config, rng.child(static_cast<std::uint64_t>(h)).next_u64());
        value = refit_posterior.sample_predictive(detail::lag_vector(working, spec), rng);
      } else {
        value = base.sample_predictive(detail::lag_vector(working, spec), rng);
      }
      working.push_back(value);
      out.paths[t][static_cast<std::size_t>(h - 1)] = value;
    }
  });
  return out;
}

// Per-horizon quantiles across trajectories; rows ordered by horizon.
inline std::vector<std::vector<double>> trajectory_quantiles(const TrajectoryMatrix& m,
                                                             const std::vector<double>& levels) {
  if (m.paths.size() < 2) fail(ErrorCode::TooFewRows, "need at least 2 trajectories for quantiles");
  const std::size_t horizon = m.paths.front().size();
  std::vector<std::vector<double>> out(horizon, std::vector<double>(levels.size(), 0.0));
  std::vector<double> column(m.paths.size());
  for (std::size_t h = 0; h < horizon; ++h) {
    for (std::size_t t = 0; t < m.paths.size(); ++t) column[t] = m.paths[t][h];
    std::sort(column.begin(), column.end());
    for (std::size_t q = 0; q < levels.size(); ++q)
      out[h][q] = quantile_sorted(column, levels[q]);
  }
  return out;
}

// Point forecast plus trajectory-based intervals in one result.
inline ForecastResult forecast_with_intervals(const TimeSeries& series, const LagSpec& spec,
                                              const BartConfig& config,
                                              const ForecastConfig& fconfig, std::uint64_t seed,
                                              unsigned jobs = 1) {
  ForecastResult out = iterate_forecast(series, spec, config, fconfig, seed);
  if (fconfig.n_trajectories > 0) {
    const TrajectoryMatrix m =
        sample_trajectories(series, spec, config, fconfig.horizon, fconfig.n_trajectories,
                            seed + 1, fconfig.refit_each_step, jobs);
    out.quantile_levels = fconfig.quantiles;
    out.quantile_values = trajectory_quantiles(m, fconfig.quantiles);
  }
  return out;
}

struct HorizonBacktest {
  std::vector<FitStats> per_horizon;  // index 0 = one month ahead
  Feedback feedback = Feedback::Mean;
  std::size_t runs = 0;
};

namespace detail {

// Shared protocol for the tree model and the linear baseline: random split,
// fit on the training rows, iterated point forecasts from every test anchor
// using true history up to the anchor plus fed-back predictions only.
template <typename MakePredictor>
HorizonBacktest backtest_core(const TimeSeries& series, const LagSpec& spec,
                              double train_fraction, std::size_t runs, int horizon,
                              std::uint64_t seed, Feedback feedback, unsigned jobs,
                              MakePredictor&& make_predictor) {
  spec.validate();
  if (spec.target_month)
    fail(ErrorCode::InvalidConfig, "horizon backtests need an all-months lag spec");
  if (horizon < 1) fail(ErrorCode::InvalidConfig, "horizon must be >= 1");
  if (runs < 1) fail(ErrorCode::InvalidConfig, "need at least one run");

  const SupervisedDataset ds = build_lag_matrix(series, spec);
  const std::size_t H = static_cast<std::size_t>(horizon);

  // per run, per horizon
  std::vector<std::vector<FitStats>> run_stats(runs);
  Rng seeder(seed);
  std::vector<std::uint64_t> fit_seeds(runs);
  for (std::size_t r = 0; r < runs; ++r) fit_seeds[r] = seeder.child(r).next_u64();

  parallel_for(runs, jobs, [&](std::size_t r) {
    // run-index split seeding keeps every run reproducible in isolation
    const SplitMask mask = random_split(ds.n(), train_fraction, seed + r);
    auto predictor = make_predictor(ds, mask, fit_seeds[r]);

    std::vector<std::vector<double>> predicted(H), actual(H);
    for (std::size_t i = 0; i < ds.n(); ++i) {
      if (mask.assignment[i] != Role::Test) continue;
      const auto target_index = series.index_of(ds.target_stamps[i]);
      const std::size_t anchor = *target_index - 1;  // last observed month

      const auto path = anchor_forecast(series.values(), anchor, spec, horizon, predictor);
      for (std::size_t h = 1; h <= H; ++h) {
        const std::size_t target = anchor + h;
        if (target < series.size()) {
          predicted[h - 1].push_back(path[h - 1]);
          actual[h - 1].push_back(series[target]);
        }
      }
    }

    run_stats[r].resize(H);
    for (std::size_t h = 0; h < H; ++h)
      run_stats[r][h] = fit_stats(predicted[h], actual[h]);
  });

  HorizonBacktest out;
  out.feedback = feedback;
  out.runs = runs;
  out.per_horizon.resize(H);
  for (std::size_t h = 0; h < H; ++h) {
    std::vector<FitStats> across;
    across.reserve(runs);
    for (std::size_t r = 0; r < runs; ++r) across.push_back(run_stats[r][h]);
    out.per_horizon[h] = average_stats(across);
  }
  return out;
}

}  // namespace detail

// Multi-run, multi-horizon out-of-sample evaluation of the tree model. The
// fitted posterior is reused across the feedback steps of a run; anchors
// whose target falls beyond the series end are skipped per horizon.
inline HorizonBacktest backtest_horizons(const TimeSeries& series, const LagSpec& spec,
                                         const BartConfig& config, double train_fraction,
                                         std::size_t runs, int horizon, std::uint64_t seed,
                                         Feedback feedback = Feedback::Mean, unsigned jobs = 1) {
  return detail::backtest_core(
      series, spec, train_fraction, runs, horizon, seed, feedback, jobs,
      [&](const SupervisedDataset& ds, const SplitMask& mask, std::uint64_t fit_seed) {
        auto posterior = std::make_shared<BartPosterior>(fit(ds, mask, config, fit_seed));
        return [posterior, feedback](const std::vector<double>& x) {
          return detail::point_prediction(*posterior, x, feedback);
        };
      });
}

// Same protocol with the least-squares AR baseline.
inline HorizonBacktest backtest_horizons_ar(const TimeSeries& series, const LagSpec& spec,
                                            double train_fraction, std::size_t runs, int horizon,
                                            std::uint64_t seed, unsigned jobs = 1) {
  return detail::backtest_core(
      series, spec, train_fraction, runs, horizon, seed, Feedback::Mean, jobs,
      [&](const SupervisedDataset& ds, const SplitMask& mask, std::uint64_t) {
        auto model = std::make_shared<ARModel>(fit_ar(ds, mask));
        return [model](const std::vector<double>& x) {
          double value = model->intercept;
          for (std::size_t j = 0; j < x.size(); ++j)
            value += model->coefficients[j] * x[j];
          return value;
        };
      });
}

}  // namespace soibart
