#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "soibart/bart.hpp"
#include "soibart/dataset.hpp"
#include "soibart/errors.hpp"
#include "soibart/forecast.hpp"
#include "soibart/parallel.hpp"
#include "soibart/time_series.hpp"

namespace soibart {

// A named experiment: lag set, tree count, split and run protocol.
struct ExperimentPreset {
  enum class Kind { FitTable, Importance, HorizonTable };

  std::string name;
  std::string description;
  LagSpec spec;
  int m = 20;
  double train_fraction = 0.8;
  std::size_t runs = 10;
  Kind kind = Kind::FitTable;
  int horizon = 0;  // horizon tables only
};

inline const std::vector<ExperimentPreset>& preset_registry() {
  static const std::vector<ExperimentPreset> presets = [] {
    std::vector<ExperimentPreset> out;
    const int october = 10;
    out.push_back({"oct-full", "October target from the 12 months prior plus months 41 and 73 back",
                   LagSpec::parse("1..12,41,73", october), 20, 0.8, 10,
                   ExperimentPreset::Kind::FitTable, 0});
    out.push_back({"oct-reduced", "October target from the five months prior",
                   LagSpec::parse("1..5", october), 20, 0.8, 10,
                   ExperimentPreset::Kind::FitTable, 0});
    out.push_back({"oct-no-sep", "October target skipping September (lags 2..6)",
                   LagSpec::parse("2..6", october), 20, 0.8, 10,
                   ExperimentPreset::Kind::FitTable, 0});
    out.push_back({"oct-far", "October target from the previous December and May three years back",
                   LagSpec::parse("10,41", october), 20, 0.8, 10,
                   ExperimentPreset::Kind::FitTable, 0});
    out.push_back({"oct-far-73", "oct-far variant that also includes month 73 back",
                   LagSpec::parse("10,41,73", october), 20, 0.8, 10,
                   ExperimentPreset::Kind::FitTable, 0});
    out.push_back({"oct-select", "starved-ensemble variable importance for the 14 October features",
                   LagSpec::parse("1..12,41,73", october), 20, 0.8, 10,
                   ExperimentPreset::Kind::Importance, 0});
    out.push_back({"ar-select", "starved-ensemble lag importance, every month a target",
                   LagSpec::parse("1..9,41,73"), 20, 2.0 / 3.0, 10,
                   ExperimentPreset::Kind::Importance, 0});
    out.push_back({"ar5-backtest", "12-horizon iterated backtest with lags 1..5 and 40 trees",
                   LagSpec::parse("1..5"), 40, 2.0 / 3.0, 10,
                   ExperimentPreset::Kind::HorizonTable, 12});
    return out;
  }();
  return presets;
}

inline const ExperimentPreset& find_preset(const std::string& name) {
  for (const ExperimentPreset& p : preset_registry())
    if (p.name == name) return p;
  std::string known;
  for (const ExperimentPreset& p : preset_registry()) {
    if (!known.empty()) known += ", ";
    known += p.name;
  }
  fail(ErrorCode::UnknownPreset, "'" + name + "' (known: " + known + ")");
}

struct PresetOverrides {
  std::optional<int> m;
  std::optional<std::size_t> runs;
  std::optional<double> train_fraction;
  std::optional<int> horizon;
  std::optional<int> n_iter;
  std::optional<int> burn_in;
  std::size_t best_of = 1;  // fits per run, keeping the best test RMSE
  Feedback feedback = Feedback::Mean;
  unsigned jobs = 1;
};

struct PresetReport {
  std::string preset_name;
  std::size_t runs = 0;

  bool has_fit_table = false;
  FitStats train;
  FitStats test;
  std::vector<FitStats> per_run_train;
  std::vector<FitStats> per_run_test;

  bool has_importance = false;
  ImportanceReport importance;

  bool has_horizons = false;
  HorizonBacktest horizons;
};

// test RMSE minus train RMSE; the overfitting measure the experiments compare.
inline double overfit_gap(const PresetReport& report) {
  if (!report.has_fit_table) fail(ErrorCode::InvalidConfig, "report holds no fit table");
  return report.test.rmse - report.train.rmse;
}

namespace detail {

inline std::pair<FitStats, FitStats> score_posterior(const BartPosterior& posterior,
                                                     const SupervisedDataset& ds,
                                                     const SplitMask& mask) {
  std::vector<double> pred_train, act_train, pred_test, act_test;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const double pred = posterior.predict_mean(ds.rows[i]);
    if (mask.assignment[i] == Role::Train) {
      pred_train.push_back(pred);
      act_train.push_back(ds.targets[i]);
    } else {
      pred_test.push_back(pred);
      act_test.push_back(ds.targets[i]);
    }
  }
  return {fit_stats(pred_train, act_train), fit_stats(pred_test, act_test)};
}

}  // namespace detail

// Runs a preset: fresh random split per run (split seed = master_seed + run),
// statistics averaged across runs.
inline PresetReport run_preset(const std::string& name, const TimeSeries& series,
                               std::uint64_t master_seed, const PresetOverrides& overrides = {}) {
  const ExperimentPreset& base = find_preset(name);
  ExperimentPreset preset = base;
  if (overrides.m) preset.m = *overrides.m;
  if (overrides.runs) preset.runs = *overrides.runs;
  if (overrides.train_fraction) preset.train_fraction = *overrides.train_fraction;
  if (overrides.horizon) preset.horizon = *overrides.horizon;

  BartConfig config;
  config.m = preset.m;
  if (overrides.n_iter) config.n_iter = *overrides.n_iter;
  if (overrides.burn_in) config.burn_in = *overrides.burn_in;

  PresetReport report;
  report.preset_name = preset.name;
  report.runs = preset.runs;

  if (preset.kind == ExperimentPreset::Kind::HorizonTable) {
    report.has_horizons = true;
    report.horizons =
        backtest_horizons(series, preset.spec, config, preset.train_fraction, preset.runs,
                          preset.horizon, master_seed, overrides.feedback, overrides.jobs);
    return report;
  }

  const SupervisedDataset ds = build_lag_matrix(series, preset.spec);

  if (preset.kind == ExperimentPreset::Kind::Importance) {
    report.has_importance = true;
    const SplitMask mask = random_split(ds.n(), preset.train_fraction, master_seed);
    report.importance = variable_importance(ds, mask, config, preset.runs, master_seed);
    return report;
  }

  report.has_fit_table = true;
  report.per_run_train.resize(preset.runs);
  report.per_run_test.resize(preset.runs);
  Rng seeder(master_seed);
  std::vector<std::uint64_t> fit_seeds(preset.runs);
  for (std::size_t r = 0; r < preset.runs; ++r) fit_seeds[r] = seeder.child(r).next_u64();

  parallel_for(preset.runs, overrides.jobs, [&](std::size_t r) {
    const SplitMask mask = random_split(ds.n(), preset.train_fraction, master_seed + r);
    Rng run_rng(fit_seeds[r]);
    std::pair<FitStats, FitStats> best;
    bool have_best = false;
    for (std::size_t attempt = 0; attempt < overrides.best_of; ++attempt) {
      const BartPosterior posterior = fit(ds, mask, config, run_rng.child(attempt).next_u64());
      const auto scored = detail::score_posterior(posterior, ds, mask);
      if (!have_best || scored.second.rmse < best.second.rmse) {
        best = scored;
        have_best = true;
      }
    }
    report.per_run_train[r] = best.first;
    report.per_run_test[r] = best.second;
  });

  report.train = average_stats(report.per_run_train);
  report.test = average_stats(report.per_run_test);
  return report;
}

// ---------------------------------------------------------------------------
// Report rendering

inline std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

inline std::string format_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string fit_table_text(const PresetReport& report) {
  std::string out = report.preset_name + " (" + std::to_string(report.runs) + " runs)\n";
  out += "Sample    CORR   MAE    RMSE\n";
  out += "Training  " + format_fixed(report.train.corr, 2) + "   " +
         format_fixed(report.train.mae, 2) + "   " + format_fixed(report.train.rmse, 2) + "\n";
  out += "Testing   " + format_fixed(report.test.corr, 2) + "   " +
         format_fixed(report.test.mae, 2) + "   " + format_fixed(report.test.rmse, 2) + "\n";
  return out;
}

inline std::string fit_table_csv(const PresetReport& report) {
  std::string out = "sample,corr,mae,rmse,n\n";
  out += "training," + format_full(report.train.corr) + "," + format_full(report.train.mae) + "," +
         format_full(report.train.rmse) + "," + format_full(report.train.n) + "\n";
  out += "testing," + format_full(report.test.corr) + "," + format_full(report.test.mae) + "," +
         format_full(report.test.rmse) + "," + format_full(report.test.n) + "\n";
  return out;
}

inline std::string importance_text(const ImportanceReport& report) {
  std::string out = "Variable   Importance (1 = medium)\n";
  for (std::size_t j = 0; j < report.feature_names.size(); ++j)
    out += report.feature_names[j] + std::string(11 - std::min<std::size_t>(10, report.feature_names[j].size()), ' ') +
           format_fixed(report.importance[j], 2) + "\n";
  return out;
}

inline std::string importance_csv(const ImportanceReport& report) {
  std::string out = "feature,importance\n";
  for (std::size_t j = 0; j < report.feature_names.size(); ++j)
    out += report.feature_names[j] + "," + format_full(report.importance[j]) + "\n";
  return out;
}

inline std::string horizons_text(const HorizonBacktest& bt) {
  std::string out = "Out of Sample  CORR    MAE     RMSE\n";
  for (std::size_t h = 0; h < bt.per_horizon.size(); ++h) {
    const FitStats& s = bt.per_horizon[h];
    out += std::to_string(h + 1) + (h == 0 ? " Month   " : " Months  ");
    if (h + 1 < 10) out += ' ';
    out += "    " + format_fixed(s.corr, 3) + "   " + format_fixed(s.mae, 3) + "   " +
           format_fixed(s.rmse, 3) + "\n";
  }
  return out;
}

inline std::string horizons_csv(const HorizonBacktest& bt) {
  std::string out = "horizon,corr,mae,rmse,n\n";
  for (std::size_t h = 0; h < bt.per_horizon.size(); ++h) {
    const FitStats& s = bt.per_horizon[h];
    out += std::to_string(h + 1) + "," + format_full(s.corr) + "," + format_full(s.mae) + "," +
           format_full(s.rmse) + "," + format_full(s.n) + "\n";
  }
  return out;
}

}  // namespace soibart
