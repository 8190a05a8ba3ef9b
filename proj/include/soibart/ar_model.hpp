#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "soibart/dataset.hpp"
#include "soibart/errors.hpp"
#include "soibart/linalg.hpp"

namespace soibart {

// Linear AR(p) fitted by least squares on the same lag matrix the tree model
// uses. coefficients[j] multiplies the value lags[j] months back.
struct ARModel {
  int p = 0;
  double intercept = 0.0;
  std::vector<double> coefficients;
  double residual_sd = 0.0;

  nlohmann::json to_json() const {
    return nlohmann::json{{"p", p},
                          {"intercept", intercept},
                          {"coefficients", coefficients},
                          {"residual_sd", residual_sd}};
  }

  static ARModel from_json(const nlohmann::json& j) {
    ARModel m;
    m.p = j.at("p").get<int>();
    m.intercept = j.at("intercept").get<double>();
    m.coefficients = j.at("coefficients").get<std::vector<double>>();
    m.residual_sd = j.at("residual_sd").get<double>();
    return m;
  }
};

inline ARModel fit_ar(const SupervisedDataset& ds, const SplitMask& mask) {
  if (mask.assignment.size() != ds.n())
    fail(ErrorCode::LengthMismatch, "mask length does not match dataset rows");
  std::vector<std::vector<double>> rows;
  std::vector<double> y;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    if (mask.assignment[i] == Role::Train) {
      rows.push_back(ds.rows[i]);
      y.push_back(ds.targets[i]);
    }
  }
  const std::size_t p = ds.p();
  if (rows.size() <= p + 1)
    fail(ErrorCode::TooFewRows,
         std::to_string(rows.size()) + " training rows for AR(" + std::to_string(p) + ")");

  const detail::OlsFit ols = detail::ols(rows, y);
  // A collinear design is tolerated only when the fit is exact (the
  // minimum-norm coefficients are then the natural answer); otherwise the
  // coefficients are not identifiable.
  if (!ols.full_rank && ols.residual_sd > 1e-6 * std::max(1.0, sd_of(y)))
    fail(ErrorCode::RankDeficient, "lag design matrix is rank deficient");

  ARModel model;
  model.p = static_cast<int>(p);
  model.intercept = ols.intercept;
  model.coefficients = ols.coefficients;
  model.residual_sd = ols.residual_sd;
  return model;
}

// Iterated plug-in forecasts. history holds the last p observed values in
// time order (oldest first); each step feeds the forecast back as the newest
// value. Assumes the model was fitted on consecutive lags 1..p.
inline std::vector<double> forecast_ar(const ARModel& model, std::span<const double> history,
                                       int horizon) {
  if (horizon < 1) fail(ErrorCode::InvalidConfig, "horizon must be >= 1");
  if (history.size() < static_cast<std::size_t>(model.p))
    fail(ErrorCode::TooFewRows, "history shorter than model order");

  std::vector<double> window(history.end() - model.p, history.end());
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(horizon));
  for (int h = 0; h < horizon; ++h) {
    double next = model.intercept;
    for (int j = 0; j < model.p; ++j)
      next += model.coefficients[static_cast<std::size_t>(j)] *
              window[window.size() - 1 - static_cast<std::size_t>(j)];
    out.push_back(next);
    window.erase(window.begin());
    window.push_back(next);
  }
  return out;
}

}  // namespace soibart
