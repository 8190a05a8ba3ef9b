#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "soibart/errors.hpp"
#include "soibart/time_series.hpp"

namespace soibart {

// Raw spectral ordinates at the Fourier frequencies k/n, k = 1..floor(n/2).
//
// Convention: I(f_k) = (1/n) |sum_t (y_t - ybar) e^(-2*pi*i*f_k*t)|^2, so
// sample variance (1/n scaling) = (2/n) * sum_k I(f_k), with the Nyquist
// ordinate counted once for even n.
struct Periodogram {
  std::vector<double> frequencies;  // cycles per month, in (0, 0.5]
  std::vector<double> power;
};

inline Periodogram periodogram(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n < 4) fail(ErrorCode::TooShort, "periodogram needs at least 4 observations");

  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);

  const std::size_t n_freq = n / 2;
  Periodogram out;
  out.frequencies.resize(n_freq);
  out.power.resize(n_freq);
  for (std::size_t k = 1; k <= n_freq; ++k) {
    const double w = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    double re = 0.0, im = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double centered = values[t] - mean;
      re += centered * std::cos(w * static_cast<double>(t));
      im -= centered * std::sin(w * static_cast<double>(t));
    }
    out.frequencies[k - 1] = static_cast<double>(k) / static_cast<double>(n);
    out.power[k - 1] = (re * re + im * im) / static_cast<double>(n);
  }
  return out;
}

inline Periodogram periodogram(const TimeSeries& series) { return periodogram(series.values()); }

// Autocorrelations with the biased (1/n) covariance normalization, which
// keeps the sequence positive semidefinite for the recursion below.
struct Correlogram {
  std::vector<double> acf;   // lags 1..L
  std::vector<double> pacf;  // lags 1..L
  double band = 0.0;         // +-1.96/sqrt(n)
  std::size_t n = 0;
};

inline std::vector<double> acf(const std::vector<double>& values, std::size_t max_lag) {
  const std::size_t n = values.size();
  if (max_lag >= (n + 1) / 2)
    fail(ErrorCode::LagTooLarge, "max lag must be below n/2");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double c0 = 0.0;
  for (double v : values) c0 += (v - mean) * (v - mean);
  c0 /= static_cast<double>(n);
  if (c0 == 0.0) fail(ErrorCode::ConstantSeries, "autocorrelation undefined for a constant series");

  std::vector<double> out(max_lag);
  for (std::size_t k = 1; k <= max_lag; ++k) {
    double ck = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) ck += (values[t] - mean) * (values[t + k] - mean);
    ck /= static_cast<double>(n);
    out[k - 1] = ck / c0;
  }
  return out;
}

// Partial autocorrelations from the Durbin-Levinson recursion on acf(1..L).
inline std::vector<double> pacf_from_acf(const std::vector<double>& rho) {
  const std::size_t L = rho.size();
  std::vector<double> pacf(L, 0.0);
  if (L == 0) return pacf;

  std::vector<double> phi_prev(L + 1, 0.0);
  std::vector<double> phi(L + 1, 0.0);
  phi[1] = rho[0];
  pacf[0] = rho[0];
  double v = 1.0 - rho[0] * rho[0];
  for (std::size_t k = 2; k <= L; ++k) {
    std::swap(phi_prev, phi);
    double num = rho[k - 1];
    for (std::size_t j = 1; j < k; ++j) num -= phi_prev[j] * rho[k - 1 - j];
    const double a = (v > 0.0) ? num / v : 0.0;
    for (std::size_t j = 1; j < k; ++j) phi[j] = phi_prev[j] - a * phi_prev[k - j];
    phi[k] = a;
    pacf[k - 1] = a;
    v *= (1.0 - a * a);
  }
  return pacf;
}

inline Correlogram correlogram(const std::vector<double>& values, std::size_t max_lag) {
  Correlogram out;
  out.acf = acf(values, max_lag);
  out.pacf = pacf_from_acf(out.acf);
  out.n = values.size();
  out.band = 1.96 / std::sqrt(static_cast<double>(values.size()));
  return out;
}

inline Correlogram correlogram(const TimeSeries& series, std::size_t max_lag) {
  return correlogram(series.values(), max_lag);
}

// Band-count whiteness check on a residual series.
struct WhiteNoiseResult {
  double fraction_within_bands = 0.0;
  bool pass = false;
  std::size_t lags = 0;
  double band = 0.0;
};

inline WhiteNoiseResult white_noise_check(const std::vector<double>& residuals,
                                          std::size_t max_lag) {
  if (residuals.size() < 30) fail(ErrorCode::TooShort, "need at least 30 residuals");
  const Correlogram cg = correlogram(residuals, max_lag);
  std::size_t inside = 0;
  for (double r : cg.acf)
    if (std::abs(r) <= cg.band) ++inside;
  WhiteNoiseResult out;
  out.lags = max_lag;
  out.band = cg.band;
  out.fraction_within_bands = static_cast<double>(inside) / static_cast<double>(max_lag);
  out.pass = out.fraction_within_bands >= 0.90;
  return out;
}

}  // namespace soibart
