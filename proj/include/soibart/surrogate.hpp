#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "soibart/month.hpp"
#include "soibart/rng.hpp"
#include "soibart/stats.hpp"
#include "soibart/time_series.hpp"

namespace soibart {

// Parameters of the synthetic pressure-index generator. The process mixes a
// coherent multi-year stochastic cycle, a threshold-asymmetric persistent
// state (negative excursions linger longer than positive ones, with
// persistence peaking in austral spring), and observation noise. It is a
// stand-in with SOI-like dependence structure for offline testing, not a
// reconstruction of the measured index.
struct SurrogateParams {
  double cycle_period = 62.0;   // months per quasi-cycle
  double cycle_rho = 0.975;     // pole radius; closer to 1 = more coherent
  double phi_pos = 0.42;        // state persistence above zero
  double phi_neg = 0.78;        // state persistence below zero
  double phi_lag2 = 0.08;
  double seasonal_amp = 0.22;   // persistence modulation amplitude
  int seasonal_peak_month = 9;  // calendar month of peak persistence
  double cycle_weight = 0.95;
  double state_weight = 1.00;
  double noise_weight = 0.85;
  double target_sd = 10.8;      // emitted scale, index units
  int burn_in_months = 600;
};

// Deterministic given (start, n, seed, params). Values are centered, scaled
// to target_sd and rounded to one decimal like the archive files.
inline TimeSeries generate_surrogate(MonthStamp start, std::size_t n, std::uint64_t seed,
                                     const SurrogateParams& params = {}) {
  Rng rng(seed);
  const double omega = 2.0 * std::numbers::pi / params.cycle_period;
  const double a1 = 2.0 * params.cycle_rho * std::cos(omega);
  const double a2 = -params.cycle_rho * params.cycle_rho;

  double c1 = 0.0, c2 = 0.0;     // cycle state
  double z1 = 0.0, z2 = 0.0;     // threshold state
  std::vector<double> raw;
  raw.reserve(n);

  const long first_month_index = start.month - 1;
  const long total = static_cast<long>(n) + params.burn_in_months;
  for (long t = 0; t < total; ++t) {
    const double c = a1 * c1 + a2 * c2 + rng.normal();
    c2 = c1;
    c1 = c;

    const int month = static_cast<int>(
        ((first_month_index + t - params.burn_in_months) % 12 + 12) % 12 + 1);
    const double season =
        1.0 + params.seasonal_amp *
                  std::cos(2.0 * std::numbers::pi * (month - params.seasonal_peak_month) / 12.0);
    const double phi = (z1 < 0.0 ? params.phi_neg : params.phi_pos) * season;
    const double z = phi * z1 + params.phi_lag2 * z2 + rng.normal();
    z2 = z1;
    z1 = z;

    if (t < params.burn_in_months) continue;
    raw.push_back(params.cycle_weight * c + params.state_weight * z +
                  params.noise_weight * rng.normal());
  }

  const double mean = mean_of(raw);
  const double sd = sd_of(raw);
  const double scale = sd > 0.0 ? params.target_sd / sd : 1.0;
  std::vector<double> values;
  values.reserve(n);
  for (double v : raw) values.push_back(std::round((v - mean) * scale * 10.0) / 10.0);
  return TimeSeries(start, std::move(values));
}

// Year-per-row layout matching the archive plain-text format; the final year
// may be partial.
inline std::string surrogate_to_plaintext(const TimeSeries& series) {
  if (series.start().month != 1)
    fail(ErrorCode::InvalidConfig, "plaintext layout needs a January-anchored series");
  std::string out =
      "Synthetic pressure-index series (offline test fixture)\n"
      "Year Jan Feb Mar Apr May Jun Jul Aug Sep Oct Nov Dec\n";
  char buf[32];
  for (std::size_t i = 0; i < series.size(); ++i) {
    const MonthStamp s = series.stamp_at(i);
    if (s.month == 1 || i == 0) {
      if (i != 0) out += '\n';
      std::snprintf(buf, sizeof(buf), "%04d", s.year);
      out += buf;
    }
    std::snprintf(buf, sizeof(buf), " %.1f", series[i]);
    out += buf;
  }
  out += '\n';
  return out;
}

}  // namespace soibart
