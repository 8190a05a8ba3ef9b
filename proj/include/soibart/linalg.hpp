#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "soibart/errors.hpp"
#include "soibart/stats.hpp"

namespace soibart::detail {

struct OlsFit {
  double intercept = 0.0;
  std::vector<double> coefficients;
  double residual_sd = 0.0;  // dof-adjusted by n - p - 1
  bool full_rank = true;
};

// Ordinary least squares with intercept via column-pivoted QR.
inline OlsFit ols(const std::vector<std::vector<double>>& rows, const std::vector<double>& y) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto p = static_cast<Eigen::Index>(rows.empty() ? 0 : rows.front().size());
  Eigen::MatrixXd design(n, p + 1);
  Eigen::VectorXd target(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    for (Eigen::Index j = 0; j < p; ++j)
      design(i, j + 1) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    target(i) = y[static_cast<std::size_t>(i)];
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  OlsFit fit;
  fit.full_rank = (qr.rank() == p + 1);
  // Minimum-norm solution when columns are collinear; identical to the QR
  // solution in the full-rank case.
  const Eigen::VectorXd beta =
      fit.full_rank ? Eigen::VectorXd(qr.solve(target))
                    : Eigen::VectorXd(design.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV)
                                          .solve(target));
  fit.intercept = beta(0);
  fit.coefficients.resize(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) fit.coefficients[static_cast<std::size_t>(j)] = beta(j + 1);

  const Eigen::VectorXd resid = target - design * beta;
  const double dof = static_cast<double>(n - p - 1);
  fit.residual_sd = dof > 0.0 ? std::sqrt(resid.squaredNorm() / dof) : 0.0;
  return fit;
}

inline double ols_residual_sd(const std::vector<std::vector<double>>& rows,
                              const std::vector<double>& y) {
  const std::size_t p = rows.empty() ? 0 : rows.front().size();
  if (rows.size() <= p + 1) return sd_of(y);
  const OlsFit fit = ols(rows, y);
  if (!fit.full_rank || !(fit.residual_sd > 0.0) || !std::isfinite(fit.residual_sd)) return sd_of(y);
  return fit.residual_sd;
}

}  // namespace soibart::detail
