#pragma once

#include <cstddef>

#include <nlohmann/json_fwd.hpp>

#include "stochcat/types.hpp"

namespace stochcat {

/// Two-sample Kolmogorov-Smirnov statistic sup_x |F_a(x) - F_b(x)|.
double ks_two_sample(const VecRef& a, const VecRef& b);

/// One-sample KS statistic against N(mean, sd^2). sd == 0 compares against
/// the point mass at `mean`.
double ks_vs_normal(const VecRef& samples, double mean, double sd);

/// KS against the normal with the sample's own mean and standard deviation.
double ks_vs_fitted_normal(const VecRef& samples);

struct MomentSummary {
  double mean = 0.0;
  double variance = 0.0;  ///< unbiased
  double sd = 0.0;
  std::size_t count = 0;
};

MomentSummary summarize(const VecRef& samples);

/// Column means of a draws-by-coordinates sample matrix.
Vec sample_mean(const MatRef& draws);
/// Unbiased sample covariance of a draws-by-coordinates sample matrix.
Mat sample_cov(const MatRef& draws);
/// Correlation matrix; entries involving a zero-variance coordinate are 0
/// (1 on the diagonal).
Mat correlation(const Mat& cov);

/// Standard error of a sample variance under normality.
double variance_standard_error(double variance, std::size_t n);

/// Sum with pairwise reduction, deterministic for a fixed input order.
double pairwise_sum(const VecRef& values);

/// Numerical comparison of two sample sets drawn per coordinate. Stands in
/// for equality of measures: per-coordinate KS plus mean/covariance agreement.
struct DistributionDistanceReport {
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  Vec ks;       ///< per-coordinate two-sample KS statistic
  Vec mean_a;
  Vec mean_b;
  Vec mean_se;  ///< sqrt(var_a/n_a + var_b/n_b)
  Mat cov_a;
  Mat cov_b;
  Mat corr_a;
  Mat corr_b;

  [[nodiscard]] double max_ks() const;
  /// Largest |mean_a - mean_b| / mean_se; 0/0 counts as 0.
  [[nodiscard]] double max_mean_z() const;
  [[nodiscard]] double max_abs_corr_diff() const;
  /// Largest |var_a - var_b| over its standard error.
  [[nodiscard]] double max_variance_z() const;
  [[nodiscard]] double variance_ratio(Eigen::Index coord) const;  ///< var_a / var_b
};

/// Compare two draws-by-coordinates sample matrices with equal column counts.
DistributionDistanceReport compare_samples(const MatRef& a, const MatRef& b);

void to_json(nlohmann::json& j, const DistributionDistanceReport& report);

}  // namespace stochcat
