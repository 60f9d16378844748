#include "stochcat/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <nlohmann/json.hpp>

#include "stochcat/builders.hpp"
#include "stochcat/errors.hpp"
#include "stochcat/special.hpp"

namespace stochcat {
namespace {

std::vector<double> sorted(const VecRef& v) {
  std::vector<double> out(v.data(), v.data() + v.size());
  std::sort(out.begin(), out.end());
  return out;
}

double pairwise_sum_range(const double* data, Eigen::Index n) {
  if (n <= 8) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += data[i];
    return s;
  }
  const Eigen::Index half = n / 2;
  return pairwise_sum_range(data, half) + pairwise_sum_range(data + half, n - half);
}

}  // namespace

double pairwise_sum(const VecRef& values) { return pairwise_sum_range(values.data(), values.size()); }

double ks_two_sample(const VecRef& a, const VecRef& b) {
  if (a.size() == 0 || b.size() == 0) throw DimensionError("ks_two_sample: empty sample");
  const auto xa = sorted(a), xb = sorted(b);
  const double na = static_cast<double>(xa.size()), nb = static_cast<double>(xb.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < xa.size() && j < xb.size()) {
    const double x = std::min(xa[i], xb[j]);
    while (i < xa.size() && xa[i] == x) ++i;
    while (j < xb.size() && xb[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_vs_normal(const VecRef& samples, double mean, double sd) {
  if (samples.size() == 0) throw DimensionError("ks_vs_normal: empty sample");
  const double n = static_cast<double>(samples.size());
  if (sd <= 0.0) {
    // Point mass at `mean`: the sup is attained just below or at the atom.
    const auto below = (samples.array() < mean).count();
    const auto above = (samples.array() > mean).count();
    return std::max(static_cast<double>(below), static_cast<double>(above)) / n;
  }
  const auto x = sorted(samples);
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double F = normal_cdf((x[i] - mean) / sd);
    d = std::max({d, std::abs(F - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - F)});
  }
  return d;
}

double ks_vs_fitted_normal(const VecRef& samples) {
  const MomentSummary m = summarize(samples);
  return ks_vs_normal(samples, m.mean, m.sd);
}

MomentSummary summarize(const VecRef& samples) {
  MomentSummary out;
  out.count = static_cast<std::size_t>(samples.size());
  if (samples.size() == 0) return out;
  out.mean = pairwise_sum(samples) / static_cast<double>(samples.size());
  if (samples.size() > 1) {
    const Vec centered = (samples.array() - out.mean).square().matrix();
    out.variance = pairwise_sum(centered) / static_cast<double>(samples.size() - 1);
  }
  out.sd = std::sqrt(out.variance);
  return out;
}

Vec sample_mean(const MatRef& draws) {
  Vec m(draws.cols());
  for (Eigen::Index c = 0; c < draws.cols(); ++c) m[c] = pairwise_sum(draws.col(c)) / static_cast<double>(draws.rows());
  return m;
}

Mat sample_cov(const MatRef& draws) {
  const Eigen::Index n = draws.rows();
  if (n < 2) return Mat::Zero(draws.cols(), draws.cols());
  const Mat centered = draws.rowwise() - sample_mean(draws).transpose();
  return (centered.transpose() * centered) / static_cast<double>(n - 1);
}

Mat correlation(const Mat& cov) {
  const Eigen::Index d = cov.rows();
  Mat corr = Mat::Identity(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      if (i == j) continue;
      const double denom = std::sqrt(cov(i, i) * cov(j, j));
      corr(i, j) = denom > 0.0 ? cov(i, j) / denom : 0.0;
    }
  return corr;
}

double variance_standard_error(double variance, std::size_t n) {
  return n < 2 ? std::numeric_limits<double>::infinity() : variance * std::sqrt(2.0 / static_cast<double>(n - 1));
}

double DistributionDistanceReport::max_ks() const { return ks.size() == 0 ? 0.0 : ks.maxCoeff(); }

double DistributionDistanceReport::max_mean_z() const {
  double z = 0.0;
  for (Eigen::Index i = 0; i < mean_a.size(); ++i) {
    const double diff = std::abs(mean_a[i] - mean_b[i]);
    if (diff == 0.0) continue;
    z = std::max(z, mean_se[i] > 0.0 ? diff / mean_se[i] : std::numeric_limits<double>::infinity());
  }
  return z;
}

double DistributionDistanceReport::max_abs_corr_diff() const {
  return corr_a.size() == 0 ? 0.0 : (corr_a - corr_b).cwiseAbs().maxCoeff();
}

double DistributionDistanceReport::max_variance_z() const {
  double z = 0.0;
  for (Eigen::Index i = 0; i < cov_a.rows(); ++i) {
    const double va = cov_a(i, i), vb = cov_b(i, i);
    const double diff = std::abs(va - vb);
    if (diff == 0.0) continue;
    const double se = std::hypot(variance_standard_error(va, n_a), variance_standard_error(vb, n_b));
    z = std::max(z, se > 0.0 ? diff / se : std::numeric_limits<double>::infinity());
  }
  return z;
}

double DistributionDistanceReport::variance_ratio(Eigen::Index coord) const {
  return cov_a(coord, coord) / cov_b(coord, coord);
}

DistributionDistanceReport compare_samples(const MatRef& a, const MatRef& b) {
  if (a.cols() != b.cols()) throw DimensionError("compare_samples: coordinate counts differ");
  DistributionDistanceReport r;
  r.n_a = static_cast<std::size_t>(a.rows());
  r.n_b = static_cast<std::size_t>(b.rows());
  r.ks.resize(a.cols());
  for (Eigen::Index c = 0; c < a.cols(); ++c) r.ks[c] = ks_two_sample(a.col(c), b.col(c));
  r.mean_a = sample_mean(a);
  r.mean_b = sample_mean(b);
  r.cov_a = sample_cov(a);
  r.cov_b = sample_cov(b);
  r.corr_a = correlation(r.cov_a);
  r.corr_b = correlation(r.cov_b);
  r.mean_se.resize(a.cols());
  for (Eigen::Index c = 0; c < a.cols(); ++c)
    r.mean_se[c] = std::sqrt(r.cov_a(c, c) / static_cast<double>(r.n_a) + r.cov_b(c, c) / static_cast<double>(r.n_b));
  return r;
}

void to_json(nlohmann::json& j, const DistributionDistanceReport& r) {
  j = nlohmann::json{{"n_a", r.n_a},
                     {"n_b", r.n_b},
                     {"ks", to_json(r.ks)},
                     {"max_ks", r.max_ks()},
                     {"mean_a", to_json(r.mean_a)},
                     {"mean_b", to_json(r.mean_b)},
                     {"mean_se", to_json(r.mean_se)},
                     {"cov_a", to_json(r.cov_a)},
                     {"cov_b", to_json(r.cov_b)},
                     {"max_mean_z", r.max_mean_z()},
                     {"max_variance_z", r.max_variance_z()},
                     {"max_abs_corr_diff", r.max_abs_corr_diff()}};
}

}  // namespace stochcat
