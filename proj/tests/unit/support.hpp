#pragma once

#include <cmath>
#include <cstdint>

#include "stochcat/sample_space.hpp"
#include "stochcat/types.hpp"

namespace stochcat::testkit {

/// Sequential draws from a counter-based stream, for hand-rolled generators.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : stream_(seed) {}
  explicit Gen(SampleStream s) : stream_(s) {}

  double normal(double scale = 1.0) { return scale * stream_.normal(k_++); }
  double uniform(double lo = 0.0, double hi = 1.0) { return lo + (hi - lo) * stream_.uniform(k_++); }
  int integer(int lo, int hi) { return lo + static_cast<int>(stream_.uniform(k_++) * (hi - lo + 1)); }

  Vec vec(Eigen::Index n, double scale = 1.0) {
    Vec v(n);
    for (auto& e : v) e = normal(scale);
    return v;
  }
  Mat mat(Eigen::Index r, Eigen::Index c, double scale = 1.0) {
    Mat m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) m(i, j) = normal(scale);
    return m;
  }
  /// Symmetric positive definite with eigenvalues bounded below by `floor`.
  Mat spd(Eigen::Index n, double floor = 0.1) {
    const Mat a = mat(n, n);
    return a * a.transpose() + floor * Mat::Identity(n, n);
  }
  /// Uniform01 omega point with n blocks of length k.
  OmegaVector omega(int k, std::size_t n) {
    std::vector<double> flat(static_cast<std::size_t>(k) * n);
    for (auto& v : flat) v = uniform();
    return {k, std::move(flat)};
  }
  SampleStream fork() { return stream_.split(1000000 + k_++); }

 private:
  SampleStream stream_;
  std::uint64_t k_ = 0;
};

inline double max_rel(const Vec& a, const Vec& b) {
  if (a.size() == 0) return 0.0;
  return ((a - b).array().abs() / a.array().abs().max(b.array().abs()).max(1.0)).maxCoeff();
}

inline double max_rel(const Mat& a, const Mat& b) {
  if (a.size() == 0) return 0.0;
  return ((a - b).array().abs() / a.array().abs().max(b.array().abs()).max(1.0)).maxCoeff();
}

}  // namespace stochcat::testkit
