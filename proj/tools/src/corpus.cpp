#include "stochcat/tools/corpus.hpp"

#include <cmath>
#include <numbers>

#include "stochcat/builders.hpp"
#include "stochcat/special.hpp"

namespace stochcat::tools {
namespace {

const SampleSpace kUnit{1, BaseMeasure::Uniform01};

Mat mat(std::initializer_list<std::initializer_list<double>> rows) {
  Mat m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

Vec vec(std::initializer_list<double> values) {
  Vec v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

double u0(OmegaView omega, std::size_t block) { return omega.block(block)[0]; }

/// x + Exp(rate) through -log(1 - u) / rate.
ParaArrow exponential_shift(double rate) {
  return {kUnit, 1, 1, 1, [rate](OmegaView w, const VecRef& x) -> Vec {
            return Vec::Constant(1, x[0] - std::log1p(-u0(w, 0)) / rate);
          }};
}

/// x * exp(sigma Phi^-1(u)).
ParaArrow lognormal_scale(double sigma) {
  return {kUnit, 1, 1, 1, [sigma](OmegaView w, const VecRef& x) -> Vec {
            return Vec::Constant(1, x[0] * std::exp(sigma * normal_quantile(u0(w, 0))));
          }};
}

/// x + scale * logistic noise log(u / (1 - u)).
ParaArrow logistic_shift(double scale) {
  return {kUnit, 1, 1, 1, [scale](OmegaView w, const VecRef& x) -> Vec {
            const double u = u0(w, 0);
            return Vec::Constant(1, x[0] + scale * std::log(u / (1.0 - u)));
          }};
}

/// x + scale * tan(pi (u - 1/2)) (Cauchy).
ParaArrow cauchy_shift(double scale) {
  return {kUnit, 1, 1, 1, [scale](OmegaView w, const VecRef& x) -> Vec {
            return Vec::Constant(1, x[0] + scale * std::tan(std::numbers::pi * (u0(w, 0) - 0.5)));
          }};
}

/// x * u.
ParaArrow uniform_scale() {
  return {kUnit, 1, 1, 1, [](OmegaView w, const VecRef& x) -> Vec { return Vec::Constant(1, x[0] * u0(w, 0)); }};
}

/// (x0 + Phi^-1(u0), x0 * x1 + Exp(1)(u1)): two blocks, nonlinear in x.
ParaArrow mixed_2d() {
  return {kUnit, 2, 2, 2, [](OmegaView w, const VecRef& x) -> Vec {
            return vec({x[0] + normal_quantile(u0(w, 0)), x[0] * x[1] - std::log1p(-u0(w, 1))});
          }};
}

Vec random_vector(int n, const SampleStream& s, std::uint64_t& k, double scale) {
  Vec v(n);
  for (auto& e : v) e = scale * s.normal(k++);
  return v;
}

}  // namespace

std::vector<ParaPair> push_corpus() {
  const Mat I2 = Mat::Identity(2, 2);
  std::vector<ParaPair> out;
  out.push_back({"demo_self", demo_arrow(kUnit), demo_arrow(kUnit), vec({42.0})});
  out.push_back({"noise_then_affine_2d", normal_noise(kUnit, I2, vec({1.0, -1.0}), mat({{1.0, 0.0}, {0.6, 0.8}})),
                 affine_map(kUnit, mat({{2.0, 1.0}, {0.0, -1.0}}), vec({0.5, 0.0})), vec({0.3, -0.7})});
  out.push_back({"affine_then_noise_2d", affine_map(kUnit, mat({{1.0, -1.0}, {1.0, 1.0}}), vec({0.0, 2.0})),
                 normal_noise(kUnit, I2, Vec::Zero(2), mat({{2.0, 0.0}, {-1.0, 0.5}})), vec({1.0, 2.0})});
  out.push_back({"noise_project_noise",
                 normal_noise(kUnit, mat({{1.0}, {2.0}}), vec({0.0, 1.0}), mat({{1.0, 0.0}, {0.9, 0.3}})),
                 normal_noise(kUnit, mat({{1.0, 1.0}}), vec({-3.0}), mat({{0.5}})), vec({0.4})});
  out.push_back({"exponential_then_normal", exponential_shift(2.0),
                 normal_noise(kUnit, mat({{2.0}}), vec({1.0}), mat({{0.25}})), vec({0.0})});
  out.push_back({"lognormal_then_exponential", lognormal_scale(0.5), exponential_shift(1.0), vec({3.0})});
  out.push_back({"logistic_then_cauchy", logistic_shift(1.5), cauchy_shift(0.2), vec({-1.0})});
  out.push_back({"exponential_then_uniform_scale", exponential_shift(0.5), uniform_scale(), vec({1.0})});
  out.push_back({"tensor_then_mix",
                 tensor(normal_noise(kUnit, mat({{1.0}}), vec({0.0}), mat({{1.0}})), exponential_shift(1.0)),
                 normal_noise(kUnit, mat({{1.0, 1.0}, {1.0, -1.0}}), Vec::Zero(2), mat({{0.3, 0.0}, {0.0, 0.3}})),
                 vec({0.5, -0.5})});
  out.push_back({"mixed_2d_then_mixed_2d", mixed_2d(), mixed_2d(), vec({0.5, 1.5})});
  out.push_back({"constant_then_noise", constant(kUnit, 1, vec({7.0})), logistic_shift(2.0), vec({-4.0})});
  out.push_back({"normal_then_lognormal", normal_noise(kUnit, mat({{0.5}}), vec({2.0}), mat({{0.5}})),
                 lognormal_scale(0.3), vec({1.0})});
  return out;
}

DFArrow chain_of(const std::vector<GaussianArrow>& layers) {
  DFArrow acc = as_df_arrow(layers.front());
  for (std::size_t i = 1; i < layers.size(); ++i) acc = df_compose(acc, as_df_arrow(layers[i]));
  return acc;
}

std::vector<GaussianChain> gaussian_chain_corpus(const SampleStream& stream) {
  const SampleSpace unit = kUnit;
  const SampleSpace normal2{2, BaseMeasure::StdNormal};
  std::vector<std::pair<std::string, std::vector<GaussianArrow>>> descs;
  descs.push_back({"linreg_linreg", {linear_regression(unit), linear_regression(unit)}});
  descs.push_back({"dense_1_2_dense_2_1", {dense_gaussian(unit, 1, 2, 0.7), dense_gaussian(unit, 2, 1, 0.4)}});
  descs.push_back({"dense_2_2_dense_2_2", {dense_gaussian(unit, 2, 2, 0.5), dense_gaussian(unit, 2, 2, 1.0)}});
  descs.push_back({"dense_2_3_dense_3_2", {dense_gaussian(normal2, 2, 3, 0.3), dense_gaussian(normal2, 3, 2, 0.6)}});
  descs.push_back({"affine_corr_dense",
                   {affine_gaussian(unit, mat({{1.0, 0.5}, {-0.5, 1.0}}), vec({1.0, 0.0}), mat({{1.0, 0.8}, {0.8, 1.0}})),
                    dense_gaussian(unit, 2, 2, 0.2)}});
  descs.push_back({"linreg_linreg_linreg", {linear_regression(unit), linear_regression(unit), linear_regression(unit)}});
  descs.push_back({"dense_l1_scaled", {dense_gaussian(unit, 1, 1, 1.0), l1_scaled(unit, 2, 1, 0.5)}});
  descs.push_back({"l1_scaled_dense", {l1_scaled(normal2, 3, 2, 0.4), dense_gaussian(normal2, 2, 1, 0.3)}});
  descs.push_back({"identity_dense_identity",
                   {identity_gaussian(unit, 2), dense_gaussian(unit, 2, 2, 0.8), identity_gaussian(unit, 2)}});
  descs.push_back({"dense_noiseless_dense", {dense_gaussian(unit, 2, 2, 0.0), dense_gaussian(unit, 2, 1, 0.9)}});
  descs.push_back({"affine_singular_linreg",
                   {affine_gaussian(unit, mat({{1.0}}), vec({0.5}), mat({{0.0}})), linear_regression(unit)}});

  std::vector<GaussianChain> out;
  for (std::size_t i = 0; i < descs.size(); ++i) {
    const SampleStream s = stream.split(i);
    std::uint64_t k = 0;
    DFArrow arrow = chain_of(descs[i].second);
    Vec params = random_vector(arrow.param_dim(), s, k, 0.8);
    Vec x = random_vector(arrow.in_dim(), s, k, 1.0);
    out.push_back({descs[i].first, std::move(arrow), std::move(params), std::move(x)});
  }
  return out;
}

Dataset synthetic_regression(std::size_t n, double slope, double intercept, double sd, const SampleStream& stream) {
  Mat inputs(static_cast<Eigen::Index>(n), 1), targets(static_cast<Eigen::Index>(n), 1);
  for (std::size_t i = 0; i < n; ++i) {
    const SampleStream row = stream.split(i);
    const double x = row.normal(0);
    inputs(static_cast<Eigen::Index>(i), 0) = x;
    targets(static_cast<Eigen::Index>(i), 0) = slope * x + intercept + sd * row.normal(1);
  }
  return {std::move(inputs), std::move(targets)};
}

}  // namespace stochcat::tools
