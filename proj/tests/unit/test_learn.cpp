#include <gtest/gtest.h>

#include <cmath>

#include "stochcat/builders.hpp"
#include "stochcat/errors.hpp"
#include "stochcat/gaussian.hpp"
#include "stochcat/learn.hpp"
#include "stochcat/stats.hpp"
#include "support.hpp"

using namespace stochcat;
using testkit::Gen;
using testkit::max_rel;

namespace {

const SampleSpace kUnit{1, BaseMeasure::Uniform01};

Vec v1(double x) { return Vec::Constant(1, x); }
Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }
Vec v3(double a, double b, double c) { return (Vec(3) << a, b, c).finished(); }

// m(w, a) = w * a with its analytic Jacobians.
ParametricMap scale_map() {
  return {1, 1, 1, [](const VecRef& p, const VecRef& a) { return Vec(p[0] * a); },
          [](const VecRef& p, const VecRef& a) {
            return Jacobians{Mat::Constant(1, 1, a[0]), Mat::Constant(1, 1, p[0])};
          }};
}

// A smooth nonlinear map R^2 x R^2 -> R^2 without declared Jacobians.
ParametricMap tanh_map() {
  return {2, 2, 2, [](const VecRef& p, const VecRef& a) {
            Vec out(2);
            out << std::tanh(p[0] * a[0] + a[1]), p[1] * std::sin(a[0]) + a[1] * a[1];
            return out;
          }};
}

DFArrow two_layer_chain() {
  return df_compose(as_df_arrow(dense_gaussian(kUnit, 2, 3, 0.3)), as_df_arrow(dense_gaussian(kUnit, 3, 1, 0.2)));
}

void expect_learners_agree(const Learner& a, const Learner& b, Gen& g, double tol) {
  ASSERT_EQ(a.param_dim, b.param_dim);
  for (int t = 0; t < 20; ++t) {
    const Vec p = g.vec(a.param_dim, 0.8), x = g.vec(a.in_dim), y = g.vec(a.out_dim);
    EXPECT_LE(max_rel(a.implement(p, x), b.implement(p, x)), tol);
    EXPECT_LE(max_rel(a.update(p, x, y), b.update(p, x, y)), tol);
    EXPECT_LE(max_rel(a.request(p, x, y), b.request(p, x, y)), tol);
  }
}

Dataset line_data(int n, double slope, double intercept, double noise_sd, std::uint64_t seed) {
  Gen g(seed);
  Mat x = g.mat(n, 1);
  Mat y = (slope * x.array() + intercept).matrix() + g.mat(n, 1, noise_sd);
  return {x, y};
}

Learner regression_learner(const LearnConfig& cfg) {
  return backprop_functor(exp_functor(as_df_arrow(linear_regression(kUnit))), cfg, v3(0.0, 0.0, 0.5));
}

}  // namespace

TEST(ExpFunctor, RegressionMean) {
  const ParametricMap m = exp_functor(as_df_arrow(linear_regression(kUnit)));
  EXPECT_EQ(m.mode(), GradientMode::AnalyticAffine);
  Gen g(1);
  for (int t = 0; t < 50; ++t) {
    const Vec p = g.vec(3), x = g.vec(1);
    EXPECT_NEAR(m(p, x)[0], p[0] * x[0] + p[1], 1e-14 * std::max(1.0, std::abs(p[0] * x[0] + p[1])));
    const Jacobians j = m.jacobians(p, x);
    EXPECT_EQ(j.wrt_params, (Mat(1, 3) << x[0], 1.0, 0.0).finished());
    EXPECT_EQ(j.wrt_input, Mat::Constant(1, 1, p[0]));
  }
}

TEST(ExpFunctor, IdentityGoesToIdentity) {
  const ParametricMap m = exp_functor(DFArrow::identity(kUnit, 3));
  Gen g(2);
  const Vec x = g.vec(3);
  EXPECT_EQ(m(Vec(), x), x);
  const ParametricMap id = identity_parametric(3);
  EXPECT_EQ(id(Vec(), x), x);
  EXPECT_EQ(id.jacobians(Vec(), x).wrt_input, Mat::Identity(3, 3));
}

TEST(ExpFunctor, PreservesCompositionAnalytically) {
  Gen g(3);
  const DFArrow f1 = as_df_arrow(dense_gaussian(kUnit, 2, 3, 0.3));
  const DFArrow f2 = as_df_arrow(dense_gaussian(kUnit, 3, 2, 0.5));
  const ParametricMap whole = exp_functor(df_compose(f1, f2));
  const ParametricMap parts = compose_parametric(exp_functor(f1), exp_functor(f2));
  ASSERT_EQ(whole.param_dim(), parts.param_dim());
  for (int t = 0; t < 100; ++t) {
    const Vec p = g.vec(whole.param_dim()), x = g.vec(2);
    EXPECT_LE(max_rel(whole(p, x), parts(p, x)), 1e-9);
    EXPECT_LE(max_rel(whole.jacobians(p, x).wrt_params, parts.jacobians(p, x).wrt_params), 1e-9);
    EXPECT_LE(max_rel(whole.jacobians(p, x).wrt_input, parts.jacobians(p, x).wrt_input), 1e-9);
  }
}

TEST(ExpFunctor, MonteCarloMeanOfGenericArrow) {
  // Affine noise arrows behind an opaque evaluator: the Monte Carlo
  // expectation of the composite matches the composite of expectations
  // within three standard errors of the frozen sample mean.
  const Mat A1 = (Mat(2, 1) << 1.5, -0.5).finished(), L1 = (Mat(2, 2) << 1.0, 0.0, 0.5, 2.0).finished();
  const Mat A2 = (Mat(1, 2) << 0.7, 1.2).finished(), L2 = Mat::Constant(1, 1, 0.8);
  const DFArrow f1 = promote(normal_noise(kUnit, A1, Vec::Constant(2, 0.3), L1).opaque());
  const DFArrow f2 = promote(normal_noise(kUnit, A2, Vec::Constant(1, -1.0), L2).opaque());
  ASSERT_EQ(f1.tag(), StructureTag::Generic);
  const SampleStream s(77);
  const ParametricMap whole = exp_functor(df_compose(f1, f2), kDefaultMcSamples, s.split(0));
  const ParametricMap parts = compose_parametric(exp_functor(f1, kDefaultMcSamples, s.split(1)),
                                                 exp_functor(f2, kDefaultMcSamples, s.split(2)));
  EXPECT_EQ(whole.mode(), GradientMode::FiniteDifference);
  const Mat cov_whole = A2 * L1 * L1.transpose() * A2.transpose() + L2 * L2.transpose();
  // Difference of two independent means: the composite's own noise plus
  // the pieces' noise propagated through A2.
  const double se = std::sqrt((cov_whole(0, 0) + cov_whole(0, 0)) / static_cast<double>(kDefaultMcSamples));
  for (double x : {-2.0, 0.0, 1.0, 3.0}) {
    const double exact = (A2 * (A1 * x + Vec::Constant(2, 0.3)))(0) - 1.0;
    EXPECT_LE(std::abs(whole(Vec(), v1(x))[0] - parts(Vec(), v1(x))[0]), 3.0 * se);
    EXPECT_LE(std::abs(whole(Vec(), v1(x))[0] - exact), 3.0 * std::sqrt(cov_whole(0, 0) / kDefaultMcSamples));
  }
  // A frozen omega set makes the estimate a deterministic function.
  EXPECT_EQ(whole(Vec(), v1(0.5)), whole(Vec(), v1(0.5)));
}

TEST(ExpFunctor, GradientCheckOnChains) {
  const SampleStream s(5);
  EXPECT_LT(gradient_check(exp_functor(two_layer_chain()), 50, s.split(0)), 1e-6);
  EXPECT_LT(gradient_check(exp_functor(as_df_arrow(linear_regression(kUnit))), 50, s.split(1)), 1e-6);
}

TEST(Backprop, HandWorkedStep) {
  // m = w a + c at w = 2, c = 1, a = 1, target 5, step 0.05.
  const ParametricMap m(2, 1, 1, [](const VecRef& p, const VecRef& a) { return Vec(p[0] * a.array() + p[1]); },
                        [](const VecRef& p, const VecRef& a) {
                          return Jacobians{(Mat(1, 2) << a[0], 1.0).finished(), Mat::Constant(1, 1, p[0])};
                        });
  const Learner l = backprop_functor(m, {0.05, 1}, v2(2.0, 1.0));
  EXPECT_EQ(l.params, v2(2.0, 1.0));
  EXPECT_NEAR(l.implement(l.params, v1(1.0))[0], 3.0, 1e-15);
  const Vec up = l.update(l.params, v1(1.0), v1(5.0));
  EXPECT_NEAR(up[0], 2.2, 1e-14);
  EXPECT_NEAR(up[1], 1.2, 1e-14);
  EXPECT_NEAR(l.request(l.params, v1(1.0), v1(5.0))[0], 5.0, 1e-14);
  EXPECT_NEAR(total_error(m, l.params, v1(1.0), v1(5.0)), 4.0, 1e-15);
}

TEST(Backprop, ZeroErrorIsAFixedPoint) {
  Gen g(6);
  const ParametricMap m = exp_functor(two_layer_chain());
  const Learner l = backprop_functor(m, {0.1, 1});
  EXPECT_EQ(l.params, Vec::Zero(m.param_dim()));
  for (int t = 0; t < 10; ++t) {
    const Vec p = g.vec(m.param_dim()), x = g.vec(2);
    const Vec y = m(p, x);
    EXPECT_EQ(l.update(p, x, y), p);
    EXPECT_EQ(l.request(p, x, y), x);
  }
}

TEST(Backprop, FiniteDifferenceMatchesAnalytic) {
  Gen g(7);
  const ParametricMap m = exp_functor(two_layer_chain());
  const Learner exact = backprop_functor(m, {0.05, 1});
  const Learner approx = backprop_functor(m.without_jacobians(), {0.05, 1});
  EXPECT_EQ(m.without_jacobians().mode(), GradientMode::FiniteDifference);
  expect_learners_agree(exact, approx, g, 1e-6);
}

TEST(Backprop, FunctorLawAnalytic) {
  Gen g(8);
  const LearnConfig cfg{0.05, 1};
  const ParametricMap f = exp_functor(as_df_arrow(dense_gaussian(kUnit, 2, 3, 0.1)));
  const ParametricMap h = exp_functor(as_df_arrow(dense_gaussian(kUnit, 3, 2, 0.1)));
  expect_learners_agree(backprop_functor(compose_parametric(f, h), cfg),
                        compose_learners(backprop_functor(f, cfg), backprop_functor(h, cfg)), g, 1e-9);
}

TEST(Backprop, FunctorLawFiniteDifference) {
  Gen g(9);
  const LearnConfig cfg{0.05, 1};
  const ParametricMap f = tanh_map(), h = tanh_map();
  expect_learners_agree(backprop_functor(compose_parametric(f, h), cfg),
                        compose_learners(backprop_functor(f, cfg), backprop_functor(h, cfg)), g, 1e-5);
}

TEST(Backprop, UnitLaw) {
  Gen g(10);
  const LearnConfig cfg{0.05, 1};
  const Learner l = backprop_functor(tanh_map(), cfg);
  expect_learners_agree(compose_learners(trivial_learner(2), l), l, g, 0.0);
  expect_learners_agree(compose_learners(l, trivial_learner(2)), l, g, 0.0);
  expect_learners_agree(backprop_functor(identity_parametric(2), cfg), trivial_learner(2), g, 1e-14);
}

TEST(Backprop, TwoLayerHandExample) {
  // m1 = p1 a, m2 = p2 b, p1 = 2, p2 = 3, a = 1, target 4, step 0.1.
  const LearnConfig cfg{0.1, 1};
  const Learner l = compose_learners(backprop_functor(scale_map(), cfg, v1(2.0)), backprop_functor(scale_map(), cfg, v1(3.0)));
  EXPECT_EQ(l.params, v2(3.0, 2.0));
  EXPECT_NEAR(l.implement(l.params, v1(1.0))[0], 6.0, 1e-15);
  const Vec up = l.update(l.params, v1(1.0), v1(4.0));
  EXPECT_NEAR(up[0], 2.2, 1e-14);
  EXPECT_NEAR(up[1], 0.8, 1e-14);
  EXPECT_NEAR(l.request(l.params, v1(1.0), v1(4.0))[0], -11.0, 1e-14);
}

TEST(Backprop, MismatchedCompositionThrows) {
  const LearnConfig cfg{0.05, 1};
  EXPECT_THROW(compose_learners(backprop_functor(tanh_map(), cfg), backprop_functor(scale_map(), cfg)), DimensionError);
  EXPECT_THROW(compose_parametric(tanh_map(), scale_map()), DimensionError);
}

TEST(Train, NoiselessLossDecreasesToZero) {
  const Dataset d = line_data(100, 2.0, 1.0, 0.0, 11);
  const LearnConfig cfg{0.01, 300};
  const TrainResult r = train(regression_learner(cfg), d, cfg);
  ASSERT_EQ(r.trace.size(), 300u);
  for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_LE(r.trace[i], r.trace[i - 1]);
  EXPECT_LT(r.trace.back(), 1e-6);
  EXPECT_NEAR(r.params[0], 2.0, 1e-3);
  EXPECT_NEAR(r.params[1], 1.0, 1e-3);
  EXPECT_EQ(r.params[2], 0.5);  // the noise scale does not reach the mean
}

TEST(Train, ZeroIterationsReturnsInitialParams) {
  const Dataset d = line_data(10, 2.0, 1.0, 0.1, 12);
  const Learner l = regression_learner({0.01, 0});
  const TrainResult r = train(l, d, {0.01, 0});
  EXPECT_EQ(r.params, l.params);
  EXPECT_TRUE(r.trace.empty());
}

TEST(Train, RecoversRegressionWithinSgdError) {
  // Constant-step SGD fluctuates around the least-squares fit with variance
  // about eta * sigma^2 / 2 per coordinate, eta = 2 eps being the step on
  // the squared error, on top of the sampling error.
  const double sigma = 0.5, eps = 0.01;
  const int n = 1000;
  Gen g(13);
  for (int trial = 0; trial < 3; ++trial) {
    const double slope = g.uniform(-3, 3), intercept = g.uniform(-2, 2);
    const Dataset d = line_data(n, slope, intercept, sigma, 100 + trial);
    const LearnConfig cfg{eps, 200};
    const TrainResult r = train(regression_learner(cfg), d, cfg);
    Mat X(n, 2);
    X << d.inputs, Mat::Ones(n, 1);
    const Mat xtx_inv = (X.transpose() * X).inverse();
    for (int j = 0; j < 2; ++j) {
      const double se = std::sqrt(sigma * sigma * xtx_inv(j, j) + 2.0 * eps * sigma * sigma / 2.0);
      EXPECT_LE(std::abs(r.params[j] - (j == 0 ? slope : intercept)), 3.0 * se);
    }
    EXPECT_NEAR(residual_sd(regression_learner(cfg), r.params, d), sigma, 0.05);
  }
}

TEST(Train, DivergenceIsReported) {
  const Dataset d = line_data(50, 2.0, 1.0, 0.1, 14);
  const LearnConfig cfg{10.0, 50};
  EXPECT_THROW(train(regression_learner(cfg), d, cfg), DivergenceError);
}

TEST(Train, MeanErrorMatchesManualSum) {
  const Dataset d = line_data(25, 1.0, 0.0, 0.3, 15);
  const Learner l = regression_learner({0.01, 1});
  const Vec p = v3(0.5, 0.2, 1.0);
  double manual = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) manual += std::pow(0.5 * d.inputs(i, 0) + 0.2 - d.targets(i, 0), 2);
  EXPECT_NEAR(mean_error(l, p, d), manual / 25.0, 1e-14);
  EXPECT_NEAR(residual_sd(l, p, d), std::sqrt(manual / 25.0), 1e-14);
}
