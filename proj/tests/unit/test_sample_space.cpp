#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "stochcat/errors.hpp"
#include "stochcat/sample_space.hpp"
#include "stochcat/special.hpp"
#include "stochcat/stats.hpp"
#include "support.hpp"

using namespace stochcat;

TEST(SampleSpace, RejectsNonPositiveDimension) {
  EXPECT_THROW(SampleSpace(0, BaseMeasure::Uniform01), DimensionError);
  EXPECT_THROW(SampleSpace(-2, BaseMeasure::StdNormal), DimensionError);
  EXPECT_EQ(SampleSpace(3, BaseMeasure::StdNormal).dim(), 3);
}

TEST(SampleOmega, ZeroBlocksIsTheUnit) {
  const OmegaVector w = sample_omega({1, BaseMeasure::Uniform01}, 0, SampleStream(1));
  EXPECT_EQ(w.blocks(), 0u);
  EXPECT_TRUE(w.flat().empty());
}

TEST(SampleOmega, UniformMeanIsOneHalf) {
  const OmegaVector w = sample_omega({1, BaseMeasure::Uniform01}, 100000, SampleStream(7));
  const Vec v = Eigen::Map<const Vec>(w.flat().data(), static_cast<Eigen::Index>(w.flat().size()));
  EXPECT_NEAR(v.mean(), 0.5, 0.01);
}

TEST(SampleOmega, TwoBlocksEqualSplitSingleDraws) {
  const SampleSpace space{1, BaseMeasure::Uniform01};
  const SampleStream s(99);
  const OmegaVector both = sample_omega(space, 2, s);
  EXPECT_EQ(both.block(0)[0], s.split(0).uniform(0));
  EXPECT_EQ(both.block(1)[0], s.split(1).uniform(0));
}

TEST(SampleOmega, BlocksHaveLengthK) {
  const OmegaVector w = sample_omega({4, BaseMeasure::StdNormal}, 5, SampleStream(3));
  EXPECT_EQ(w.blocks(), 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(w.block(i).size(), 4u);
}

TEST(SampleStream, ReplayIsBitwiseIdentical) {
  for (std::uint64_t seed : {0ull, 1ull, 12345ull, ~0ull}) {
    const SampleStream a(seed, 17), b(seed, 17);
    for (std::uint64_t j = 0; j < 100; ++j) {
      EXPECT_EQ(a.bits(j), b.bits(j));
      EXPECT_EQ(a.split(j).bits(3), b.split(j).bits(3));
    }
  }
  const OmegaVector x = sample_omega({2, BaseMeasure::StdNormal}, 50, SampleStream(5));
  const OmegaVector y = sample_omega({2, BaseMeasure::StdNormal}, 50, SampleStream(5));
  EXPECT_EQ(x, y);
}

TEST(SampleStream, CounterOffsetsAgree) {
  const SampleStream s(42, 10);
  EXPECT_EQ(s.bits(5), SampleStream(42, 15).bits(0));
  EXPECT_EQ(s.advanced(5).bits(0), s.bits(5));
}

TEST(SampleStream, ChildrenDoNotCollide) {
  const SampleStream s(2024);
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 64; ++i)
    for (std::uint64_t j = 0; j < 64; ++j) seen.insert(s.split(i).bits(j));
  for (std::uint64_t j = 0; j < 64; ++j) seen.insert(s.bits(j));
  EXPECT_EQ(seen.size(), 65u * 64u);
}

TEST(SampleStream, SplitStreamsAreUncorrelated) {
  const SampleStream s(77);
  const auto kids = s.split_n(2);
  const std::size_t n = 100000;
  Mat draws(n, 2);
  for (std::size_t t = 0; t < n; ++t) {
    draws(t, 0) = kids[0].normal(t);
    draws(t, 1) = kids[1].normal(t);
  }
  const Mat corr = correlation(sample_cov(draws));
  EXPECT_LT(std::abs(corr(0, 1)), 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST(SampleStream, UniformNeverHitsTheBoundary) {
  // The extreme bit patterns map strictly inside (0, 1).
  const double lo = (0.0 + 0.5) * 0x1.0p-53;
  const double hi = (static_cast<double>((~0ull) >> 12) + 0.5) * 0x1.0p-52;
  EXPECT_GT(lo, 0.0);
  EXPECT_LT(hi, 1.0);
  const SampleStream s(11);
  for (std::uint64_t j = 0; j < 200000; ++j) {
    const double u = s.uniform(j);
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_TRUE(std::isfinite(normal_quantile(u)));
  }
}

TEST(SampleStream, StdNormalSamplesAreFiniteAndNormal) {
  const OmegaVector w = sample_omega({1, BaseMeasure::StdNormal}, 100000, SampleStream(8));
  const Vec v = Eigen::Map<const Vec>(w.flat().data(), static_cast<Eigen::Index>(w.flat().size()));
  EXPECT_TRUE(v.allFinite());
  EXPECT_LT(ks_vs_normal(v, 0.0, 1.0), 0.01);
}

TEST(ConcatOmega, UnitAndOrderAndAssociativity) {
  testkit::Gen g(5);
  const OmegaVector empty(1);
  const OmegaVector a = g.omega(1, 2), b = g.omega(1, 1), c = g.omega(1, 3);
  EXPECT_EQ(concat_omega(empty, c), c);
  EXPECT_EQ(concat_omega(c, empty), c);
  const OmegaVector ab = concat_omega(a, b);
  ASSERT_EQ(ab.blocks(), 3u);
  EXPECT_EQ(ab.block(0)[0], a.block(0)[0]);
  EXPECT_EQ(ab.block(1)[0], a.block(1)[0]);
  EXPECT_EQ(ab.block(2)[0], b.block(0)[0]);
  EXPECT_EQ(concat_omega(concat_omega(a, b), c), concat_omega(a, concat_omega(b, c)));
}

TEST(ConcatOmega, MismatchedBlockLengthThrows) {
  testkit::Gen g(6);
  EXPECT_THROW(concat_omega(g.omega(1, 2), g.omega(2, 1)), DimensionError);
}

TEST(OmegaVector, RejectsRaggedFlatStorage) {
  EXPECT_THROW(OmegaVector(2, std::vector<double>{0.1, 0.2, 0.3}), DimensionError);
}

// E[g(w1) h(w2)] over jointly sampled blocks equals the product of the
// separately estimated expectations (product measure factorization).
TEST(SampleOmega, ProductMeasureFactorization) {
  const SampleSpace space{1, BaseMeasure::Uniform01};
  const std::size_t n = 100000;
  const SampleStream joint(123), left(456), right(789);
  Vec prod(n), gl(n), hr(n);
  for (std::size_t t = 0; t < n; ++t) {
    const OmegaVector w = sample_omega(space, 2, joint.split(t));
    prod[t] = std::exp(w.block(0)[0]) * w.block(1)[0] * w.block(1)[0];
    gl[t] = std::exp(sample_omega(space, 1, left.split(t)).block(0)[0]);
    hr[t] = std::pow(sample_omega(space, 1, right.split(t)).block(0)[0], 2);
  }
  const MomentSummary mp = summarize(prod), mg = summarize(gl), mh = summarize(hr);
  const double est = mg.mean * mh.mean;
  const double se = std::sqrt(mp.variance / n + mh.mean * mh.mean * mg.variance / n + mg.mean * mg.mean * mh.variance / n);
  EXPECT_LT(std::abs(mp.mean - est), 3.0 * se);
  // Analytic value (e - 1) / 3.
  EXPECT_LT(std::abs(mp.mean - (std::exp(1.0) - 1.0) / 3.0), 3.0 * std::sqrt(mp.variance / n));
}

TEST(Special, QuantileEdgesAndInverse) {
  EXPECT_EQ(normal_quantile(0.5), 0.0);
  EXPECT_TRUE(std::isinf(normal_quantile(0.0)) && normal_quantile(0.0) < 0);
  EXPECT_TRUE(std::isinf(normal_quantile(1.0)) && normal_quantile(1.0) > 0);
  EXPECT_TRUE(std::isnan(normal_quantile(-0.1)));
  for (double p : {1e-300, 1e-12, 0.01, 0.3, 0.77, 0.999999}) 
    EXPECT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-10 * std::min(p, 1.0 - p) + 1e-16);
  EXPECT_NEAR(normal_pdf(0.0), 0.3989422804014327, 1e-16);
}
