#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "stochcat/arrows.hpp"
#include "stochcat/dataset.hpp"
#include "stochcat/gaussian.hpp"
#include "stochcat/sample_space.hpp"

namespace stochcat::tools {

/// A composable pair g o f probed at x.
struct ParaPair {
  std::string name;
  ParaArrow f;
  ParaArrow g;
  Vec x;
};

/// Affine-Gaussian and inverse-CDF pairs over Uniform01 with k = 1.
std::vector<ParaPair> push_corpus();

/// A composite of Gaussian layers with fixed parameters drawn at random.
struct GaussianChain {
  std::string name;
  DFArrow arrow;
  Vec params;
  Vec x;
};

/// Chains of two or three layers (linreg, dense, affine, l1-scaled).
std::vector<GaussianChain> gaussian_chain_corpus(const SampleStream& stream);

/// Layers applied in list order (first element innermost).
DFArrow chain_of(const std::vector<GaussianArrow>& layers);

/// y = slope x + intercept + N(0, sd^2) with x ~ N(0, 1).
Dataset synthetic_regression(std::size_t n, double slope, double intercept, double sd, const SampleStream& stream);

}  // namespace stochcat::tools
