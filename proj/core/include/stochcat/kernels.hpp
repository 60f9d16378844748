#pragma once

#include <cstddef>
#include <functional>
#include <variant>

#include "stochcat/affine_gaussian.hpp"
#include "stochcat/arrows.hpp"
#include "stochcat/sample_space.hpp"
#include "stochcat/stats.hpp"

namespace stochcat {

/// A Markov kernel R^a -> Prob(R^b), either sampler-backed or an affine
/// Gaussian (M, s, C) with closed-form composition.
class MarkovKernel {
 public:
  using Sampler = std::function<Vec(const VecRef& x, const SampleStream& stream)>;

  static MarkovKernel empirical(int in_dim, int out_dim, Sampler sampler);
  /// Covariance is checked PSD; eigenvalues in [-1e-10, 0) are clipped.
  static MarkovKernel gaussian(GaussTriple triple);

  [[nodiscard]] int in_dim() const { return in_; }
  [[nodiscard]] int out_dim() const { return out_; }
  [[nodiscard]] bool is_gaussian() const { return std::holds_alternative<GaussianBackend>(backend_); }
  /// nullptr for empirical kernels.
  [[nodiscard]] const GaussTriple* gaussian_triple() const;

  [[nodiscard]] Vec sample(const VecRef& x, const SampleStream& stream) const;
  /// `count` draws at x as rows; draw t uses stream.split(t).
  [[nodiscard]] Mat sample_n(const VecRef& x, std::size_t count, const SampleStream& stream) const;

 private:
  struct GaussianBackend {
    GaussTriple triple;
    Mat factor;  // L with L L^T = cov
  };
  struct EmpiricalBackend {
    Sampler sampler;
  };

  MarkovKernel(int in_dim, int out_dim, std::variant<EmpiricalBackend, GaussianBackend> backend)
      : in_(in_dim), out_(out_dim), backend_(std::move(backend)) {}

  int in_;
  int out_;
  std::variant<EmpiricalBackend, GaussianBackend> backend_;
};

/// Point-mass kernel x -> delta_{f(x)}.
MarkovKernel dirac(const DeterministicMap& f);
/// Point-mass kernel of an affine map, kept on the Gaussian backend (cov = 0).
MarkovKernel dirac_affine(const Mat& M, const Vec& c);

/// g after f. Gaussian pairs compose in closed form; otherwise samples x_b
/// from f with stream.split(0) and then g with stream.split(1).
MarkovKernel kernel_compose(const MarkovKernel& f, const MarkovKernel& g);

/// Independent product; Gaussian pairs combine block-diagonally.
MarkovKernel tensor_kernel(const MarkovKernel& f, const MarkovKernel& g);

enum class PushMode {
  Auto,       ///< analytic Gaussian backend when the arrow carries a triple
  Empirical,  ///< always sample omega and evaluate the arrow
};

/// x -> law of f(., x) under mu^n.
MarkovKernel push_forward(const ParaArrow& f, PushMode mode = PushMode::Auto);

/// Samples of Push(g o f) (omega-sampled) against Push(g) o Push(f) at x.
/// Sample sets: `a` = composite arrow, `b` = composite kernel.
DistributionDistanceReport check_push_functoriality(const ParaArrow& f, const ParaArrow& g, const VecRef& x,
                                                    std::size_t samples, const SampleStream& stream);

/// Shared-omega self composition (`a`) against the Markov recomposition of
/// its pushforward with itself (`b`). For omega-dependent f these differ.
DistributionDistanceReport check_cokl_nonfunctoriality(const CoKlArrow& f, const VecRef& x, std::size_t samples,
                                                       const SampleStream& stream);

/// Joint law of (f(w), f2(w)) under one shared omega (`a`) against the
/// product law (f(w1), f2(w2)) with independent omegas (`b`). Equal iff f
/// and f2 are independent random variables.
DistributionDistanceReport independence_witness(const DeterministicMap& f, const DeterministicMap& f2,
                                                const SampleSpace& space, std::size_t samples,
                                                const SampleStream& stream);

}  // namespace stochcat
