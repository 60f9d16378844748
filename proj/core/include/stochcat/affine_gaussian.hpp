#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "stochcat/sample_space.hpp"
#include "stochcat/types.hpp"

namespace stochcat {

/// Eigenvalues in [-kPsdTolerance, 0) are clipped to zero; anything more
/// negative is rejected.
inline constexpr double kPsdTolerance = 1e-10;

/// Symmetrize `cov`, check it is PSD within kPsdTolerance and clip slightly
/// negative eigenvalues. Throws CovarianceError otherwise.
Mat enforce_psd(const MatRef& cov);

/// A matrix L with L L^T = cov for a PSD `cov`. Cholesky first, then with
/// 1e-12 diagonal jitter, then a symmetric square root for rank-deficient input.
Mat psd_factor(const MatRef& cov);

/// Smallest eigenvalue of the symmetric part of `cov`.
double min_eigenvalue(const MatRef& cov);

/// Mean and covariance of a multivariate normal law (cov may be singular).
struct GaussianLaw {
  Vec mean;
  Mat cov;

  [[nodiscard]] Eigen::Index dim() const { return mean.size(); }
  static GaussianLaw dirac(const VecRef& at);
};

/// Gauss morphism x -> M x + s + xi with xi ~ N(0, C).
/// Composition is the affine-Gaussian marginalization.
struct GaussTriple {
  Mat M;    ///< b x a
  Vec s;    ///< b
  Mat cov;  ///< b x b, PSD

  [[nodiscard]] Eigen::Index in_dim() const { return M.cols(); }
  [[nodiscard]] Eigen::Index out_dim() const { return M.rows(); }

  [[nodiscard]] GaussianLaw law_at(const VecRef& x) const;

  static GaussTriple identity(Eigen::Index dim);
  static GaussTriple deterministic(Mat M, Vec s);
};

/// Triple of `outer` after `inner`: (M2 M1, M2 s1 + s2, M2 C1 M2^T + C2).
GaussTriple compose(const GaussTriple& inner, const GaussTriple& outer);
/// Block-diagonal product, `first` on the leading coordinates.
GaussTriple tensor(const GaussTriple& first, const GaussTriple& second);
/// Law of `outer` applied to a random input with law `input`.
GaussianLaw propagate(const GaussianLaw& input, const GaussTriple& outer);

/// Coefficients of x -> A x + c.
struct AffineCoefficients {
  Mat A;
  Vec c;
};

/// One N_mu layer: f(omega, x_p, x_a) = A(x_p) x_a + c(x_p) + m + G(omega)
/// with G ~ N(0, Sigma(x_p)). The parameter Jacobian of the mean, when
/// provided, is d(A(x_p) x + c(x_p)) / d x_p.
struct AffineGaussianLayer {
  int param_dim = 0;
  int in_dim = 0;
  int out_dim = 0;
  std::function<AffineCoefficients(const VecRef& params)> coefficients;
  std::function<Mat(const VecRef& params)> noise_cov;
  Vec noise_mean;
  std::function<Mat(const VecRef& params, const VecRef& x)> param_jacobian;  // optional

  [[nodiscard]] Vec mean(const VecRef& params, const VecRef& x) const;
  /// The layer at fixed parameters, noise mean folded into the offset.
  [[nodiscard]] GaussTriple at(const VecRef& params) const;
  [[nodiscard]] bool has_param_jacobian() const { return static_cast<bool>(param_jacobian); }
};

using LayerPtr = std::shared_ptr<const AffineGaussianLayer>;

/// Fill `out` with standard normal draws built from the flattened omega
/// coordinates (inverse CDF for Uniform01, passthrough for StdNormal).
void standard_normals(const SampleSpace& space, OmegaView omega, Eigen::Ref<Vec> out);

/// Number of omega blocks needed to drive `dim` independent normals.
int noise_blocks_for(const SampleSpace& space, int dim);

}  // namespace stochcat
