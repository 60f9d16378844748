#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include <nlohmann/json.hpp>

#include "stochcat/affine_gaussian.hpp"
#include "stochcat/arrows.hpp"

namespace stochcat {

/// An N_mu arrow f(omega, x_p, x_a) = A(x_p) x_a + c(x_p) + G(omega) where G is
/// normal with mean m and covariance Sigma(x_p), drawn from `noise_blocks`
/// omega blocks.
class GaussianArrow {
 public:
  /// noise_blocks < 0 picks the smallest count that drives out_dim normals.
  GaussianArrow(SampleSpace space, LayerPtr layer, int noise_blocks = -1,
                std::shared_ptr<const nlohmann::json> description = nullptr);

  [[nodiscard]] int param_dim() const { return layer_->param_dim; }
  [[nodiscard]] int in_dim() const { return layer_->in_dim; }
  [[nodiscard]] int out_dim() const { return layer_->out_dim; }
  [[nodiscard]] int noise_blocks() const { return blocks_; }
  [[nodiscard]] const SampleSpace& space() const { return space_; }
  [[nodiscard]] const AffineGaussianLayer& layer() const { return *layer_; }
  [[nodiscard]] const LayerPtr& layer_ptr() const { return layer_; }
  [[nodiscard]] const std::shared_ptr<const nlohmann::json>& description() const { return description_; }

  /// T(x_p, x_a) + m.
  [[nodiscard]] Vec mean(const VecRef& params, const VecRef& x) const { return layer_->mean(params, x); }
  [[nodiscard]] Mat cov(const VecRef& params) const;

 private:
  SampleSpace space_;
  LayerPtr layer_;
  int blocks_;
  std::shared_ptr<const nlohmann::json> description_;
};

/// l(omega, [a, b, s], x) = a x + b + s * Phi^-1(omega).
GaussianArrow linear_regression(const SampleSpace& space);

/// Parameter-free x -> A x + c + N(0, cov).
GaussianArrow affine_gaussian(const SampleSpace& space, const Mat& A, const Vec& c, const Mat& cov);

/// Trainable x -> W x + bias + N(0, noise_sd^2 I); parameters are W in
/// row-major order followed by bias.
GaussianArrow dense_gaussian(const SampleSpace& space, int in_dim, int out_dim, double noise_sd);

/// Zero-noise identity on R^dim.
GaussianArrow identity_gaussian(const SampleSpace& space, int dim);

/// x -> ||x_q||_1 x + N(0, noise_sd^2 I): an affine map in x whose gain
/// depends on a q-dimensional parameter.
GaussianArrow l1_scaled(const SampleSpace& space, int q, int dim, double noise_sd);

/// Layer desc -> arrow:
///   {"kind": "linreg"}
///   {"kind": "dense", "in": a, "out": b, "noise_sd": s}
///   {"kind": "affine", "A": [[..]], "c": [..], "noise_cov": [[..]]}   // or "noise_sd": s
///   {"kind": "identity", "dim": a}
GaussianArrow gaussian_from_json(const nlohmann::json& desc, const SampleSpace& space);
/// The layer description, or {"kind": "callable"} for arrows built from callables.
nlohmann::json to_json(const GaussianArrow& arrow);

/// The arrow as a DF arrow tagged GaussianAffine. The evaluator adds
/// L(x_p) z(omega) with L a PSD factor of Sigma(x_p); throws CovarianceError
/// when Sigma(x_p) is not PSD.
DFArrow as_df_arrow(const GaussianArrow& g);

/// Exact law of f(., x_p, x_a): N(T(x_p, x_a) + m, Sigma(x_p)).
GaussianLaw pushforward_law(const GaussianArrow& g, const VecRef& params, const VecRef& x);

/// Law of (g2 o g1)(., (x_p2, x_p1), x_a) at fixed parameters.
GaussianLaw compose_laws(const GaussianArrow& g1, const GaussianArrow& g2, const VecRef& params1,
                         const VecRef& params2, const VecRef& x);

/// Law of a GaussianAffine DF arrow (any composite of N_mu layers).
GaussianLaw chain_law(const DFArrow& f, const VecRef& params, const VecRef& x);

/// Largest violation of T(x_p, a x + b y) = a T(x_p, x) + b T(x_p, y) - (a + b - 1) T(x_p, 0)
/// and of Sigma(x_p) symmetric PSD over `probes` random (x_p, x, y, a, b).
struct AffinityCheck {
  double max_affine_violation = 0.0;
  double min_cov_eigenvalue = 0.0;
  double max_cov_asymmetry = 0.0;
  [[nodiscard]] bool ok(double tol = 1e-9) const {
    return max_affine_violation <= tol && min_cov_eigenvalue >= -kPsdTolerance && max_cov_asymmetry <= tol;
  }
};
AffinityCheck check_gaussian_arrow(const GaussianArrow& g, std::size_t probes, const SampleStream& stream);

/// Composite of a linear layer x_p * x + N(0, inner_sd^2) with
/// l1_scaled(q = 2): normal at every fixed parameter, yet its noise variance
/// changes with x_q, so it has no parameter-free noise term.
struct NonClosureProbe {
  Vec xq;
  double l1_norm = 0.0;
  double empirical_mean = 0.0;
  double empirical_variance = 0.0;
  double analytic_variance = 0.0;
  double scaled_noise_variance = 0.0;  ///< empirical variance minus the outer noise variance
  double ks_vs_fitted_normal = 0.0;
};

struct NonClosureReport {
  double inner_sd = 1.0;
  double outer_sd = 0.5;
  std::vector<NonClosureProbe> probes;  ///< x_q = (1,0), (1,-1), (0,0)
  /// scaled_noise_variance at ||x_q||_1 = 2 over the value at ||x_q||_1 = 1.
  double scaled_noise_ratio = 0.0;
  [[nodiscard]] double max_ks() const;
};

NonClosureReport nonclosure_example(const SampleSpace& space, std::size_t samples, const SampleStream& stream);

void to_json(nlohmann::json& j, const NonClosureReport& report);

}  // namespace stochcat
