#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <variant>

#include "stochcat/affine_gaussian.hpp"
#include "stochcat/arrows.hpp"
#include "stochcat/dataset.hpp"
#include "stochcat/gaussian.hpp"

namespace stochcat {

/// Marginal error function er(u, v) = (u - v)^2.
inline double square_error(double u, double v) { return (u - v) * (u - v); }

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Trapezoid-rule node count used for likelihood composition and normalization.
inline constexpr int kQuadratureNodes = 2049;
/// Half-width of a Gaussian quadrature support in standard deviations.
inline constexpr double kSupportSigmas = 8.0;

/// Density y -> L(x_p, x_a, y) for a scalar output, parameters and input bound.
using ScalarDensity = std::function<double(double)>;
/// x_a -> ScalarDensity, parameters bound.
using BoundConditional = std::function<ScalarDensity(const VecRef& x)>;

/// A conditional likelihood L(x_p, x_a, x_b), the density of the model's
/// output w.r.t. Lebesgue measure. Either a closed-form Gaussian with mean
/// affine in x_a, or a scalar-output density evaluated on a grid.
class LikelihoodFn {
 public:
  struct GaussianClosedForm {
    std::function<AffineCoefficients(const VecRef& params)> mean_coefficients;
    std::function<Mat(const VecRef& params)> cov;
  };
  struct Grid {
    std::function<BoundConditional(const VecRef& params)> bind;
    std::function<Interval(const VecRef& params, const VecRef& x)> support;
  };

  static LikelihoodFn gaussian(int param_dim, int in_dim, int out_dim, GaussianClosedForm form);
  /// Scalar-output density; `support` must contain all of its mass.
  static LikelihoodFn grid(int param_dim, int in_dim, Grid form);

  [[nodiscard]] int param_dim() const { return p_; }
  [[nodiscard]] int in_dim() const { return a_; }
  [[nodiscard]] int out_dim() const { return b_; }
  [[nodiscard]] bool is_gaussian() const { return std::holds_alternative<GaussianClosedForm>(backend_); }
  [[nodiscard]] const GaussianClosedForm* gaussian_form() const { return std::get_if<GaussianClosedForm>(&backend_); }

  [[nodiscard]] double density(const VecRef& params, const VecRef& x, const VecRef& y) const;
  /// Closed form for Gaussians (no exp-then-log); -inf where the density is 0.
  [[nodiscard]] double log_density(const VecRef& params, const VecRef& x, const VecRef& y) const;

  /// Scalar outputs only.
  [[nodiscard]] BoundConditional bind(const VecRef& params) const;
  [[nodiscard]] Interval support(const VecRef& params, const VecRef& x) const;

 private:
  LikelihoodFn(int p, int a, int b, std::variant<GaussianClosedForm, Grid> backend)
      : p_(p), a_(a), b_(b), backend_(std::move(backend)) {}

  int p_;
  int a_;
  int b_;
  std::variant<GaussianClosedForm, Grid> backend_;
};

/// Density of a Gaussian arrow's pushforward. Evaluation throws
/// NoDensityError where Sigma(x_p) is not strictly positive definite.
LikelihoodFn likelihood_of(const GaussianArrow& g);
/// Same for a composite of Gaussian layers (GaussianAffine DF arrow).
LikelihoodFn likelihood_of(const DFArrow& f);

enum class ComposeMethod {
  Auto,        ///< closed form for Gaussian pairs, quadrature otherwise
  Quadrature,  ///< always integrate the intermediate numerically
};

/// (L2 o L1)((x_q, x_p), x_a, x_c) = integral of L2(x_q, x_b, x_c) L1(x_p, x_a, x_b) dx_b.
/// The numeric path needs a scalar intermediate and a scalar output.
LikelihoodFn likelihood_compose(const LikelihoodFn& l1, const LikelihoodFn& l2,
                                ComposeMethod method = ComposeMethod::Auto, int nodes = kQuadratureNodes);

/// Trapezoid rule with `nodes` equally spaced nodes over [lo, hi].
double trapezoid(const ScalarDensity& f, Interval range, int nodes = kQuadratureNodes);

/// Integral of y -> L(x_p, x_a, y) over the declared support (scalar outputs).
double normalization(const LikelihoodFn& l, const VecRef& params, const VecRef& x, int nodes = kQuadratureNodes);

struct DatasetLogLikelihood {
  double value = 0.0;
  /// First row whose density was zero; value is -inf when set.
  std::optional<Eigen::Index> zero_density_row;
};

/// sum_i log L(x_p, x_a_i, x_b_i) with pairwise summation.
DatasetLogLikelihood log_likelihood_dataset(const LikelihoodFn& l, const VecRef& params, const Dataset& data);

/// sum_i sum_j log of the j-th marginal density at y_ij, from the marginal
/// means and the diagonal of the covariance.
DatasetLogLikelihood marginal_log_likelihood(const DFArrow& f, const VecRef& params, const Dataset& data);
DatasetLogLikelihood marginal_log_likelihood(const GaussianArrow& g, const VecRef& params, const Dataset& data);

/// log density_j(y) = alpha - beta * er(mean, y) for the j-th output marginal.
struct MarginalDecomposition {
  double alpha = 0.0;  ///< -log(2 pi s^2) / 2
  double beta = 0.0;   ///< 1 / (2 s^2)
  double mean = 0.0;   ///< analytic marginal mean
  [[nodiscard]] double log_density(double y) const { return alpha - beta * square_error(mean, y); }
};

MarginalDecomposition marginal_decomposition(const DFArrow& f, const VecRef& params, const VecRef& x, int coord);
MarginalDecomposition marginal_decomposition(const GaussianArrow& g, const VecRef& params, const VecRef& x, int coord);

}  // namespace stochcat
