#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "stochcat/arrows.hpp"
#include "stochcat/dataset.hpp"
#include "stochcat/sample_space.hpp"

namespace stochcat {

enum class GradientMode { AnalyticAffine, FiniteDifference };

struct Jacobians {
  Mat wrt_params;  ///< b x p
  Mat wrt_input;   ///< b x a
};

/// Deterministic parametric map R^p x R^a -> R^b.
class ParametricMap {
 public:
  using Eval = std::function<Vec(const VecRef& params, const VecRef& x)>;
  using JacobianFn = std::function<Jacobians(const VecRef& params, const VecRef& x)>;

  /// Without `jacobian` the map uses central finite differences.
  ParametricMap(int param_dim, int in_dim, int out_dim, Eval eval, JacobianFn jacobian = nullptr);

  [[nodiscard]] int param_dim() const { return p_; }
  [[nodiscard]] int in_dim() const { return a_; }
  [[nodiscard]] int out_dim() const { return b_; }
  [[nodiscard]] GradientMode mode() const {
    return jacobian_ ? GradientMode::AnalyticAffine : GradientMode::FiniteDifference;
  }

  Vec operator()(const VecRef& params, const VecRef& x) const;
  [[nodiscard]] Jacobians jacobians(const VecRef& params, const VecRef& x) const;
  /// Central differences with h = 1e-5 * max(1, |coordinate|), whatever the mode.
  [[nodiscard]] Jacobians finite_difference_jacobians(const VecRef& params, const VecRef& x) const;
  /// The same map with analytic Jacobians dropped.
  [[nodiscard]] ParametricMap without_jacobians() const { return {p_, a_, b_, eval_}; }

 private:
  int p_;
  int a_;
  int b_;
  Eval eval_;
  JacobianFn jacobian_;
};

/// g after f with parameters laid out (g, f).
ParametricMap compose_parametric(const ParametricMap& f, const ParametricMap& g);
ParametricMap identity_parametric(int dim);

/// Number of Monte Carlo draws used when none is given.
inline constexpr std::size_t kDefaultMcSamples = 4096;

/// (x_p, x_a) -> E[f(., x_p, x_a)]. GaussianAffine arrows give the analytic
/// mean (analytic Jacobians when every layer declares a parameter Jacobian);
/// other arrows average over a frozen set of `mc_samples` omega draws.
ParametricMap exp_functor(const DFArrow& f, std::size_t mc_samples = kDefaultMcSamples,
                          const SampleStream& stream = SampleStream{});

/// Supervised learner: implement, update and request with its current parameters.
struct Learner {
  using Implement = std::function<Vec(const VecRef& params, const VecRef& a)>;
  using Step = std::function<Vec(const VecRef& params, const VecRef& a, const VecRef& b)>;

  int param_dim = 0;
  int in_dim = 0;
  int out_dim = 0;
  Vec params;
  Implement implement;
  Step update;
  Step request;
};

struct LearnConfig {
  double epsilon = 0.01;
  int iterations = 1;
};

/// Total error E(p, a, b) = sum_j (m(p, a)_j - b_j)^2.
double total_error(const ParametricMap& m, const VecRef& params, const VecRef& a, const VecRef& b);

/// update = p - eps * grad_p E, request = a - grad_a E / 2 (the input that
/// would zero the error to first order under er = (a - b)^2).
/// `params` defaults to zero.
Learner backprop_functor(const ParametricMap& m, const LearnConfig& cfg, const Vec& params = Vec());

/// l2 after l1; parameters laid out (p2, p1).
Learner compose_learners(const Learner& l1, const Learner& l2);

/// Parameter-free identity learner on R^dim; request returns b.
Learner trivial_learner(int dim);

struct TrainResult {
  Vec params;
  /// Mean over rows of E after each pass.
  std::vector<double> trace;
};

/// Applies update row by row for cfg.iterations passes, starting from l.params.
/// Throws DivergenceError when the parameters stop being finite.
TrainResult train(const Learner& l, const Dataset& data, const LearnConfig& cfg);

/// Mean over rows of E at the given parameters.
double mean_error(const Learner& l, const VecRef& params, const Dataset& data);

/// sqrt of the mean squared residual over all rows and output coordinates.
double residual_sd(const Learner& l, const VecRef& params, const Dataset& data);

/// Largest |analytic - finite difference| / max(1, |analytic|) over the
/// Jacobian entries at `probes` random (x_p, x_a).
double gradient_check(const ParametricMap& m, std::size_t probes, const SampleStream& stream);

}  // namespace stochcat
