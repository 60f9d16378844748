#include "stochcat/likelihood.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "stochcat/errors.hpp"
#include "stochcat/special.hpp"
#include "stochcat/stats.hpp"

namespace stochcat {
namespace {

constexpr double kMinEigen = 1e-12;
constexpr double kLog2Pi = 1.8378770664093454836;

Eigen::LLT<Mat> checked_llt(const Mat& cov) {
  if (min_eigenvalue(cov) <= kMinEigen)
    throw NoDensityError("covariance is singular: the pushforward has no density w.r.t. Lebesgue measure");
  Eigen::LLT<Mat> llt(0.5 * (cov + cov.transpose()));
  if (llt.info() != Eigen::Success) throw NoDensityError("covariance is not positive definite");
  return llt;
}

double gaussian_log_density(const Vec& mean, const Mat& cov, const VecRef& y) {
  const Eigen::LLT<Mat> llt = checked_llt(cov);
  const Vec r = llt.matrixL().solve(y - mean);
  const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return -0.5 * (static_cast<double>(mean.size()) * kLog2Pi + log_det + r.squaredNorm());
}

ScalarDensity scalar_normal(double mean, double sd) {
  return [mean, sd](double y) { return normal_pdf((y - mean) / sd) / sd; };
}

LikelihoodFn gaussian_likelihood(int p, int a, int b, std::function<AffineCoefficients(const VecRef&)> coeffs,
                                 std::function<Mat(const VecRef&)> cov) {
  return LikelihoodFn::gaussian(p, a, b, {std::move(coeffs), std::move(cov)});
}

}  // namespace

LikelihoodFn LikelihoodFn::gaussian(int param_dim, int in_dim, int out_dim, GaussianClosedForm form) {
  return {param_dim, in_dim, out_dim, std::move(form)};
}

LikelihoodFn LikelihoodFn::grid(int param_dim, int in_dim, Grid form) { return {param_dim, in_dim, 1, std::move(form)}; }

double LikelihoodFn::log_density(const VecRef& params, const VecRef& x, const VecRef& y) const {
  if (params.size() != p_ || x.size() != a_ || y.size() != b_) throw DimensionError("likelihood: argument dimension mismatch");
  if (const auto* g = gaussian_form()) {
    const AffineCoefficients co = g->mean_coefficients(params);
    return gaussian_log_density(co.A * x + co.c, g->cov(params), y);
  }
  const double d = density(params, x, y);
  return d > 0.0 ? std::log(d) : -std::numeric_limits<double>::infinity();
}

double LikelihoodFn::density(const VecRef& params, const VecRef& x, const VecRef& y) const {
  if (params.size() != p_ || x.size() != a_ || y.size() != b_) throw DimensionError("likelihood: argument dimension mismatch");
  if (is_gaussian()) return std::exp(log_density(params, x, y));
  return std::max(0.0, bind(params)(x)(y[0]));
}

BoundConditional LikelihoodFn::bind(const VecRef& params) const {
  if (b_ != 1) throw UnsupportedComposition("likelihood binding needs a scalar output");
  if (params.size() != p_) throw DimensionError("likelihood bind: parameter dimension mismatch");
  if (const auto* g = gaussian_form()) {
    const AffineCoefficients co = g->mean_coefficients(params);
    const Mat cov = g->cov(params);
    checked_llt(cov);
    const double sd = std::sqrt(cov(0, 0));
    return [A = co.A, c = co.c[0], sd](const VecRef& x) -> ScalarDensity {
      return scalar_normal(A.row(0).dot(x) + c, sd);
    };
  }
  return std::get<Grid>(backend_).bind(params);
}

Interval LikelihoodFn::support(const VecRef& params, const VecRef& x) const {
  if (b_ != 1) throw UnsupportedComposition("likelihood support is defined for scalar outputs");
  if (const auto* g = gaussian_form()) {
    const AffineCoefficients co = g->mean_coefficients(params);
    const double mean = co.A.row(0).dot(x) + co.c[0];
    const double sd = std::sqrt(g->cov(params)(0, 0));
    return {mean - kSupportSigmas * sd, mean + kSupportSigmas * sd};
  }
  return std::get<Grid>(backend_).support(params, x);
}

LikelihoodFn likelihood_of(const GaussianArrow& g) {
  const LayerPtr layer = g.layer_ptr();
  return gaussian_likelihood(
      g.param_dim(), g.in_dim(), g.out_dim(),
      [layer](const VecRef& p) {
        AffineCoefficients co = layer->coefficients(p);
        co.c += layer->noise_mean;
        return co;
      },
      [layer](const VecRef& p) -> Mat { return layer->noise_cov(p); });
}

LikelihoodFn likelihood_of(const DFArrow& f) {
  if (f.tag() != StructureTag::GaussianAffine) throw NoDensityError("likelihood_of: arrow has no Gaussian structure");
  const auto chain = f.gaussian_chain();
  return gaussian_likelihood(
      f.param_dim(), f.in_dim(), f.out_dim(),
      [chain](const VecRef& p) {
        GaussTriple t = fold_chain(chain, p);
        return AffineCoefficients{std::move(t.M), std::move(t.s)};
      },
      [chain](const VecRef& p) -> Mat { return fold_chain(chain, p).cov; });
}

double trapezoid(const ScalarDensity& f, Interval range, int nodes) {
  if (nodes < 2) throw DimensionError("trapezoid needs at least two nodes");
  const double h = (range.hi - range.lo) / (nodes - 1);
  Vec terms(nodes);
  for (int i = 0; i < nodes; ++i) {
    const double w = (i == 0 || i == nodes - 1) ? 0.5 : 1.0;
    terms[i] = w * f(range.lo + h * i);
  }
  return h * pairwise_sum(terms);
}

double normalization(const LikelihoodFn& l, const VecRef& params, const VecRef& x, int nodes) {
  return trapezoid(l.bind(params)(x), l.support(params, x), nodes);
}

LikelihoodFn likelihood_compose(const LikelihoodFn& l1, const LikelihoodFn& l2, ComposeMethod method, int nodes) {
  if (l1.out_dim() != l2.in_dim())
    throw DimensionError("likelihood_compose: " + std::to_string(l1.out_dim()) + " -> " + std::to_string(l2.in_dim()));
  const int q = l2.param_dim(), p = l1.param_dim();

  if (method == ComposeMethod::Auto && l1.is_gaussian() && l2.is_gaussian()) {
    const auto g1 = *l1.gaussian_form();
    const auto g2 = *l2.gaussian_form();
    return gaussian_likelihood(
        q + p, l1.in_dim(), l2.out_dim(),
        [g1, g2, q, p](const VecRef& params) {
          const AffineCoefficients c1 = g1.mean_coefficients(params.tail(p));
          const AffineCoefficients c2 = g2.mean_coefficients(params.head(q));
          return AffineCoefficients{c2.A * c1.A, c2.A * c1.c + c2.c};
        },
        [g1, g2, q, p](const VecRef& params) -> Mat {
          const Mat A2 = g2.mean_coefficients(params.head(q)).A;
          return A2 * g1.cov(params.tail(p)) * A2.transpose() + g2.cov(params.head(q));
        });
  }

  if (l1.out_dim() != 1 || l2.out_dim() != 1)
    throw UnsupportedComposition("numeric likelihood composition needs scalar intermediate and output");

  LikelihoodFn::Grid grid;
  grid.bind = [l1, l2, q, p, nodes](const VecRef& params) -> BoundConditional {
    const Vec p1 = params.tail(p);
    BoundConditional inner = l1.bind(p1);
    BoundConditional outer = l2.bind(params.head(q));
    const bool eager = l2.is_gaussian();
    return [l1, p1, inner, outer, nodes, eager](const VecRef& x) -> ScalarDensity {
      const Interval range = l1.support(p1, x);
      const ScalarDensity f1 = inner(x);
      const double h = (range.hi - range.lo) / (nodes - 1);
      std::vector<double> weights, points;
      weights.reserve(static_cast<std::size_t>(nodes));
      points.reserve(static_cast<std::size_t>(nodes));
      for (int i = 0; i < nodes; ++i) {
        const double xb = range.lo + h * i;
        const double w = h * ((i == 0 || i == nodes - 1) ? 0.5 : 1.0) * f1(xb);
        if (w == 0.0) continue;
        weights.push_back(w);
        points.push_back(xb);
      }
      if (!eager) {
        // The outer density is itself a composite: bind it per node on demand
        // instead of holding every node's table at once.
        return [weights = std::move(weights), points = std::move(points), outer](double z) {
          Vec terms(static_cast<Eigen::Index>(weights.size()));
          Vec xb(1);
          for (std::size_t i = 0; i < weights.size(); ++i) {
            xb[0] = points[i];
            terms[static_cast<Eigen::Index>(i)] = weights[i] * outer(xb)(z);
          }
          return pairwise_sum(terms);
        };
      }
      std::vector<ScalarDensity> conditionals;
      conditionals.reserve(points.size());
      Vec xb(1);
      for (double pt : points) {
        xb[0] = pt;
        conditionals.push_back(outer(xb));
      }
      return [weights = std::move(weights), conditionals = std::move(conditionals)](double z) {
        Vec terms(static_cast<Eigen::Index>(weights.size()));
        for (std::size_t i = 0; i < weights.size(); ++i) terms[static_cast<Eigen::Index>(i)] = weights[i] * conditionals[i](z);
        return pairwise_sum(terms);
      };
    };
  };
  grid.support = [l1, l2, q, p](const VecRef& params, const VecRef& x) -> Interval {
    const Interval inner = l1.support(params.tail(p), x);
    const Vec lo = Vec::Constant(1, inner.lo), hi = Vec::Constant(1, inner.hi);
    const Interval s_lo = l2.support(params.head(q), lo);
    const Interval s_hi = l2.support(params.head(q), hi);
    return {std::min(s_lo.lo, s_hi.lo), std::max(s_lo.hi, s_hi.hi)};
  };
  return LikelihoodFn::grid(q + p, l1.in_dim(), std::move(grid));
}

DatasetLogLikelihood log_likelihood_dataset(const LikelihoodFn& l, const VecRef& params, const Dataset& data) {
  if (data.in_dim() != l.in_dim() || data.out_dim() != l.out_dim())
    throw DimensionError("log_likelihood_dataset: dataset dimensions do not match the likelihood");
  Vec terms(data.size());
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    terms[i] = l.log_density(params, data.input(i), data.target(i));
    if (terms[i] == -std::numeric_limits<double>::infinity())
      return {-std::numeric_limits<double>::infinity(), i};
  }
  return {pairwise_sum(terms), std::nullopt};
}

DatasetLogLikelihood marginal_log_likelihood(const DFArrow& f, const VecRef& params, const Dataset& data) {
  if (data.in_dim() != f.in_dim() || data.out_dim() != f.out_dim())
    throw DimensionError("marginal_log_likelihood: dataset dimensions do not match the model");
  const int b = f.out_dim();
  Vec terms(data.size() * b);
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const GaussianLaw law = chain_law(f, params, data.input(i));
    for (int j = 0; j < b; ++j) {
      const double var = law.cov(j, j);
      if (!(var > 0.0)) return {-std::numeric_limits<double>::infinity(), i};
      terms[i * b + j] = -0.5 * (kLog2Pi + std::log(var)) - square_error(data.targets(i, j), law.mean[j]) / (2.0 * var);
    }
  }
  return {pairwise_sum(terms), std::nullopt};
}

DatasetLogLikelihood marginal_log_likelihood(const GaussianArrow& g, const VecRef& params, const Dataset& data) {
  return marginal_log_likelihood(as_df_arrow(g), params, data);
}

MarginalDecomposition marginal_decomposition(const DFArrow& f, const VecRef& params, const VecRef& x, int coord) {
  if (coord < 0 || coord >= f.out_dim()) throw DimensionError("marginal_decomposition: coordinate out of range");
  const GaussianLaw law = chain_law(f, params, x);
  const double var = law.cov(coord, coord);
  if (!(var > 0.0)) throw NoDensityError("marginal_decomposition: zero marginal variance");
  return {-std::log(2.0 * std::numbers::pi * var) / 2.0, 1.0 / (2.0 * var), law.mean[coord]};
}

MarginalDecomposition marginal_decomposition(const GaussianArrow& g, const VecRef& params, const VecRef& x, int coord) {
  return marginal_decomposition(as_df_arrow(g), params, x, coord);
}

}  // namespace stochcat
