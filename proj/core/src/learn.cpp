#include "stochcat/learn.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "stochcat/errors.hpp"
#include "stochcat/stats.hpp"

namespace stochcat {
namespace {

double fd_step(double v) { return 1e-5 * std::max(1.0, std::abs(v)); }

void check_finite(const Vec& v, const char* what) {
  if (!v.allFinite()) throw DivergenceError(std::string(what) + " produced non-finite values");
}

}  // namespace

ParametricMap::ParametricMap(int param_dim, int in_dim, int out_dim, Eval eval, JacobianFn jacobian)
    : p_(param_dim), a_(in_dim), b_(out_dim), eval_(std::move(eval)), jacobian_(std::move(jacobian)) {
  if (p_ < 0 || a_ < 0 || b_ < 0) throw DimensionError("ParametricMap: negative dimension");
}

Vec ParametricMap::operator()(const VecRef& params, const VecRef& x) const {
  if (params.size() != p_ || x.size() != a_) throw DimensionError("ParametricMap: argument dimension mismatch");
  Vec y = eval_(params, x);
  if (y.size() != b_) throw DimensionError("ParametricMap: evaluator returned the wrong dimension");
  return y;
}

Jacobians ParametricMap::jacobians(const VecRef& params, const VecRef& x) const {
  if (!jacobian_) return finite_difference_jacobians(params, x);
  if (params.size() != p_ || x.size() != a_) throw DimensionError("ParametricMap: argument dimension mismatch");
  return jacobian_(params, x);
}

Jacobians ParametricMap::finite_difference_jacobians(const VecRef& params, const VecRef& x) const {
  Jacobians j{Mat(b_, p_), Mat(b_, a_)};
  Vec p = params, xa = x;
  for (int i = 0; i < p_; ++i) {
    const double h = fd_step(p[i]), v = p[i];
    p[i] = v + h;
    const Vec hi = (*this)(p, xa);
    p[i] = v - h;
    const Vec lo = (*this)(p, xa);
    p[i] = v;
    j.wrt_params.col(i) = (hi - lo) / (2.0 * h);
  }
  for (int i = 0; i < a_; ++i) {
    const double h = fd_step(xa[i]), v = xa[i];
    xa[i] = v + h;
    const Vec hi = (*this)(p, xa);
    xa[i] = v - h;
    const Vec lo = (*this)(p, xa);
    xa[i] = v;
    j.wrt_input.col(i) = (hi - lo) / (2.0 * h);
  }
  return j;
}

ParametricMap compose_parametric(const ParametricMap& f, const ParametricMap& g) {
  if (f.out_dim() != g.in_dim())
    throw DimensionError("compose_parametric: " + std::to_string(f.out_dim()) + " -> " + std::to_string(g.in_dim()));
  const int pg = g.param_dim(), pf = f.param_dim();
  auto eval = [f, g, pg, pf](const VecRef& params, const VecRef& x) -> Vec {
    return g(params.head(pg), f(params.tail(pf), x));
  };
  ParametricMap::JacobianFn jac;
  if (f.mode() == GradientMode::AnalyticAffine && g.mode() == GradientMode::AnalyticAffine) {
    jac = [f, g, pg, pf](const VecRef& params, const VecRef& x) -> Jacobians {
      const Vec pf_v = params.tail(pf);
      const Jacobians jf = f.jacobians(pf_v, x);
      const Jacobians jg = g.jacobians(params.head(pg), f(pf_v, x));
      Jacobians out{Mat(g.out_dim(), pg + pf), jg.wrt_input * jf.wrt_input};
      out.wrt_params << jg.wrt_params, jg.wrt_input * jf.wrt_params;
      return out;
    };
  }
  return {pg + pf, f.in_dim(), g.out_dim(), std::move(eval), std::move(jac)};
}

ParametricMap identity_parametric(int dim) {
  return {0, dim, dim, [](const VecRef&, const VecRef& x) -> Vec { return x; },
          [dim](const VecRef&, const VecRef&) { return Jacobians{Mat(dim, 0), Mat::Identity(dim, dim)}; }};
}

ParametricMap exp_functor(const DFArrow& f, std::size_t mc_samples, const SampleStream& stream) {
  if (f.tag() == StructureTag::GaussianAffine) {
    const auto chain = f.gaussian_chain();
    auto eval = [chain](const VecRef& params, const VecRef& x) -> Vec { return fold_chain(chain, params).law_at(x).mean; };
    const bool analytic = std::all_of(chain.begin(), chain.end(),
                                      [](const LayerPtr& l) { return l->param_dim == 0 || l->has_param_jacobian(); });
    ParametricMap::JacobianFn jac;
    if (analytic) {
      const int p = f.param_dim(), a = f.in_dim(), b = f.out_dim();
      jac = [chain, p, a, b](const VecRef& params, const VecRef& x) -> Jacobians {
        // Innermost layer first; its parameters sit at the tail.
        Mat dp = Mat::Zero(a, p);
        Mat dx = Mat::Identity(a, a);
        Vec h = x;
        Eigen::Index offset = p;
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
          const AffineGaussianLayer& layer = **it;
          offset -= layer.param_dim;
          const Vec lp = params.segment(offset, layer.param_dim);
          const AffineCoefficients co = layer.coefficients(lp);
          Mat next_dp = co.A * dp;
          if (layer.param_dim > 0) next_dp.middleCols(offset, layer.param_dim) += layer.param_jacobian(lp, h);
          dp = std::move(next_dp);
          dx = co.A * dx;
          h = layer.mean(lp, h);
        }
        (void)b;
        return {std::move(dp), std::move(dx)};
      };
    }
    return {f.param_dim(), f.in_dim(), f.out_dim(), std::move(eval), std::move(jac)};
  }

  if (mc_samples == 0) throw DimensionError("exp_functor: mc_samples must be positive");
  auto omegas = std::make_shared<std::vector<OmegaVector>>();
  omegas->reserve(mc_samples);
  for (std::size_t t = 0; t < mc_samples; ++t)
    omegas->push_back(sample_omega(f.space(), static_cast<std::size_t>(f.blocks()), stream.split(t)));
  const int b = f.out_dim();
  return {f.param_dim(), f.in_dim(), b, [f, omegas, b](const VecRef& params, const VecRef& x) -> Vec {
            Mat draws(static_cast<Eigen::Index>(omegas->size()), b);
            for (std::size_t t = 0; t < omegas->size(); ++t)
              draws.row(static_cast<Eigen::Index>(t)) = f((*omegas)[t], params, x).transpose();
            return sample_mean(draws);
          }};
}

double total_error(const ParametricMap& m, const VecRef& params, const VecRef& a, const VecRef& b) {
  return (m(params, a) - b).squaredNorm();
}

Learner backprop_functor(const ParametricMap& m, const LearnConfig& cfg, const Vec& params) {
  if (!(cfg.epsilon > 0.0)) throw DimensionError("backprop_functor: epsilon must be positive");
  Learner l;
  l.param_dim = m.param_dim();
  l.in_dim = m.in_dim();
  l.out_dim = m.out_dim();
  l.params = params.size() == 0 ? Vec::Zero(m.param_dim()) : params;
  if (l.params.size() != m.param_dim()) throw DimensionError("backprop_functor: initial parameter dimension mismatch");
  l.implement = [m](const VecRef& p, const VecRef& a) -> Vec { return m(p, a); };
  const double eps = cfg.epsilon;
  l.update = [m, eps](const VecRef& p, const VecRef& a, const VecRef& b) -> Vec {
    const Vec residual = m(p, a) - b;
    Vec out = p - eps * 2.0 * (m.jacobians(p, a).wrt_params.transpose() * residual);
    check_finite(out, "update");
    return out;
  };
  l.request = [m](const VecRef& p, const VecRef& a, const VecRef& b) -> Vec {
    const Vec residual = m(p, a) - b;
    Vec out = a - m.jacobians(p, a).wrt_input.transpose() * residual;
    check_finite(out, "request");
    return out;
  };
  return l;
}

Learner compose_learners(const Learner& l1, const Learner& l2) {
  if (l1.out_dim != l2.in_dim)
    throw DimensionError("compose_learners: " + std::to_string(l1.out_dim) + " -> " + std::to_string(l2.in_dim));
  const int p2 = l2.param_dim, p1 = l1.param_dim;
  Learner l;
  l.param_dim = p2 + p1;
  l.in_dim = l1.in_dim;
  l.out_dim = l2.out_dim;
  l.params = concat(l2.params, l1.params);
  l.implement = [l1, l2, p2, p1](const VecRef& p, const VecRef& a) -> Vec {
    return l2.implement(p.head(p2), l1.implement(p.tail(p1), a));
  };
  l.update = [l1, l2, p2, p1](const VecRef& p, const VecRef& a, const VecRef& c) -> Vec {
    const Vec q2 = p.head(p2), q1 = p.tail(p1);
    const Vec mid = l1.implement(q1, a);
    return concat(l2.update(q2, mid, c), l1.update(q1, a, l2.request(q2, mid, c)));
  };
  l.request = [l1, l2, p2, p1](const VecRef& p, const VecRef& a, const VecRef& c) -> Vec {
    const Vec q2 = p.head(p2), q1 = p.tail(p1);
    return l1.request(q1, a, l2.request(q2, l1.implement(q1, a), c));
  };
  return l;
}

Learner trivial_learner(int dim) {
  Learner l;
  l.in_dim = l.out_dim = dim;
  l.params = Vec(0);
  l.implement = [](const VecRef&, const VecRef& a) -> Vec { return a; };
  l.update = [](const VecRef& p, const VecRef&, const VecRef&) -> Vec { return p; };
  l.request = [](const VecRef&, const VecRef&, const VecRef& b) -> Vec { return b; };
  return l;
}

double mean_error(const Learner& l, const VecRef& params, const Dataset& data) {
  Vec terms(data.size());
  for (Eigen::Index i = 0; i < data.size(); ++i)
    terms[i] = (l.implement(params, data.input(i)) - data.target(i)).squaredNorm();
  return data.size() == 0 ? 0.0 : pairwise_sum(terms) / static_cast<double>(data.size());
}

double residual_sd(const Learner& l, const VecRef& params, const Dataset& data) {
  if (data.size() == 0 || l.out_dim == 0) return 0.0;
  return std::sqrt(mean_error(l, params, data) / l.out_dim);
}

TrainResult train(const Learner& l, const Dataset& data, const LearnConfig& cfg) {
  if (data.in_dim() != l.in_dim || data.out_dim() != l.out_dim)
    throw DimensionError("train: dataset dimensions do not match the learner");
  if (cfg.iterations < 0) throw DimensionError("train: negative iteration count");
  TrainResult out;
  out.params = l.params;
  out.trace.reserve(static_cast<std::size_t>(cfg.iterations));
  for (int pass = 0; pass < cfg.iterations; ++pass) {
    for (Eigen::Index i = 0; i < data.size(); ++i) {
      Vec next;
      try {
        next = l.update(out.params, data.input(i), data.target(i));
      } catch (const DivergenceError&) {
        next = Vec::Constant(out.params.size(), std::numeric_limits<double>::quiet_NaN());
      }
      if (!next.allFinite())
        throw DivergenceError("train: parameters diverged in pass " + std::to_string(pass) + " at row " +
                              std::to_string(i) + "; try a smaller epsilon");
      out.params = std::move(next);
    }
    out.trace.push_back(mean_error(l, out.params, data));
  }
  return out;
}

double gradient_check(const ParametricMap& m, std::size_t probes, const SampleStream& stream) {
  double worst = 0.0;
  for (std::size_t t = 0; t < probes; ++t) {
    const SampleStream s = stream.split(t);
    std::uint64_t k = 0;
    Vec p(m.param_dim()), x(m.in_dim());
    for (auto& v : p) v = s.normal(k++);
    for (auto& v : x) v = s.normal(k++);
    const Jacobians an = m.jacobians(p, x);
    const Jacobians fd = m.finite_difference_jacobians(p, x);
    auto rel = [](const Mat& a, const Mat& b) {
      if (a.size() == 0) return 0.0;
      return ((a - b).array().abs() / a.array().abs().max(1.0)).maxCoeff();
    };
    worst = std::max({worst, rel(an.wrt_params, fd.wrt_params), rel(an.wrt_input, fd.wrt_input)});
  }
  return worst;
}

}  // namespace stochcat
