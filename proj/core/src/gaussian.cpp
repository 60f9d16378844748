#include "stochcat/gaussian.hpp"

#include <cmath>
#include <string>

#include "stochcat/builders.hpp"
#include "stochcat/errors.hpp"
#include "stochcat/kernels.hpp"
#include "stochcat/stats.hpp"

namespace stochcat {
namespace {

using nlohmann::json;

std::shared_ptr<const json> share(json j) { return std::make_shared<const json>(std::move(j)); }

LayerPtr make_layer(int p, int a, int b, std::function<AffineCoefficients(const VecRef&)> coefficients,
                    std::function<Mat(const VecRef&)> noise_cov,
                    std::function<Mat(const VecRef&, const VecRef&)> param_jacobian) {
  auto layer = std::make_shared<AffineGaussianLayer>();
  layer->param_dim = p;
  layer->in_dim = a;
  layer->out_dim = b;
  layer->coefficients = std::move(coefficients);
  layer->noise_cov = std::move(noise_cov);
  layer->noise_mean = Vec::Zero(b);
  layer->param_jacobian = std::move(param_jacobian);
  return layer;
}

}  // namespace

GaussianArrow::GaussianArrow(SampleSpace space, LayerPtr layer, int noise_blocks,
                             std::shared_ptr<const json> description)
    : space_(space), layer_(std::move(layer)), description_(std::move(description)) {
  if (!layer_) throw DimensionError("GaussianArrow: null layer");
  if (layer_->noise_mean.size() != layer_->out_dim) throw DimensionError("GaussianArrow: noise mean has wrong length");
  blocks_ = noise_blocks < 0 ? noise_blocks_for(space_, layer_->out_dim) : noise_blocks;
  if (blocks_ > 0 && blocks_ < noise_blocks_for(space_, layer_->out_dim))
    throw DimensionError("GaussianArrow: too few omega blocks to drive the noise");
}

Mat GaussianArrow::cov(const VecRef& params) const {
  if (params.size() != param_dim()) throw DimensionError("GaussianArrow::cov: parameter dimension mismatch");
  return layer_->noise_cov(params);
}

GaussianArrow linear_regression(const SampleSpace& space) {
  auto layer = make_layer(
      3, 1, 1, [](const VecRef& p) { return AffineCoefficients{Mat::Constant(1, 1, p[0]), Vec::Constant(1, p[1])}; },
      [](const VecRef& p) -> Mat { return Mat::Constant(1, 1, p[2] * p[2]); },
      [](const VecRef&, const VecRef& x) -> Mat {
        Mat J(1, 3);
        J << x[0], 1.0, 0.0;
        return J;
      });
  return {space, std::move(layer), -1, share(json{{"kind", "linreg"}})};
}

GaussianArrow affine_gaussian(const SampleSpace& space, const Mat& A, const Vec& c, const Mat& cov) {
  if (A.rows() != c.size() || cov.rows() != c.size() || cov.cols() != c.size())
    throw DimensionError("affine_gaussian: inconsistent dimensions");
  const Mat checked = enforce_psd(cov);
  const int a = static_cast<int>(A.cols()), b = static_cast<int>(A.rows());
  auto layer = make_layer(
      0, a, b, [A, c](const VecRef&) { return AffineCoefficients{A, c}; },
      [checked](const VecRef&) -> Mat { return checked; }, [b](const VecRef&, const VecRef&) -> Mat { return Mat(b, 0); });
  const int blocks = checked.isZero(0.0) ? 0 : -1;
  return {space, std::move(layer), blocks,
          share(json{{"kind", "affine"}, {"A", to_json(A)}, {"c", to_json(c)}, {"noise_cov", to_json(checked)}})};
}

GaussianArrow dense_gaussian(const SampleSpace& space, int in_dim, int out_dim, double noise_sd) {
  const int p = out_dim * in_dim + out_dim;
  auto layer = make_layer(
      p, in_dim, out_dim,
      [in_dim, out_dim](const VecRef& params) {
        AffineCoefficients co{Mat(out_dim, in_dim), params.tail(out_dim)};
        for (int r = 0; r < out_dim; ++r)
          for (int c = 0; c < in_dim; ++c) co.A(r, c) = params[r * in_dim + c];
        return co;
      },
      [out_dim, noise_sd](const VecRef&) -> Mat { return noise_sd * noise_sd * Mat::Identity(out_dim, out_dim); },
      [in_dim, out_dim, p](const VecRef&, const VecRef& x) -> Mat {
        Mat J = Mat::Zero(out_dim, p);
        for (int r = 0; r < out_dim; ++r) {
          J.block(r, r * in_dim, 1, in_dim) = x.transpose();
          J(r, out_dim * in_dim + r) = 1.0;
        }
        return J;
      });
  return {space, std::move(layer), noise_sd == 0.0 ? 0 : -1,
          share(json{{"kind", "dense"}, {"in", in_dim}, {"out", out_dim}, {"noise_sd", noise_sd}})};
}

GaussianArrow identity_gaussian(const SampleSpace& space, int dim) {
  return {space, identity_layer(dim), 0, share(json{{"kind", "identity"}, {"dim", dim}})};
}

GaussianArrow l1_scaled(const SampleSpace& space, int q, int dim, double noise_sd) {
  auto layer = make_layer(
      q, dim, dim,
      [dim](const VecRef& p) {
        return AffineCoefficients{p.lpNorm<1>() * Mat::Identity(dim, dim), Vec::Zero(dim)};
      },
      [dim, noise_sd](const VecRef&) -> Mat { return noise_sd * noise_sd * Mat::Identity(dim, dim); },
      [q, dim](const VecRef& p, const VecRef& x) -> Mat {
        // d ||p||_1 / dp_i = sign(p_i), taking 0 at the kink.
        Mat J(dim, q);
        for (int i = 0; i < q; ++i) {
          const double sign = p[i] > 0.0 ? 1.0 : (p[i] < 0.0 ? -1.0 : 0.0);
          J.col(i) = sign * x;
        }
        return J;
      });
  return {space, std::move(layer), noise_sd == 0.0 ? 0 : -1};
}

GaussianArrow gaussian_from_json(const json& desc, const SampleSpace& space) {
  if (!desc.is_object() || !desc.contains("kind")) throw ParseError("layer description needs a \"kind\"");
  const std::string kind = desc.at("kind").get<std::string>();
  try {
    if (kind == "linreg") return linear_regression(space);
    if (kind == "dense")
      return dense_gaussian(space, desc.at("in").get<int>(), desc.at("out").get<int>(), desc.value("noise_sd", 0.0));
    if (kind == "identity") return identity_gaussian(space, desc.at("dim").get<int>());
    if (kind == "affine") {
      const Mat A = matrix_from_json(desc.at("A"));
      const Vec c = vector_from_json(desc.at("c"));
      Mat cov = desc.contains("noise_cov") ? matrix_from_json(desc.at("noise_cov"))
                                           : std::pow(desc.value("noise_sd", 0.0), 2) * Mat::Identity(c.size(), c.size());
      return affine_gaussian(space, A, c, cov);
    }
  } catch (const json::exception& e) {
    throw ParseError("layer \"" + kind + "\": " + e.what());
  }
  throw ParseError("unknown layer kind \"" + kind + "\"");
}

json to_json(const GaussianArrow& arrow) {
  if (!arrow.description()) return json{{"kind", "callable"}};
  return *arrow.description();
}

DFArrow as_df_arrow(const GaussianArrow& g) {
  const LayerPtr layer = g.layer_ptr();
  const SampleSpace space = g.space();
  const int b = g.out_dim();
  const int blocks = g.noise_blocks();
  return {space,
          blocks,
          g.param_dim(),
          g.in_dim(),
          b,
          [layer, space, b, blocks](OmegaView omega, const VecRef& params, const VecRef& x) -> Vec {
            Vec y = layer->mean(params, x);
            const Mat cov = layer->noise_cov(params);
            if (blocks == 0) {
              if (!cov.isZero(0.0)) throw CovarianceError("Gaussian arrow has noise but no omega blocks");
              return y;
            }
            Vec z(b);
            standard_normals(space, omega, z);
            return y + psd_factor(cov) * z;
          },
          {layer}};
}

GaussianLaw pushforward_law(const GaussianArrow& g, const VecRef& params, const VecRef& x) {
  if (params.size() != g.param_dim() || x.size() != g.in_dim())
    throw DimensionError("pushforward_law: argument dimension mismatch");
  return {g.mean(params, x), enforce_psd(g.cov(params))};
}

GaussianLaw compose_laws(const GaussianArrow& g1, const GaussianArrow& g2, const VecRef& params1,
                         const VecRef& params2, const VecRef& x) {
  if (g1.out_dim() != g2.in_dim()) throw DimensionError("compose_laws: g1 output does not match g2 input");
  const GaussianLaw inner = pushforward_law(g1, params1, x);
  return propagate(inner, g2.layer().at(params2));
}

GaussianLaw chain_law(const DFArrow& f, const VecRef& params, const VecRef& x) {
  if (f.tag() != StructureTag::GaussianAffine) throw DimensionError("chain_law: arrow carries no Gaussian structure");
  return fold_chain(f.gaussian_chain(), params).law_at(x);
}

AffinityCheck check_gaussian_arrow(const GaussianArrow& g, std::size_t probes, const SampleStream& stream) {
  AffinityCheck out;
  out.min_cov_eigenvalue = std::numeric_limits<double>::infinity();
  const int p = g.param_dim(), a = g.in_dim();
  for (std::size_t t = 0; t < probes; ++t) {
    const SampleStream s = stream.split(t);
    std::uint64_t k = 0;
    auto draw = [&] { return 2.0 * s.normal(k++); };
    Vec params(p), x(a), y(a);
    for (auto& v : params) v = draw();
    for (auto& v : x) v = draw();
    for (auto& v : y) v = draw();
    const double alpha = draw(), beta = draw();
    const Vec zero = Vec::Zero(a);
    const Vec lhs = g.mean(params, alpha * x + beta * y);
    const Vec rhs = alpha * g.mean(params, x) + beta * g.mean(params, y) - (alpha + beta - 1.0) * g.mean(params, zero);
    const double scale = std::max(1.0, lhs.cwiseAbs().maxCoeff());
    out.max_affine_violation = std::max(out.max_affine_violation, (lhs - rhs).cwiseAbs().maxCoeff() / scale);
    const Mat cov = g.cov(params);
    out.max_cov_asymmetry = std::max(out.max_cov_asymmetry, (cov - cov.transpose()).cwiseAbs().maxCoeff());
    out.min_cov_eigenvalue = std::min(out.min_cov_eigenvalue, min_eigenvalue(cov));
  }
  return out;
}

double NonClosureReport::max_ks() const {
  double m = 0.0;
  for (const auto& p : probes) m = std::max(m, p.ks_vs_fitted_normal);
  return m;
}

NonClosureReport nonclosure_example(const SampleSpace& space, std::size_t samples, const SampleStream& stream) {
  NonClosureReport report;
  // Inner: x_p * x + N(0, inner_sd^2), one parameter.
  auto inner_layer = make_layer(
      1, 1, 1, [](const VecRef& p) { return AffineCoefficients{Mat::Constant(1, 1, p[0]), Vec::Zero(1)}; },
      [sd = report.inner_sd](const VecRef&) -> Mat { return Mat::Constant(1, 1, sd * sd); },
      [](const VecRef&, const VecRef& x) -> Mat { return Mat::Constant(1, 1, x[0]); });
  const GaussianArrow inner(space, inner_layer);
  const GaussianArrow outer = l1_scaled(space, 2, 1, report.outer_sd);
  const DFArrow composite = df_compose(as_df_arrow(inner), as_df_arrow(outer));

  const Vec xp = Vec::Constant(1, 1.0);
  const Vec xa = Vec::Constant(1, 1.0);
  const std::vector<Vec> xqs = {(Vec(2) << 1.0, 0.0).finished(), (Vec(2) << 1.0, -1.0).finished(),
                                (Vec(2) << 0.0, 0.0).finished()};
  const double outer_var = report.outer_sd * report.outer_sd;
  for (std::size_t i = 0; i < xqs.size(); ++i) {
    NonClosureProbe probe;
    probe.xq = xqs[i];
    probe.l1_norm = xqs[i].lpNorm<1>();
    const Vec params = concat(xqs[i], xp);
    const ParaArrow fixed = fix_params(composite, params).opaque();
    const Mat draws = push_forward(fixed, PushMode::Empirical).sample_n(xa, samples, stream.split(i));
    const MomentSummary m = summarize(draws.col(0));
    probe.empirical_mean = m.mean;
    probe.empirical_variance = m.variance;
    probe.analytic_variance = chain_law(composite, params, xa).cov(0, 0);
    probe.scaled_noise_variance = m.variance - outer_var;
    probe.ks_vs_fitted_normal = ks_vs_fitted_normal(draws.col(0));
    report.probes.push_back(probe);
  }
  report.scaled_noise_ratio = report.probes[1].scaled_noise_variance / report.probes[0].scaled_noise_variance;
  return report;
}

void to_json(json& j, const NonClosureReport& r) {
  json probes = json::array();
  for (const auto& p : r.probes)
    probes.push_back(json{{"xq", to_json(p.xq)},
                          {"l1_norm", p.l1_norm},
                          {"empirical_mean", p.empirical_mean},
                          {"empirical_variance", p.empirical_variance},
                          {"analytic_variance", p.analytic_variance},
                          {"scaled_noise_variance", p.scaled_noise_variance},
                          {"ks_vs_fitted_normal", p.ks_vs_fitted_normal}});
  j = json{{"inner_sd", r.inner_sd}, {"outer_sd", r.outer_sd}, {"probes", std::move(probes)},
           {"scaled_noise_ratio", r.scaled_noise_ratio}};
}

}  // namespace stochcat
