#include "stochcat/kernels.hpp"

#include <string>

#include "stochcat/errors.hpp"

namespace stochcat {

MarkovKernel MarkovKernel::empirical(int in_dim, int out_dim, Sampler sampler) {
  return {in_dim, out_dim, EmpiricalBackend{std::move(sampler)}};
}

MarkovKernel MarkovKernel::gaussian(GaussTriple triple) {
  if (triple.cov.rows() != triple.out_dim() || triple.cov.cols() != triple.out_dim() || triple.s.size() != triple.out_dim())
    throw DimensionError("MarkovKernel::gaussian: inconsistent triple dimensions");
  triple.cov = enforce_psd(triple.cov);
  Mat factor = psd_factor(triple.cov);
  const int a = static_cast<int>(triple.in_dim()), b = static_cast<int>(triple.out_dim());
  return {a, b, GaussianBackend{std::move(triple), std::move(factor)}};
}

const GaussTriple* MarkovKernel::gaussian_triple() const {
  const auto* g = std::get_if<GaussianBackend>(&backend_);
  return g ? &g->triple : nullptr;
}

Vec MarkovKernel::sample(const VecRef& x, const SampleStream& stream) const {
  if (x.size() != in_) throw DimensionError("MarkovKernel::sample: input dimension mismatch");
  if (const auto* g = std::get_if<GaussianBackend>(&backend_)) {
    Vec z(out_);
    for (int i = 0; i < out_; ++i) z[i] = stream.normal(static_cast<std::uint64_t>(i));
    return g->triple.M * x + g->triple.s + g->factor * z;
  }
  Vec y = std::get<EmpiricalBackend>(backend_).sampler(x, stream);
  if (y.size() != out_) throw DimensionError("MarkovKernel::sample: sampler returned the wrong dimension");
  return y;
}

Mat MarkovKernel::sample_n(const VecRef& x, std::size_t count, const SampleStream& stream) const {
  Mat out(static_cast<Eigen::Index>(count), out_);
  for (std::size_t t = 0; t < count; ++t) out.row(static_cast<Eigen::Index>(t)) = sample(x, stream.split(t)).transpose();
  return out;
}

MarkovKernel dirac(const DeterministicMap& f) {
  return MarkovKernel::empirical(f.in_dim, f.out_dim, [f](const VecRef& x, const SampleStream&) { return f(x); });
}

MarkovKernel dirac_affine(const Mat& M, const Vec& c) { return MarkovKernel::gaussian(GaussTriple::deterministic(M, c)); }

MarkovKernel kernel_compose(const MarkovKernel& f, const MarkovKernel& g) {
  if (f.out_dim() != g.in_dim())
    throw DimensionError("kernel_compose: " + std::to_string(f.out_dim()) + " -> " + std::to_string(g.in_dim()));
  if (f.is_gaussian() && g.is_gaussian()) return MarkovKernel::gaussian(compose(*f.gaussian_triple(), *g.gaussian_triple()));
  return MarkovKernel::empirical(f.in_dim(), g.out_dim(), [f, g](const VecRef& x, const SampleStream& s) {
    return g.sample(f.sample(x, s.split(0)), s.split(1));
  });
}

MarkovKernel tensor_kernel(const MarkovKernel& f, const MarkovKernel& g) {
  if (f.is_gaussian() && g.is_gaussian()) return MarkovKernel::gaussian(tensor(*f.gaussian_triple(), *g.gaussian_triple()));
  const int a = f.in_dim(), c = g.in_dim(), b = f.out_dim(), d = g.out_dim();
  return MarkovKernel::empirical(a + c, b + d, [f, g, a, c, b, d](const VecRef& x, const SampleStream& s) {
    Vec y(b + d);
    y.head(b) = f.sample(x.head(a), s.split(0));
    y.tail(d) = g.sample(x.tail(c), s.split(1));
    return y;
  });
}

MarkovKernel push_forward(const ParaArrow& f, PushMode mode) {
  if (mode == PushMode::Auto && f.gaussian()) return MarkovKernel::gaussian(*f.gaussian());
  const auto n = static_cast<std::size_t>(f.blocks());
  return MarkovKernel::empirical(f.in_dim(), f.out_dim(), [f, n](const VecRef& x, const SampleStream& s) {
    return f(sample_omega(f.space(), n, s), x);
  });
}

DistributionDistanceReport check_push_functoriality(const ParaArrow& f, const ParaArrow& g, const VecRef& x,
                                                    std::size_t samples, const SampleStream& stream) {
  const MarkovKernel composite_arrow = push_forward(para_compose(f, g), PushMode::Empirical);
  const MarkovKernel composite_kernel = kernel_compose(push_forward(f), push_forward(g));
  return compare_samples(composite_arrow.sample_n(x, samples, stream.split(0)),
                         composite_kernel.sample_n(x, samples, stream.split(1)));
}

DistributionDistanceReport check_cokl_nonfunctoriality(const CoKlArrow& f, const VecRef& x, std::size_t samples,
                                                       const SampleStream& stream) {
  if (f.in_dim() != f.out_dim()) throw DimensionError("check_cokl_nonfunctoriality: arrow is not an endomorphism");
  const MarkovKernel shared = push_forward(as_para(cokl_compose(f, f)), PushMode::Empirical);
  const MarkovKernel single = push_forward(as_para(f), PushMode::Empirical);
  const MarkovKernel markov = kernel_compose(single, single);
  return compare_samples(shared.sample_n(x, samples, stream.split(0)), markov.sample_n(x, samples, stream.split(1)));
}

DistributionDistanceReport independence_witness(const DeterministicMap& f, const DeterministicMap& f2,
                                                const SampleSpace& space, std::size_t samples,
                                                const SampleStream& stream) {
  if (f.in_dim != space.dim() || f2.in_dim != space.dim() || f.out_dim != 1 || f2.out_dim != 1)
    throw DimensionError("independence_witness: maps must be R^k -> R for the space's k");
  const auto n = static_cast<Eigen::Index>(samples);
  Mat joint(n, 2), product(n, 2);
  const SampleStream js = stream.split(0), ps = stream.split(1);
  for (Eigen::Index t = 0; t < n; ++t) {
    const auto ut = static_cast<std::uint64_t>(t);
    const OmegaVector w = sample_omega(space, 1, js.split(ut));
    const Eigen::Map<const Vec> wv(w.flat().data(), space.dim());
    joint(t, 0) = f(wv)[0];
    joint(t, 1) = f2(wv)[0];
    const OmegaVector w12 = sample_omega(space, 2, ps.split(ut));
    const Eigen::Map<const Vec> w1(w12.block(0).data(), space.dim());
    const Eigen::Map<const Vec> w2(w12.block(1).data(), space.dim());
    product(t, 0) = f(w1)[0];
    product(t, 1) = f2(w2)[0];
  }
  return compare_samples(joint, product);
}

}  // namespace stochcat
