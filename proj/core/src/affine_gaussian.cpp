#include "stochcat/affine_gaussian.hpp"

#include <cmath>
#include <string>

#include "stochcat/errors.hpp"
#include "stochcat/special.hpp"

namespace stochcat {

double min_eigenvalue(const MatRef& cov) {
  if (cov.size() == 0) return 0.0;
  const Mat sym = 0.5 * (cov + cov.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Mat enforce_psd(const MatRef& cov) {
  if (cov.rows() != cov.cols()) throw DimensionError("covariance must be square");
  if (cov.size() == 0) return Mat(0, 0);
  if (!cov.allFinite()) throw CovarianceError("covariance has non-finite entries");
  Mat sym = 0.5 * (cov + cov.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  const Vec& ev = es.eigenvalues();
  if (ev.minCoeff() < -kPsdTolerance)
    throw CovarianceError("covariance is not positive semidefinite (min eigenvalue " + std::to_string(ev.minCoeff()) +
                          ")");
  if (ev.minCoeff() >= 0.0) return sym;
  const Vec clipped = ev.cwiseMax(0.0);
  return es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
}

Mat psd_factor(const MatRef& cov) {
  const Eigen::Index n = cov.rows();
  if (n == 0) return Mat(0, 0);
  if (cov.isZero(0.0)) return Mat::Zero(n, n);
  const Mat sym = enforce_psd(cov);
  Eigen::LLT<Mat> llt(sym);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::LLT<Mat> jittered(sym + 1e-12 * Mat::Identity(n, n));
  if (jittered.info() == Eigen::Success) return jittered.matrixL();
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

GaussianLaw GaussianLaw::dirac(const VecRef& at) { return {at, Mat::Zero(at.size(), at.size())}; }

GaussianLaw GaussTriple::law_at(const VecRef& x) const {
  if (x.size() != in_dim()) throw DimensionError("GaussTriple::law_at: input dimension mismatch");
  return {M * x + s, cov};
}

GaussTriple GaussTriple::identity(Eigen::Index dim) {
  return {Mat::Identity(dim, dim), Vec::Zero(dim), Mat::Zero(dim, dim)};
}

GaussTriple GaussTriple::deterministic(Mat M, Vec s) {
  const Eigen::Index b = M.rows();
  return {std::move(M), std::move(s), Mat::Zero(b, b)};
}

GaussTriple compose(const GaussTriple& inner, const GaussTriple& outer) {
  if (inner.out_dim() != outer.in_dim())
    throw DimensionError("GaussTriple compose: " + std::to_string(inner.out_dim()) + " -> " +
                         std::to_string(outer.in_dim()));
  return {outer.M * inner.M, outer.M * inner.s + outer.s, outer.M * inner.cov * outer.M.transpose() + outer.cov};
}

GaussTriple tensor(const GaussTriple& first, const GaussTriple& second) {
  const Eigen::Index b1 = first.out_dim(), b2 = second.out_dim();
  const Eigen::Index a1 = first.in_dim(), a2 = second.in_dim();
  GaussTriple out{Mat::Zero(b1 + b2, a1 + a2), Vec(b1 + b2), Mat::Zero(b1 + b2, b1 + b2)};
  out.M.topLeftCorner(b1, a1) = first.M;
  out.M.bottomRightCorner(b2, a2) = second.M;
  out.s << first.s, second.s;
  out.cov.topLeftCorner(b1, b1) = first.cov;
  out.cov.bottomRightCorner(b2, b2) = second.cov;
  return out;
}

GaussianLaw propagate(const GaussianLaw& input, const GaussTriple& outer) {
  if (input.dim() != outer.in_dim()) throw DimensionError("propagate: law dimension mismatch");
  return {outer.M * input.mean + outer.s, outer.M * input.cov * outer.M.transpose() + outer.cov};
}

Vec AffineGaussianLayer::mean(const VecRef& params, const VecRef& x) const {
  if (params.size() != param_dim || x.size() != in_dim) throw DimensionError("Gaussian layer: argument dimension mismatch");
  const AffineCoefficients co = coefficients(params);
  return co.A * x + co.c + noise_mean;
}

GaussTriple AffineGaussianLayer::at(const VecRef& params) const {
  if (params.size() != param_dim) throw DimensionError("Gaussian layer: parameter dimension mismatch");
  AffineCoefficients co = coefficients(params);
  return {std::move(co.A), co.c + noise_mean, noise_cov(params)};
}

void standard_normals(const SampleSpace& space, OmegaView omega, Eigen::Ref<Vec> out) {
  const auto flat = omega.flat();
  if (flat.size() < static_cast<std::size_t>(out.size()))
    throw DimensionError("not enough omega coordinates to drive the requested noise");
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const double w = flat[static_cast<std::size_t>(i)];
    out[i] = space.measure() == BaseMeasure::Uniform01 ? normal_quantile(w) : w;
  }
}

int noise_blocks_for(const SampleSpace& space, int dim) { return (dim + space.dim() - 1) / space.dim(); }

}  // namespace stochcat
