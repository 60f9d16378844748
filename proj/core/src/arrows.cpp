#include "stochcat/arrows.hpp"

#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "stochcat/errors.hpp"

namespace stochcat {
namespace {

void require_same_space(const SampleSpace& a, const SampleSpace& b, const char* op) {
  if (!(a == b)) throw DimensionError(std::string(op) + ": arrows live over different sample spaces");
}

void require_composable(int out, int in, const char* op) {
  if (out != in)
    throw DimensionError(std::string(op) + ": output dimension " + std::to_string(out) +
                         " does not match input dimension " + std::to_string(in));
}

void check_output(const Vec& y, int expected, const char* who) {
  if (y.size() != expected)
    throw DimensionError(std::string(who) + ": evaluator returned " + std::to_string(y.size()) +
                         " coordinates, expected " + std::to_string(expected));
}

}  // namespace

Vec DeterministicMap::operator()(const VecRef& x) const {
  if (x.size() != in_dim) throw DimensionError("DeterministicMap: input dimension mismatch");
  Vec y = fn(x);
  check_output(y, out_dim, "DeterministicMap");
  return y;
}

DeterministicMap DeterministicMap::identity(int dim) {
  return {dim, dim, [](const VecRef& x) -> Vec { return x; }};
}

// ---- CoKl ----------------------------------------------------------------

CoKlArrow::CoKlArrow(SampleSpace space, int in_dim, int out_dim, Eval eval)
    : space_(space), in_(in_dim), out_(out_dim), eval_(std::move(eval)) {
  if (in_dim < 0 || out_dim < 0) throw DimensionError("CoKlArrow: negative dimension");
}

CoKlArrow CoKlArrow::identity(SampleSpace space, int dim) {
  return {space, dim, dim, [](std::span<const double>, const VecRef& x) -> Vec { return x; }};
}

Vec CoKlArrow::operator()(std::span<const double> omega, const VecRef& x) const {
  if (omega.size() != static_cast<std::size_t>(space_.dim())) throw DimensionError("CoKlArrow: omega block has wrong length");
  if (x.size() != in_) throw DimensionError("CoKlArrow: input dimension mismatch");
  Vec y = eval_(omega, x);
  check_output(y, out_, "CoKlArrow");
  return y;
}

CoKlArrow cokl_compose(const CoKlArrow& f, const CoKlArrow& g) {
  require_same_space(f.space(), g.space(), "cokl_compose");
  require_composable(f.out_dim(), g.in_dim(), "cokl_compose");
  return {f.space(), f.in_dim(), g.out_dim(),
          [f, g](std::span<const double> omega, const VecRef& x) -> Vec { return g(omega, f(omega, x)); }};
}

DeterministicMap realize(const CoKlArrow& f, std::span<const double> omega) {
  if (omega.size() != static_cast<std::size_t>(f.space().dim())) throw DimensionError("realize: omega block has wrong length");
  std::vector<double> fixed(omega.begin(), omega.end());
  return {f.in_dim(), f.out_dim(), [f, fixed = std::move(fixed)](const VecRef& x) -> Vec { return f(fixed, x); }};
}

// ---- Para ----------------------------------------------------------------

ParaArrow::ParaArrow(SampleSpace space, int blocks, int in_dim, int out_dim, Eval eval,
                     std::optional<GaussTriple> gaussian, std::shared_ptr<const nlohmann::json> description)
    : space_(space),
      blocks_(blocks),
      in_(in_dim),
      out_(out_dim),
      eval_(std::move(eval)),
      gaussian_(std::move(gaussian)),
      description_(std::move(description)) {
  if (blocks < 0 || in_dim < 0 || out_dim < 0) throw DimensionError("ParaArrow: negative dimension");
  if (gaussian_ && (gaussian_->in_dim() != in_dim || gaussian_->out_dim() != out_dim))
    throw DimensionError("ParaArrow: Gaussian triple does not match the arrow's dimensions");
}

ParaArrow ParaArrow::identity(SampleSpace space, int dim) {
  auto desc = std::make_shared<const nlohmann::json>(nlohmann::json{{"kind", "identity"}, {"dim", dim}});
  return {space, 0, dim, dim, [](OmegaView, const VecRef& x) -> Vec { return x; }, GaussTriple::identity(dim),
          std::move(desc)};
}

Vec ParaArrow::operator()(OmegaView omega, const VecRef& x) const {
  if (omega.blocks() != static_cast<std::size_t>(blocks_))
    throw DimensionError("ParaArrow: expected " + std::to_string(blocks_) + " omega blocks, got " +
                         std::to_string(omega.blocks()));
  if (blocks_ > 0 && omega.block_dim() != space_.dim()) throw DimensionError("ParaArrow: omega block has wrong length");
  if (x.size() != in_) throw DimensionError("ParaArrow: input dimension mismatch");
  Vec y = eval_(omega, x);
  check_output(y, out_, "ParaArrow");
  return y;
}

ParaArrow ParaArrow::opaque() const { return {space_, blocks_, in_, out_, eval_}; }

ParaArrow para_compose(const ParaArrow& f, const ParaArrow& g) {
  require_same_space(f.space(), g.space(), "para_compose");
  require_composable(f.out_dim(), g.in_dim(), "para_compose");
  const auto ng = static_cast<std::size_t>(g.blocks());
  const auto nf = static_cast<std::size_t>(f.blocks());
  std::optional<GaussTriple> triple;
  if (f.gaussian() && g.gaussian()) triple = compose(*f.gaussian(), *g.gaussian());
  std::shared_ptr<const nlohmann::json> desc;
  if (f.description() && g.description())
    desc = std::make_shared<const nlohmann::json>(
        nlohmann::json{{"kind", "compose"}, {"arrows", nlohmann::json::array({*f.description(), *g.description()})}});
  return {f.space(),
          g.blocks() + f.blocks(),
          f.in_dim(),
          g.out_dim(),
          [f, g, ng, nf](OmegaView omega, const VecRef& x) -> Vec {
            return g(omega.sub(0, ng), f(omega.sub(ng, nf), x));
          },
          std::move(triple),
          std::move(desc)};
}

ParaArrow tensor(const ParaArrow& f, const ParaArrow& g) {
  require_same_space(f.space(), g.space(), "tensor");
  const auto nf = static_cast<std::size_t>(f.blocks());
  const auto ng = static_cast<std::size_t>(g.blocks());
  const int a = f.in_dim(), c = g.in_dim();
  const int b = f.out_dim(), d = g.out_dim();
  std::optional<GaussTriple> triple;
  if (f.gaussian() && g.gaussian()) triple = stochcat::tensor(*f.gaussian(), *g.gaussian());
  std::shared_ptr<const nlohmann::json> desc;
  if (f.description() && g.description())
    desc = std::make_shared<const nlohmann::json>(
        nlohmann::json{{"kind", "tensor"}, {"arrows", nlohmann::json::array({*f.description(), *g.description()})}});
  return {f.space(),
          f.blocks() + g.blocks(),
          a + c,
          b + d,
          [f, g, nf, ng, a, c, b, d](OmegaView omega, const VecRef& x) -> Vec {
            Vec y(b + d);
            y.head(b) = f(omega.sub(0, nf), x.head(a));
            y.tail(d) = g(omega.sub(nf, ng), x.tail(c));
            return y;
          },
          std::move(triple),
          std::move(desc)};
}

CoKlArrow copy_functor(const ParaArrow& f) {
  const auto n = static_cast<std::size_t>(f.blocks());
  return {f.space(), f.in_dim(), f.out_dim(), [f, n](std::span<const double> omega, const VecRef& x) -> Vec {
            return f(OmegaVector::repeated(omega, n), x);
          }};
}

ParaArrow as_para(const CoKlArrow& f) {
  return {f.space(), 1, f.in_dim(), f.out_dim(),
          [f](OmegaView omega, const VecRef& x) -> Vec { return f(omega.block(0), x); }};
}

// ---- DF ------------------------------------------------------------------

LayerPtr identity_layer(int dim) {
  auto layer = std::make_shared<AffineGaussianLayer>();
  layer->param_dim = 0;
  layer->in_dim = dim;
  layer->out_dim = dim;
  layer->coefficients = [dim](const VecRef&) { return AffineCoefficients{Mat::Identity(dim, dim), Vec::Zero(dim)}; };
  layer->noise_cov = [dim](const VecRef&) -> Mat { return Mat::Zero(dim, dim); };
  layer->noise_mean = Vec::Zero(dim);
  layer->param_jacobian = [dim](const VecRef&, const VecRef&) -> Mat { return Mat(dim, 0); };
  return layer;
}

LayerPtr fixed_layer(GaussTriple triple) {
  auto layer = std::make_shared<AffineGaussianLayer>();
  const int a = static_cast<int>(triple.in_dim());
  const int b = static_cast<int>(triple.out_dim());
  layer->param_dim = 0;
  layer->in_dim = a;
  layer->out_dim = b;
  layer->coefficients = [M = triple.M, s = triple.s](const VecRef&) { return AffineCoefficients{M, s}; };
  layer->noise_cov = [C = enforce_psd(triple.cov)](const VecRef&) -> Mat { return C; };
  layer->noise_mean = Vec::Zero(b);
  layer->param_jacobian = [b](const VecRef&, const VecRef&) -> Mat { return Mat(b, 0); };
  return layer;
}

GaussTriple fold_chain(const std::vector<LayerPtr>& chain, const VecRef& params) {
  if (chain.empty()) throw DimensionError("fold_chain: empty chain");
  Eigen::Index total = 0;
  for (const auto& l : chain) total += l->param_dim;
  if (params.size() != total) throw DimensionError("fold_chain: parameter dimension mismatch");
  // Parameters are laid out outermost-first; walk from the innermost layer.
  Eigen::Index offset = total;
  GaussTriple acc;
  bool first = true;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    const auto& layer = **it;
    offset -= layer.param_dim;
    GaussTriple t = layer.at(params.segment(offset, layer.param_dim));
    acc = first ? std::move(t) : compose(acc, t);
    first = false;
  }
  return acc;
}

DFArrow::DFArrow(SampleSpace space, int blocks, int param_dim, int in_dim, int out_dim, Eval eval,
                 std::vector<LayerPtr> gaussian_chain)
    : space_(space),
      blocks_(blocks),
      p_(param_dim),
      in_(in_dim),
      out_(out_dim),
      eval_(std::move(eval)),
      chain_(std::move(gaussian_chain)) {
  if (blocks < 0 || param_dim < 0 || in_dim < 0 || out_dim < 0) throw DimensionError("DFArrow: negative dimension");
  if (!chain_.empty()) {
    int p = 0;
    for (const auto& l : chain_) p += l->param_dim;
    if (p != param_dim || chain_.front()->out_dim != out_dim || chain_.back()->in_dim != in_dim)
      throw DimensionError("DFArrow: Gaussian chain does not match the arrow's dimensions");
    for (std::size_t i = 0; i + 1 < chain_.size(); ++i)
      if (chain_[i]->in_dim != chain_[i + 1]->out_dim) throw DimensionError("DFArrow: Gaussian chain is not composable");
  }
}

DFArrow DFArrow::identity(SampleSpace space, int dim) {
  return {space, 0, 0, dim, dim, [](OmegaView, const VecRef&, const VecRef& x) -> Vec { return x; },
          {identity_layer(dim)}};
}

Vec DFArrow::operator()(OmegaView omega, const VecRef& params, const VecRef& x) const {
  if (omega.blocks() != static_cast<std::size_t>(blocks_))
    throw DimensionError("DFArrow: expected " + std::to_string(blocks_) + " omega blocks, got " +
                         std::to_string(omega.blocks()));
  if (params.size() != p_) throw DimensionError("DFArrow: parameter dimension mismatch");
  if (x.size() != in_) throw DimensionError("DFArrow: input dimension mismatch");
  Vec y = eval_(omega, params, x);
  check_output(y, out_, "DFArrow");
  return y;
}

DFArrow df_compose(const DFArrow& f1, const DFArrow& f2) {
  require_same_space(f1.space(), f2.space(), "df_compose");
  require_composable(f1.out_dim(), f2.in_dim(), "df_compose");
  const auto n2 = static_cast<std::size_t>(f2.blocks());
  const auto n1 = static_cast<std::size_t>(f1.blocks());
  const Eigen::Index p2 = f2.param_dim(), p1 = f1.param_dim();
  std::vector<LayerPtr> chain;
  if (f1.tag() == StructureTag::GaussianAffine && f2.tag() == StructureTag::GaussianAffine) {
    chain = f2.gaussian_chain();
    chain.insert(chain.end(), f1.gaussian_chain().begin(), f1.gaussian_chain().end());
  }
  return {f1.space(),
          f2.blocks() + f1.blocks(),
          f2.param_dim() + f1.param_dim(),
          f1.in_dim(),
          f2.out_dim(),
          [f1, f2, n2, n1, p2, p1](OmegaView omega, const VecRef& params, const VecRef& x) -> Vec {
            return f2(omega.sub(0, n2), params.head(p2), f1(omega.sub(n2, n1), params.tail(p1), x));
          },
          std::move(chain)};
}

DFArrow promote(const ParaArrow& f) {
  std::vector<LayerPtr> chain;
  if (f.gaussian()) chain.push_back(fixed_layer(*f.gaussian()));
  return {f.space(), f.blocks(), 0, f.in_dim(), f.out_dim(),
          [f](OmegaView omega, const VecRef&, const VecRef& x) -> Vec { return f(omega, x); }, std::move(chain)};
}

ParaArrow fix_params(const DFArrow& f, const VecRef& params) {
  if (params.size() != f.param_dim())
    throw DimensionError("fix_params: expected " + std::to_string(f.param_dim()) + " parameters, got " +
                         std::to_string(params.size()));
  std::optional<GaussTriple> triple;
  if (f.tag() == StructureTag::GaussianAffine) triple = fold_chain(f.gaussian_chain(), params);
  Vec fixed = params;
  return {f.space(), f.blocks(), f.in_dim(), f.out_dim(),
          [f, fixed = std::move(fixed)](OmegaView omega, const VecRef& x) -> Vec { return f(omega, fixed, x); },
          std::move(triple)};
}

}  // namespace stochcat
