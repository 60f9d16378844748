#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "stochcat/affine_gaussian.hpp"
#include "stochcat/sample_space.hpp"
#include "stochcat/types.hpp"

namespace stochcat {

/// A plain function R^a -> R^b.
struct DeterministicMap {
  int in_dim = 0;
  int out_dim = 0;
  std::function<Vec(const VecRef&)> fn;

  Vec operator()(const VecRef& x) const;
  static DeterministicMap identity(int dim);
};

/// Shared-randomness arrow f: Omega x R^a -> R^b. Composition feeds the
/// same omega to both factors.
class CoKlArrow {
 public:
  using Eval = std::function<Vec(std::span<const double> omega, const VecRef& x)>;

  CoKlArrow(SampleSpace space, int in_dim, int out_dim, Eval eval);

  /// (del_Omega (x) id): ignores omega.
  static CoKlArrow identity(SampleSpace space, int dim);

  Vec operator()(std::span<const double> omega, const VecRef& x) const;

  [[nodiscard]] int in_dim() const { return in_; }
  [[nodiscard]] int out_dim() const { return out_; }
  [[nodiscard]] const SampleSpace& space() const { return space_; }

 private:
  SampleSpace space_;
  int in_;
  int out_;
  Eval eval_;
};

/// Arrow f: Omega^n x R^a -> R^b whose omega blocks are private to it.
/// Optionally carries the affine-Gaussian triple of its pushforward.
class ParaArrow {
 public:
  using Eval = std::function<Vec(OmegaView omega, const VecRef& x)>;

  ParaArrow(SampleSpace space, int blocks, int in_dim, int out_dim, Eval eval,
            std::optional<GaussTriple> gaussian = std::nullopt,
            std::shared_ptr<const nlohmann::json> description = nullptr);

  static ParaArrow identity(SampleSpace space, int dim);

  /// Throws DimensionError unless omega has exactly blocks() blocks.
  Vec operator()(OmegaView omega, const VecRef& x) const;

  [[nodiscard]] int blocks() const { return blocks_; }
  [[nodiscard]] int in_dim() const { return in_; }
  [[nodiscard]] int out_dim() const { return out_; }
  [[nodiscard]] const SampleSpace& space() const { return space_; }
  [[nodiscard]] const std::optional<GaussTriple>& gaussian() const { return gaussian_; }
  [[nodiscard]] const std::shared_ptr<const nlohmann::json>& description() const { return description_; }

  /// Same evaluator, analytic structure and description dropped.
  [[nodiscard]] ParaArrow opaque() const;

 private:
  SampleSpace space_;
  int blocks_;
  int in_;
  int out_;
  Eval eval_;
  std::optional<GaussTriple> gaussian_;
  std::shared_ptr<const nlohmann::json> description_;
};

enum class StructureTag { Generic, GaussianAffine };

/// Parametric statistical model f: Omega^n x R^p x R^a -> R^b.
///
/// A GaussianAffine arrow also carries its N_mu layers, outermost first,
/// with the parameter vector laid out in the same order.
class DFArrow {
 public:
  using Eval = std::function<Vec(OmegaView omega, const VecRef& params, const VecRef& x)>;

  DFArrow(SampleSpace space, int blocks, int param_dim, int in_dim, int out_dim, Eval eval,
          std::vector<LayerPtr> gaussian_chain = {});

  static DFArrow identity(SampleSpace space, int dim);

  Vec operator()(OmegaView omega, const VecRef& params, const VecRef& x) const;

  [[nodiscard]] int blocks() const { return blocks_; }
  [[nodiscard]] int param_dim() const { return p_; }
  [[nodiscard]] int in_dim() const { return in_; }
  [[nodiscard]] int out_dim() const { return out_; }
  [[nodiscard]] const SampleSpace& space() const { return space_; }
  [[nodiscard]] StructureTag tag() const {
    return chain_.empty() ? StructureTag::Generic : StructureTag::GaussianAffine;
  }
  [[nodiscard]] const std::vector<LayerPtr>& gaussian_chain() const { return chain_; }

 private:
  SampleSpace space_;
  int blocks_;
  int p_;
  int in_;
  int out_;
  Eval eval_;
  std::vector<LayerPtr> chain_;
};

/// g after f, both reading the same omega.
CoKlArrow cokl_compose(const CoKlArrow& f, const CoKlArrow& g);

/// g after f on Omega^{n_g + n_f}; g's blocks come first.
ParaArrow para_compose(const ParaArrow& f, const ParaArrow& g);

/// f2 after f1; omega blocks and parameters are laid out (f2, f1).
DFArrow df_compose(const DFArrow& f1, const DFArrow& f2);

/// Componentwise product on R^(a+c) -> R^(b+d); f's blocks come first.
ParaArrow tensor(const ParaArrow& f, const ParaArrow& g);

/// Feeds one omega block to every one of f's n blocks.
CoKlArrow copy_functor(const ParaArrow& f);

/// The deterministic map f(omega, .).
DeterministicMap realize(const CoKlArrow& f, std::span<const double> omega);

/// A co-Kleisli arrow viewed as a Para arrow with a single block.
ParaArrow as_para(const CoKlArrow& f);

/// Embeds a Para arrow as a DF arrow with no parameters.
DFArrow promote(const ParaArrow& f);

/// Curries the parameter slot; the analytic triple is kept when f is GaussianAffine.
ParaArrow fix_params(const DFArrow& f, const VecRef& params);

/// Identity N_mu layer on R^dim (zero noise).
LayerPtr identity_layer(int dim);
/// A parameter-free layer with the given triple.
LayerPtr fixed_layer(GaussTriple triple);
/// Fold a chain at a (chain-ordered) parameter vector into one triple.
GaussTriple fold_chain(const std::vector<LayerPtr>& chain, const VecRef& params);

}  // namespace stochcat
