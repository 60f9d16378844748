#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "stochcat/arrows.hpp"
#include "stochcat/gaussian.hpp"

namespace stochcat::tools {

struct RunConfig {
  std::uint64_t seed = 20240917;
  std::size_t samples = 100000;
  double ks_threshold = 0.02;
  double epsilon = 0.01;
  int iterations = 200;
  std::filesystem::path out_dir = ".";
  std::filesystem::path model;
  std::filesystem::path data;
  std::optional<double> x;
};

/// Checks a config against the needs of a statistical command; throws
/// std::invalid_argument with the reason.
void validate_statistical(const RunConfig& cfg);

struct CommandResult {
  /// 0 iff every required check passed.
  int exit_code = 0;
  nlohmann::json summary;
};

/// Samples f(w, x) = 5 - x + 10 Phi^-1(w) at x = 42 (or cfg.x): f alone, its
/// Para self-composite and the Copy-collapsed self-composite. Writes
/// f_alone.csv, para_composed.csv, copy_composed.csv and summary.json.
CommandResult cmd_compose_demo(const RunConfig& cfg);

/// Push functoriality over the pair corpus, the shared-omega witness (required
/// to diverge), the projection independence witness and Gaussian closure.
/// Writes functor_check.json.
CommandResult cmd_functor_check(const RunConfig& cfg);

/// Trains Exp of the model chain with the square-error learner. Writes
/// params.json and trace.csv.
CommandResult cmd_train(const RunConfig& cfg);

/// Tabulates L and log L of the model chain, checks normalization and the
/// composition law against quadrature. Writes likelihood.csv and
/// likelihood_summary.json.
CommandResult cmd_likelihood(const RunConfig& cfg);

/// Writes the synthetic regression dataset (y = 2x + 1 + N(0, 0.25)) to cfg.data.
CommandResult cmd_synth(const RunConfig& cfg);

/// Model file: {"layers": [layer, ...], "init": [..]}; layers in data-flow order.
struct Model {
  std::vector<GaussianArrow> layers;
  DFArrow arrow;
  Vec init;
};
Model load_model(const std::filesystem::path& path);
Model parse_model(const nlohmann::json& j);

}  // namespace stochcat::tools
