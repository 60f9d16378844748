#include "stochcat/tools/commands.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <fstream>
#include <stdexcept>

#include "stochcat/builders.hpp"
#include "stochcat/dataset.hpp"
#include "stochcat/errors.hpp"
#include "stochcat/kernels.hpp"
#include "stochcat/learn.hpp"
#include "stochcat/likelihood.hpp"
#include "stochcat/stats.hpp"
#include "stochcat/tools/corpus.hpp"

namespace stochcat::tools {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::size_t kMinSamples = 1000;
constexpr double kMomentZ = 3.0;
constexpr double kWitnessKs = 0.4;
constexpr double kLikelihoodTol = 1e-3;
constexpr int kLikelihoodGrid = 41;

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void write_json(const fs::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

void write_column(const fs::path& path, const Vec& values, const std::string& name) {
  auto out = open_out(path);
  write_samples_csv(out, values, {name});
}

json moments_json(const Vec& values) {
  const MomentSummary m = summarize(values);
  return {{"n", m.count},
          {"mean", m.mean},
          {"sd", m.sd},
          {"variance", m.variance},
          {"ks_vs_fitted_normal", ks_vs_fitted_normal(values)}};
}

json law_entry(const std::string& name, bool required, bool expected_divergence, bool passed, json stats) {
  return {{"name", name},
          {"required", required},
          {"expected_divergence", expected_divergence},
          {"passed", passed},
          {"stats", std::move(stats)}};
}

Vec draw_column(const Mat& draws) { return draws.col(0); }

}  // namespace

void validate_statistical(const RunConfig& cfg) {
  if (cfg.samples < kMinSamples)
    throw std::invalid_argument("--samples must be at least " + std::to_string(kMinSamples));
  if (!(cfg.ks_threshold > 0.0 && cfg.ks_threshold < 1.0)) throw std::invalid_argument("--ks-threshold must be in (0, 1)");
}

CommandResult cmd_compose_demo(const RunConfig& cfg) {
  validate_statistical(cfg);
  fs::create_directories(cfg.out_dir);
  const SampleSpace space{1, BaseMeasure::Uniform01};
  const SampleStream root(cfg.seed);
  const double x0 = cfg.x.value_or(42.0);
  const Vec x = Vec::Constant(1, x0);

  const ParaArrow f = demo_arrow(space);
  const ParaArrow ff = para_compose(f, f);
  const CoKlArrow copied = copy_functor(ff);

  const Vec alone = draw_column(push_forward(f, PushMode::Empirical).sample_n(x, cfg.samples, root.split(0)));
  const Vec para = draw_column(push_forward(ff.opaque(), PushMode::Empirical).sample_n(x, cfg.samples, root.split(1)));
  Vec copy(static_cast<Eigen::Index>(cfg.samples));
  const SampleStream copy_stream = root.split(2);
  for (std::size_t t = 0; t < cfg.samples; ++t) {
    const OmegaVector w = sample_omega(space, 1, copy_stream.split(t));
    copy[static_cast<Eigen::Index>(t)] = copied(w.block(0), x)[0];
  }

  write_column(cfg.out_dir / "f_alone.csv", alone, "y");
  write_column(cfg.out_dir / "para_composed.csv", para, "y");
  write_column(cfg.out_dir / "copy_composed.csv", copy, "y");

  const MomentSummary mp = summarize(para);
  const MomentSummary mc = summarize(copy);
  const double copy_sd = std::sqrt(mc.variance);
  const bool para_mean_ok = std::abs(mp.mean - x0) <= 0.15;
  const bool para_var_ok = std::abs(mp.variance - 200.0) <= 0.05 * 200.0;
  const bool copy_ok = copy_sd < 1e-9 && std::abs(mc.mean - x0) < 1e-9;

  CommandResult r;
  r.summary = {{"x", x0},
               {"seed", cfg.seed},
               {"samples", cfg.samples},
               {"f_alone", moments_json(alone)},
               {"para_composed", moments_json(para)},
               {"copy_composed", moments_json(copy)},
               {"checks",
                {{"para_mean_within_0.15", para_mean_ok},
                 {"para_variance_within_5pct_of_200", para_var_ok},
                 {"copy_constant", copy_ok}}}};
  r.exit_code = (para_mean_ok && para_var_ok && copy_ok) ? 0 : 1;
  write_json(cfg.out_dir / "summary.json", r.summary);
  return r;
}

CommandResult cmd_functor_check(const RunConfig& cfg) {
  validate_statistical(cfg);
  fs::create_directories(cfg.out_dir);
  const SampleStream root(cfg.seed);
  json laws = json::array();
  bool ok = true;
  auto add = [&](json entry) {
    if (entry["required"].get<bool>() && !entry["passed"].get<bool>()) ok = false;
    laws.push_back(std::move(entry));
  };

  const auto pairs = push_corpus();
  const SampleStream push_stream = root.split(0);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    const DistributionDistanceReport rep = check_push_functoriality(p.f, p.g, p.x, cfg.samples, push_stream.split(i));
    json stats = rep;
    add(law_entry("push_functoriality/" + p.name, true, false, rep.max_ks() < cfg.ks_threshold, std::move(stats)));
  }

  {
    const SampleSpace space{1, BaseMeasure::Uniform01};
    const CoKlArrow f = copy_functor(demo_arrow(space));
    const DistributionDistanceReport rep =
        check_cokl_nonfunctoriality(f, Vec::Constant(1, 42.0), cfg.samples, root.split(1));
    json stats = rep;
    add(law_entry("cokl_nonfunctoriality_witness", true, true, rep.max_ks() > kWitnessKs, std::move(stats)));
  }

  {
    const SampleSpace space{2, BaseMeasure::StdNormal};
    const DeterministicMap p0{2, 1, [](const VecRef& w) -> Vec { return w.head(1); }};
    const DeterministicMap p1{2, 1, [](const VecRef& w) -> Vec { return w.tail(1); }};
    const DistributionDistanceReport rep = independence_witness(p0, p1, space, cfg.samples, root.split(2));
    // Correlation of independent coordinates has standard error 1/sqrt(n).
    const double corr_tol = kMomentZ * std::sqrt(2.0 / static_cast<double>(cfg.samples));
    json stats = rep;
    add(law_entry("independence/coordinate_projections", true, false,
                  rep.max_ks() < cfg.ks_threshold && rep.max_abs_corr_diff() < corr_tol, std::move(stats)));
  }

  const auto chains = gaussian_chain_corpus(root.split(3));
  const SampleStream closure_stream = root.split(4);
  for (std::size_t i = 0; i < chains.size(); ++i) {
    const auto& c = chains[i];
    const GaussianLaw law = chain_law(c.arrow, c.params, c.x);
    const ParaArrow fixed = fix_params(c.arrow, c.params).opaque();
    const Mat draws = push_forward(fixed, PushMode::Empirical).sample_n(c.x, cfg.samples, closure_stream.split(i));
    double max_ks = 0.0, max_mean_z = 0.0, max_var_z = 0.0;
    for (Eigen::Index j = 0; j < draws.cols(); ++j) {
      const MomentSummary m = summarize(draws.col(j));
      const double var = law.cov(j, j);
      max_ks = std::max(max_ks, ks_vs_fitted_normal(draws.col(j)));
      const double mean_se = std::sqrt(var / static_cast<double>(cfg.samples));
      const double var_se = variance_standard_error(var, cfg.samples);
      max_mean_z = std::max(max_mean_z, var > 0.0 ? std::abs(m.mean - law.mean[j]) / mean_se
                                                  : (std::abs(m.mean - law.mean[j]) < 1e-9 ? 0.0 : INFINITY));
      max_var_z = std::max(max_var_z, var > 0.0 ? std::abs(m.variance - var) / var_se : (m.variance < 1e-18 ? 0.0 : INFINITY));
    }
    json stats = {{"ks_vs_fitted_normal", max_ks},
                  {"max_mean_z", max_mean_z},
                  {"max_variance_z", max_var_z},
                  {"analytic_mean", to_json(law.mean)},
                  {"analytic_cov", to_json(law.cov)}};
    add(law_entry("gaussian_closure/" + c.name, true, false,
                  max_ks < cfg.ks_threshold && max_mean_z < kMomentZ && max_var_z < kMomentZ, std::move(stats)));
  }

  {
    const NonClosureReport rep = nonclosure_example(SampleSpace{1, BaseMeasure::Uniform01}, cfg.samples, root.split(5));
    json stats = rep;
    add(law_entry("gaussian_nonclosure_example", false, false, std::abs(rep.scaled_noise_ratio - 4.0) < 0.2, std::move(stats)));
  }

  CommandResult r;
  r.summary = {{"seed", cfg.seed},
               {"samples", cfg.samples},
               {"ks_threshold", cfg.ks_threshold},
               {"all_required_passed", ok},
               {"laws", std::move(laws)}};
  r.exit_code = ok ? 0 : 1;
  write_json(cfg.out_dir / "functor_check.json", r.summary);
  return r;
}

Model parse_model(const json& j) {
  if (!j.is_object() || !j.contains("layers") || !j["layers"].is_array() || j["layers"].empty())
    throw ParseError("model: expected {\"layers\": [..], \"init\": [..]}");
  const SampleSpace space{1, BaseMeasure::Uniform01};
  std::vector<GaussianArrow> layers;
  for (const auto& desc : j["layers"]) layers.push_back(gaussian_from_json(desc, space));
  DFArrow arrow = chain_of(layers);
  Vec init = j.contains("init") ? vector_from_json(j["init"]) : Vec::Zero(arrow.param_dim());
  if (init.size() != arrow.param_dim())
    throw ParseError("model: init has " + std::to_string(init.size()) + " entries, the chain takes " +
                     std::to_string(arrow.param_dim()));
  return {std::move(layers), std::move(arrow), std::move(init)};
}

Model load_model(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read model file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("model file " + path.string() + ": " + e.what());
  }
  return parse_model(j);
}

CommandResult cmd_train(const RunConfig& cfg) {
  if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("--epsilon must be positive");
  if (cfg.iterations < 0) throw std::invalid_argument("--iterations must be nonnegative");
  fs::create_directories(cfg.out_dir);
  const Model model = load_model(cfg.model);
  const Dataset data = load_dataset_csv(cfg.data.string());
  const LearnConfig lc{cfg.epsilon, cfg.iterations};
  const Learner learner = backprop_functor(exp_functor(model.arrow), lc, model.init);
  const TrainResult res = train(learner, data, lc);

  CommandResult r;
  r.summary = {{"params", to_json(res.params)},
               {"initial_params", to_json(model.init)},
               {"final_loss", mean_error(learner, res.params, data)},
               {"residual_sd", residual_sd(learner, res.params, data)},
               {"epsilon", cfg.epsilon},
               {"iterations", cfg.iterations},
               {"rows", data.size()}};
  write_json(cfg.out_dir / "params.json", r.summary);
  auto out = open_out(cfg.out_dir / "trace.csv");
  out << "pass,loss\n";
  for (std::size_t i = 0; i < res.trace.size(); ++i) out << (i + 1) << ',' << format_double(res.trace[i]) << '\n';
  return r;
}

CommandResult cmd_likelihood(const RunConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  const Model model = load_model(cfg.model);
  const DFArrow& f = model.arrow;
  const Vec& params = model.init;
  const Vec x = f.in_dim() == 1 && cfg.x ? Vec::Constant(1, *cfg.x) : Vec::Zero(f.in_dim());

  const LikelihoodFn direct = likelihood_of(f);
  const GaussianLaw law = chain_law(f, params, x);
  const int b = f.out_dim();

  // Composites of the per-layer likelihoods, in closed form and by quadrature.
  std::vector<LikelihoodFn> per_layer;
  for (const auto& g : model.layers) per_layer.push_back(likelihood_of(g));
  LikelihoodFn closed = per_layer.front();
  for (std::size_t i = 1; i < per_layer.size(); ++i) closed = likelihood_compose(closed, per_layer[i]);
  std::optional<LikelihoodFn> quad;
  const bool scalar_chain = std::all_of(model.layers.begin(), model.layers.end(),
                                        [](const GaussianArrow& g) { return g.out_dim() == 1; });
  if (per_layer.size() > 1 && scalar_chain) {
    quad = per_layer.front();
    for (std::size_t i = 1; i < per_layer.size(); ++i)
      quad = likelihood_compose(*quad, per_layer[i], ComposeMethod::Quadrature);
  }

  // Tabulate along coordinate 0 through the mean, +-4 sd.
  const double sd0 = std::sqrt(law.cov(0, 0));
  auto out = open_out(cfg.out_dir / "likelihood.csv");
  out << "y0,density,log_density,composed_closed_form" << (quad ? ",composed_quadrature" : "") << '\n';
  double closed_dev = 0.0, quad_dev = 0.0;
  std::optional<ScalarDensity> quad_density;
  if (quad) quad_density = quad->bind(params)(x);
  for (int i = 0; i < kLikelihoodGrid; ++i) {
    Vec y = law.mean;
    y[0] += sd0 * (-4.0 + 8.0 * i / (kLikelihoodGrid - 1));
    const double d = direct.density(params, x, y);
    const double ld = direct.log_density(params, x, y);
    const double dc = closed.density(params, x, y);
    closed_dev = std::max(closed_dev, std::abs(dc - d) / d);
    out << format_double(y[0]) << ',' << format_double(d) << ',' << format_double(ld) << ',' << format_double(dc);
    if (quad_density) {
      const double dq = (*quad_density)(y[0]);
      quad_dev = std::max(quad_dev, std::abs(dq - d) / d);
      out << ',' << format_double(dq);
    }
    out << '\n';
  }

  const double mode_density = direct.density(params, x, law.mean);
  const double mode_expected =
      std::pow(2.0 * std::numbers::pi, -0.5 * b) / std::sqrt(law.cov.determinant());
  json norms = json::array();
  bool norm_ok = true;
  if (b == 1) {
    const double n = normalization(direct, params, x);
    norm_ok = std::abs(n - 1.0) < kLikelihoodTol;
    norms.push_back({{"model", "chain"}, {"integral", n}});
    if (quad) {
      const double nq = normalization(*quad, params, x);
      norm_ok = norm_ok && std::abs(nq - 1.0) < kLikelihoodTol;
      norms.push_back({{"model", "chain_quadrature"}, {"integral", nq}});
    }
  }
  const bool closed_ok = closed_dev < 1e-9;
  const bool quad_ok = !quad || quad_dev < kLikelihoodTol;
  const bool mode_ok = std::abs(mode_density - mode_expected) <= 1e-9 * mode_expected;

  CommandResult r;
  r.summary = {{"x", to_json(x)},
               {"params", to_json(params)},
               {"mean", to_json(law.mean)},
               {"cov", to_json(law.cov)},
               {"density_at_mode", mode_density},
               {"closed_form_mode_density", mode_expected},
               {"semifunctor_closed_form_max_rel_deviation", closed_dev},
               {"normalization", norms},
               {"checks",
                {{"mode_density", mode_ok},
                 {"semifunctor_closed_form", closed_ok},
                 {"semifunctor_quadrature", quad_ok},
                 {"normalization", norm_ok}}}};
  if (quad) r.summary["semifunctor_quadrature_max_rel_deviation"] = quad_dev;
  r.exit_code = (mode_ok && closed_ok && quad_ok && norm_ok) ? 0 : 1;
  write_json(cfg.out_dir / "likelihood_summary.json", r.summary);
  return r;
}

CommandResult cmd_synth(const RunConfig& cfg) {
  if (cfg.data.empty()) throw std::invalid_argument("--data is required");
  if (cfg.data.has_parent_path()) fs::create_directories(cfg.data.parent_path());
  const Dataset d = synthetic_regression(1000, 2.0, 1.0, 0.5, SampleStream(cfg.seed));
  auto out = open_out(cfg.data);
  write_dataset_csv(out, d);
  CommandResult r;
  r.summary = {{"rows", d.size()}, {"path", cfg.data.string()}};
  return r;
}

}  // namespace stochcat::tools
