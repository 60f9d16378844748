#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "stochcat/types.hpp"

namespace stochcat {

/// Rows (x_a, x_b) with uniform dimensions; inputs and targets are n x a and n x b.
struct Dataset {
  Mat inputs;
  Mat targets;

  Dataset() = default;
  Dataset(Mat inputs, Mat targets);

  [[nodiscard]] Eigen::Index size() const { return inputs.rows(); }
  [[nodiscard]] int in_dim() const { return static_cast<int>(inputs.cols()); }
  [[nodiscard]] int out_dim() const { return static_cast<int>(targets.cols()); }
  [[nodiscard]] Vec input(Eigen::Index i) const { return inputs.row(i).transpose(); }
  [[nodiscard]] Vec target(Eigen::Index i) const { return targets.row(i).transpose(); }
};

/// Dataset with every row appended `times` times.
Dataset repeat(const Dataset& data, int times);

/// CSV with header x0,..,x{a-1},y0,..,y{b-1}.
Dataset read_dataset_csv(std::istream& in);
Dataset load_dataset_csv(const std::string& path);
void write_dataset_csv(std::ostream& out, const Dataset& data);

/// Shortest round-trip decimal representation.
std::string format_double(double value);

/// One row per draw, columns named by `header`.
void write_samples_csv(std::ostream& out, const MatRef& draws, const std::vector<std::string>& header);

}  // namespace stochcat
