#include <string>

#include "stochcat/builders.hpp"
#include "stochcat/errors.hpp"

namespace stochcat {
namespace {

using nlohmann::json;

std::shared_ptr<const json> share(json j) { return std::make_shared<const json>(std::move(j)); }

const json& field(const json& desc, const char* key) {
  if (!desc.is_object() || !desc.contains(key))
    throw ParseError(std::string("arrow description is missing \"") + key + "\"");
  return desc.at(key);
}

}  // namespace

Mat matrix_from_json(const json& j) {
  if (!j.is_array()) throw ParseError("matrix must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j.at(0).size());
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j.at(static_cast<std::size_t>(r));
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) throw ParseError("matrix rows have unequal length");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

Vec vector_from_json(const json& j) {
  if (j.is_number()) return Vec::Constant(1, j.get<double>());
  if (!j.is_array()) throw ParseError("vector must be an array of numbers");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = j.at(static_cast<std::size_t>(i)).get<double>();
  return v;
}

json to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const Vec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

ParaArrow affine_map(const SampleSpace& space, const Mat& A, const Vec& c) {
  if (A.rows() != c.size()) throw DimensionError("affine_map: rows(A) != size(c)");
  const int a = static_cast<int>(A.cols()), b = static_cast<int>(A.rows());
  return {space, 0, a, b, [A, c](OmegaView, const VecRef& x) -> Vec { return A * x + c; },
          GaussTriple::deterministic(A, c), share(json{{"kind", "affine"}, {"A", to_json(A)}, {"c", to_json(c)}})};
}

ParaArrow normal_noise(const SampleSpace& space, const Mat& A, const Vec& c, const Mat& scale) {
  if (A.rows() != c.size() || scale.rows() != c.size()) throw DimensionError("normal_noise: inconsistent dimensions");
  const int a = static_cast<int>(A.cols()), b = static_cast<int>(A.rows());
  const int z = static_cast<int>(scale.cols());
  const int blocks = noise_blocks_for(space, z);
  GaussTriple triple{A, c, scale * scale.transpose()};
  return {space,
          blocks,
          a,
          b,
          [A, c, scale, space, z](OmegaView omega, const VecRef& x) -> Vec {
            Vec normals(z);
            standard_normals(space, omega, normals);
            return A * x + c + scale * normals;
          },
          std::move(triple),
          share(json{{"kind", "normal_noise"}, {"A", to_json(A)}, {"c", to_json(c)}, {"scale", to_json(scale)}})};
}

ParaArrow projection(const SampleSpace& space, int in_dim, const std::vector<int>& indices) {
  const int b = static_cast<int>(indices.size());
  Mat P = Mat::Zero(b, in_dim);
  for (int i = 0; i < b; ++i) {
    if (indices[static_cast<std::size_t>(i)] < 0 || indices[static_cast<std::size_t>(i)] >= in_dim)
      throw DimensionError("projection: index out of range");
    P(i, indices[static_cast<std::size_t>(i)]) = 1.0;
  }
  return {space, 0, in_dim, b,
          [indices, b](OmegaView, const VecRef& x) -> Vec {
            Vec y(b);
            for (int i = 0; i < b; ++i) y[i] = x[indices[static_cast<std::size_t>(i)]];
            return y;
          },
          GaussTriple::deterministic(P, Vec::Zero(b)),
          share(json{{"kind", "projection"}, {"in", in_dim}, {"indices", indices}})};
}

ParaArrow constant(const SampleSpace& space, int in_dim, const Vec& value) {
  const auto b = value.size();
  return {space, 0, in_dim, static_cast<int>(b), [value](OmegaView, const VecRef&) -> Vec { return value; },
          GaussTriple::deterministic(Mat::Zero(b, in_dim), value),
          share(json{{"kind", "constant"}, {"in", in_dim}, {"value", to_json(value)}})};
}

ParaArrow demo_arrow(const SampleSpace& space, double loc, double scale) {
  return normal_noise(space, Mat::Constant(1, 1, -1.0), Vec::Constant(1, loc), Mat::Constant(1, 1, scale));
}

ParaArrow para_from_json(const json& desc, const SampleSpace& space) {
  const std::string kind = field(desc, "kind").get<std::string>();
  if (kind == "affine") return affine_map(space, matrix_from_json(field(desc, "A")), vector_from_json(field(desc, "c")));
  if (kind == "normal_noise") {
    const Mat A = matrix_from_json(field(desc, "A"));
    const Vec c = vector_from_json(field(desc, "c"));
    Mat scale;
    if (desc.contains("scale"))
      scale = matrix_from_json(desc.at("scale"));
    else
      scale = field(desc, "sd").get<double>() * Mat::Identity(c.size(), c.size());
    return normal_noise(space, A, c, scale);
  }
  if (kind == "projection")
    return projection(space, field(desc, "in").get<int>(), field(desc, "indices").get<std::vector<int>>());
  if (kind == "constant") return constant(space, field(desc, "in").get<int>(), vector_from_json(field(desc, "value")));
  if (kind == "identity") return ParaArrow::identity(space, field(desc, "dim").get<int>());
  if (kind == "compose" || kind == "tensor") {
    const json& parts = field(desc, "arrows");
    if (!parts.is_array() || parts.empty()) throw ParseError(kind + ": \"arrows\" must be a non-empty array");
    ParaArrow acc = para_from_json(parts.at(0), space);
    for (std::size_t i = 1; i < parts.size(); ++i) {
      ParaArrow next = para_from_json(parts.at(i), space);
      acc = kind == "compose" ? para_compose(acc, next) : tensor(acc, next);
    }
    return acc;
  }
  throw ParseError("unknown arrow kind \"" + kind + "\"");
}

json to_json(const ParaArrow& arrow) {
  if (!arrow.description()) throw ParseError("arrow was built from an opaque callable and has no description");
  return *arrow.description();
}

}  // namespace stochcat
