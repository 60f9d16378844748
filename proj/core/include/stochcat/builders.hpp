#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "stochcat/arrows.hpp"

namespace stochcat {

/// Deterministic x -> A x + c (no omega blocks).
ParaArrow affine_map(const SampleSpace& space, const Mat& A, const Vec& c);

/// x -> A x + c + L z(omega), z standard normal through the inverse CDF of the
/// omega coordinates. Uses as many blocks as needed to drive rows(L) normals.
ParaArrow normal_noise(const SampleSpace& space, const Mat& A, const Vec& c, const Mat& scale);

/// x -> (x[indices[0]], x[indices[1]], ...).
ParaArrow projection(const SampleSpace& space, int in_dim, const std::vector<int>& indices);

/// x -> value, ignoring x.
ParaArrow constant(const SampleSpace& space, int in_dim, const Vec& value);

/// The scalar arrow f(omega, x) = loc - x + scale * Phi^-1(omega) used in the
/// composition demo (loc = 5, scale = 10).
ParaArrow demo_arrow(const SampleSpace& space, double loc = 5.0, double scale = 10.0);

/// Build a Para arrow from a JSON description.
///
///   {"kind": "affine", "A": [[..]], "c": [..]}
///   {"kind": "normal_noise", "A": [[..]], "c": [..], "scale": [[..]]}   // or "sd": number
///   {"kind": "projection", "in": a, "indices": [..]}
///   {"kind": "constant", "in": a, "value": [..]}
///   {"kind": "identity", "dim": a}
///   {"kind": "compose", "arrows": [f, g, ...]}   // data-flow order
///   {"kind": "tensor", "arrows": [f, g, ...]}
ParaArrow para_from_json(const nlohmann::json& desc, const SampleSpace& space);

/// The description an arrow was built from. Throws ParseError for arrows
/// assembled from opaque callables.
nlohmann::json to_json(const ParaArrow& arrow);

// Matrix/vector JSON helpers (row-major nested arrays).
Mat matrix_from_json(const nlohmann::json& j);
Vec vector_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Mat& m);
nlohmann::json to_json(const Vec& v);

}  // namespace stochcat
