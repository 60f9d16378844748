#pragma once

namespace stochcat {

/// Standard normal CDF.
double normal_cdf(double z);

/// Inverse standard normal CDF on the open interval (0, 1).
/// Returns -inf / +inf at the endpoints and NaN outside [0, 1].
double normal_quantile(double p);

/// Standard normal density.
double normal_pdf(double z);

}  // namespace stochcat
