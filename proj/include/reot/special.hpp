// Scalar special functions used by the distribution layer.
#pragma once

namespace reot {

// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
// Series expansion for x < a + 1, Lentz continued fraction otherwise;
// relative accuracy around 1e-14 on the parameter ranges we use.
double regularized_gamma_p(double a, double x);

// Standard normal cdf, evaluated through erfc to keep the lower tail accurate.
double normal_cdf(double z);

}  // namespace reot
