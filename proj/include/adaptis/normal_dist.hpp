#pragma once

namespace adaptis {

double normal_pdf(double x);
double normal_cdf(double x);
/// Upper tail 1 - Phi(x), accurate far into the tail.
double normal_sf(double x);
/// Inverse of Phi on (0, 1); relative error well below 1e-12 after refinement.
double normal_quantile(double p);

}  // namespace adaptis
