#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "adaptis/family.hpp"

namespace adaptis {

struct DualityResult {
    double maxmin = 0.0;  // max_theta min_alpha V / f'^2
    double minmax = 0.0;  // min_alpha max_theta V / f'^2
    double mc_error = 0.0;  // standard error attached to the two optima (0 for closed forms)
    std::size_t argmax_theta = 0;
    std::size_t argmin_alpha = 0;
    bool holds() const { return maxmin <= minmax + 3.0 * mc_error; }
};

using VarianceSurface = std::function<double(double theta, double alpha)>;

/// Exhaustive grid evaluation of a scaled-variance surface.
DualityResult duality_demo(const std::vector<double>& grid_theta, const std::vector<double>& grid_alpha,
                           const VarianceSurface& surface);

/// Monte Carlo surface: V(theta, alpha) = Var_{P_alpha}(F(X, theta) l(X, alpha)), divided by
/// fprime(theta)^2. Each alpha uses one batch of n_mc draws shared across theta.
DualityResult duality_demo(const std::vector<double>& grid_theta, const std::vector<double>& grid_alpha,
                           const ISFamily& family, const std::function<double(const Vec&, double)>& F,
                           const std::function<double(double)>& fprime, std::size_t n_mc,
                           std::uint64_t seed);

/// Closed-form upper-tail normal surface (e^{a^2} Phi_bar(theta + a) - Phi_bar(theta)^2) / phi(theta)^2.
double normal_quantile_surface(double theta, double alpha);

/// The shipped grid: theta in {1.5, 2.5, 3.5}, alpha in 0..5 step 0.05.
DualityResult normal_duality_demo();

}  // namespace adaptis
