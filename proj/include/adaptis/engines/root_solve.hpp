#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <utility>
#include <optional>
#include <span>

#include "adaptis/vec.hpp"

namespace adaptis {

/// Retained samples of a run: points (row-major, `dim` columns) and weights l_i.
struct WeightedSamples {
    std::span<const double> points;
    std::span<const double> weights;
    std::size_t dim = 1;

    std::size_t size() const noexcept { return weights.size(); }
};

struct ScalarRootOptions {
    /// Explicit bracket; otherwise expand geometrically around `start`.
    std::optional<std::pair<double, double>> bracket;
    double start = 0.0;
    double initial_step = 1.0;
    int max_doublings = 60;
    /// Residual tolerance; NaN means 1e-10 * max(1, |c|).
    double tol_f = std::numeric_limits<double>::quiet_NaN();
    double tol_x = 1e-12;
    int max_iterations = 400;
};

using ScalarOutput = std::function<double(const Vec& x, double theta)>;

/// Root of g(theta) = (1/n) sum F(x_i, theta) l_i - c by bracketing plus
/// Illinois-safeguarded bisection. When g jumps across zero (indicator
/// outputs) the bracket is shrunk to adjacent doubles and the upper end
/// returned, i.e. the order-statistic answer. Throws BracketError.
double solve_weighted_scalar_root(const WeightedSamples& samples, const ScalarOutput& F, double c,
                                  const ScalarRootOptions& options = {});

/// Same solver on an arbitrary scalar function g (already centered at c).
double solve_scalar_root(const std::function<double(double)>& g, double c,
                         const ScalarRootOptions& options = {});

}  // namespace adaptis
