#pragma once

#include <cstddef>
#include <functional>
#include <optional>

#include "adaptis/mat.hpp"
#include "adaptis/vec.hpp"

namespace adaptis {

/// Find theta with E_P[F(X, theta)] = c.
struct RootProblem {
    using Output = std::function<void(const Vec& x, const Vec& theta, Vec& out)>;
    using Derivative = std::function<void(const Vec& x, const Vec& theta, Mat& out)>;

    std::size_t dim = 1;
    Output evaluate;
    Vec target;
    /// Optional analytic dF/dtheta (d x d); finite differences otherwise.
    std::optional<Derivative> jacobian;

    void validate() const;
};

/// Convenience for scalar problems: F(x, theta) -> double.
RootProblem scalar_problem(std::function<double(const Vec& x, double theta)> f, double c);

enum class Tail { lower, upper };

/// Lower tail: solve P{h(X) <= q} = p. Upper tail estimates the same p-quantile
/// through 1{h(X) >= q} against level 1 - p, i.e. the lower tail of -h.
struct QuantileProblem {
    std::function<double(const Vec& x)> h;
    double p = 0.5;
    Tail tail = Tail::lower;

    void validate() const;
};

}  // namespace adaptis
