#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "adaptis/engines/config.hpp"
#include "adaptis/engines/root_solve.hpp"
#include "adaptis/family.hpp"
#include "adaptis/mat.hpp"
#include "adaptis/problem.hpp"
#include "adaptis/trace.hpp"

namespace adaptis {

struct JacobianEstimate {
    Mat matrix;
    Vec at_theta;
    std::size_t n_samples = 0;
    double condition = 1.0;        // ratio of extreme singular values
    bool ill_conditioned = false;  // condition > 1e12
};

inline constexpr double kMaxJacobianCondition = 1e12;

/// D/Dtheta of (1/n) sum F(x_i, theta) l_i at theta: analytic when the
/// problem supplies dF/dtheta, central differences with `fd_step` otherwise.
JacobianEstimate estimate_jacobian(const WeightedSamples& samples, const RootProblem& problem,
                                   const Vec& theta, double fd_step);

/// Kernel-style bandwidth for indicator outputs: c * std(h) * n^{-1/5}.
double indicator_bandwidth(std::span<const double> h_values, double c = 1.0);

/// grad_g' J^{-T} Sigma J^{-1} grad_g. Throws SingularMatrixError for singular J.
double delta_method_variance(const Mat& J, const Mat& sigma, const Vec& grad_g);

struct PerformanceFunction {
    std::function<double(const Vec&)> g;
    std::function<Vec(const Vec&)> grad_g;
};

/// Largest relative gap between grad_g and central differences of g at theta.
double gradient_mismatch(const PerformanceFunction& pf, const Vec& theta, double step = 1e-6);

/// X ~ N(alpha, Sigma_X) against N(0, Sigma_X), with a user-supplied selector.
class GaussianShiftFamily : public ISFamily {
public:
    using Selector = std::function<Vec(const Vec& theta, const Mat* jacobian)>;

    /// `selector` defaults to the base parameter (no tilt).
    explicit GaussianShiftFamily(const Mat& covariance, Selector selector = {},
                                 bool selector_uses_jacobian = false);

    std::size_t sample_dim() const override { return dim_; }
    std::size_t param_dim() const override { return dim_; }
    Vec base_param() const override { return Vec(dim_, 0.0); }
    bool admissible(const Vec& alpha) const override;
    void sample(const Vec& alpha, Rng& rng, Vec& x) const override;
    double log_likelihood_ratio(const Vec& x, const Vec& alpha) const override;
    Vec select(const Vec& theta) const override;
    bool uses_jacobian() const override { return uses_jacobian_; }
    Vec select(const Vec& theta, const Mat& jacobian) const override;

private:
    std::size_t dim_;
    Mat chol_;       // lower Cholesky factor of Sigma_X
    Mat precision_;  // Sigma_X^{-1}
    Selector selector_;
    bool uses_jacobian_;
};

struct MdRunConfig : AdaptiveRunConfig {
    /// Finite-difference step for Jacobians when no analytic derivative exists.
    double fd_step = 1e-5;
    /// Recompute J_hat every k iterations for Jacobian-aware selectors.
    std::size_t jacobian_every = 1;
};

struct MdRunResult {
    RunTrace trace;
    JacobianEstimate jacobian;  // at the final estimate
    Mat sigma;                  // covariance of F(X_i, theta) l_i over the trailing half
};

/// Multivariate SAA: damped Newton on the weighted empirical system, falling
/// back to a relaxed fixed-point iteration (flagged) when Newton stalls.
/// With d = 1 the scalar bracketing solver is used, so traces match
/// run_saa_adaptive bit-for-bit.
MdRunResult run_saa_adaptive_md(const RootProblem& problem, const ISFamily& family,
                                const MdRunConfig& config);

/// Multivariate RM-SA / PR-SA with componentwise box projection.
MdRunResult run_sa_adaptive_md(const RootProblem& problem, const ISFamily& family,
                               const MdRunConfig& config);

}  // namespace adaptis
