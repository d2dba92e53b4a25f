#pragma once

#include "adaptis/family.hpp"

namespace adaptis {

/// X ~ N(alpha, 1) against P = N(0, 1); l(z, alpha) = exp(-alpha z + alpha^2 / 2).
class NormalShiftFamily : public ISFamily {
public:
    std::size_t sample_dim() const override { return 1; }
    std::size_t param_dim() const override { return 1; }
    Vec base_param() const override { return Vec{0.0}; }
    bool admissible(const Vec& alpha) const override;
    void sample(const Vec& alpha, Rng& rng, Vec& x) const override;
    double log_likelihood_ratio(const Vec& x, const Vec& alpha) const override;
    Vec select(const Vec& theta) const override;
};

/// X ~ Exp(alpha) against P = Exp(lambda); admissible alpha in (0, 2 lambda).
class ExponentialTiltFamily : public ISFamily {
public:
    explicit ExponentialTiltFamily(double lambda);

    double lambda() const noexcept { return lambda_; }
    std::size_t sample_dim() const override { return 1; }
    std::size_t param_dim() const override { return 1; }
    Vec base_param() const override { return Vec{lambda_}; }
    bool admissible(const Vec& alpha) const override;
    void sample(const Vec& alpha, Rng& rng, Vec& x) const override;
    double log_likelihood_ratio(const Vec& x, const Vec& alpha) const override;
    Vec select(const Vec& theta) const override;

private:
    double lambda_;
};

/// Pareto on [1, inf) with P{X > x} = x^{-alpha}, against tail index lambda.
class ParetoTiltFamily : public ISFamily {
public:
    explicit ParetoTiltFamily(double lambda);

    double lambda() const noexcept { return lambda_; }
    std::size_t sample_dim() const override { return 1; }
    std::size_t param_dim() const override { return 1; }
    Vec base_param() const override { return Vec{lambda_}; }
    bool admissible(const Vec& alpha) const override;
    void sample(const Vec& alpha, Rng& rng, Vec& x) const override;
    double log_likelihood_ratio(const Vec& x, const Vec& alpha) const override;
    Vec select(const Vec& theta) const override;

private:
    double lambda_;
};

// Selectors I(q).
double normal_selector(double q);
/// (lambda q + 1 - sqrt(1 + lambda^2 q^2)) / q, evaluated without cancellation. q > 0.
double exponential_selector(double lambda, double q);
/// Exponential selector in log q. q > 1.
double pareto_selector(double lambda, double q);

// E_alpha[(1{Z >= q} l(Z, alpha))^2].
double normal_second_moment(double q, double alpha);
double exponential_second_moment(double lambda, double q, double alpha);
double pareto_second_moment(double lambda, double q, double alpha);

/// (second moment at alpha = q* minus (1-p)^2) / phi(q*)^2.
double normal_asymptotic_variance(double q_star, double p);
double exponential_asymptotic_variance(double lambda, double q_star);
double pareto_asymptotic_variance(double lambda, double q_star);

/// Asymptotic variance of the quantile estimator with the tilt frozen at alpha:
/// (m2(alpha) - tail^2) / density^2. Used for no-IS and fixed-tilt baselines.
double normal_is_variance(double q_star, double alpha);
double exponential_is_variance(double lambda, double q_star, double alpha);
double pareto_is_variance(double lambda, double q_star, double alpha);

/// RM-SA with gamma_n = gamma / n: gamma^2 * numerator / (2 gamma f' - 1).
/// Throws DomainError when 2 gamma f' <= 1.
double rm_asymptotic_variance(double gamma, double fprime, double numerator);

}  // namespace adaptis
