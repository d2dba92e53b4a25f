#include "adaptis/samplers/toy_families.hpp"

#include <cmath>

#include "adaptis/errors.hpp"
#include "adaptis/normal_dist.hpp"

namespace adaptis {

namespace {

void require_scalar(const Vec& v, const char* what) {
    if (v.size() != 1) throw UsageError(std::string(what) + ": expected a scalar parameter");
}

void require_tilt(double lambda, double alpha) {
    if (!(alpha > 0.0 && alpha < 2.0 * lambda))
        throw DomainError("tilt parameter " + std::to_string(alpha) + " outside (0, 2*lambda)");
}

// lambda - lambda^2 u / (1 + sqrt(1 + lambda^2 u^2)); the naive form cancels for small u.
double tilt_selector(double lambda, double u) {
    const double lu = lambda * u;
    return lambda - lambda * lu / (1.0 + std::sqrt(1.0 + lu * lu));
}

}  // namespace

// ---- normal -------------------------------------------------------------

bool NormalShiftFamily::admissible(const Vec& alpha) const {
    return alpha.size() == 1 && std::isfinite(alpha[0]);
}

void NormalShiftFamily::sample(const Vec& alpha, Rng& rng, Vec& x) const {
    if (!admissible(alpha)) throw DomainError("normal shift must be finite");
    x.resize(1);
    x[0] = rng.normal() + alpha[0];
}

double NormalShiftFamily::log_likelihood_ratio(const Vec& x, const Vec& alpha) const {
    const double a = alpha[0];
    return -a * x[0] + 0.5 * a * a;
}

Vec NormalShiftFamily::select(const Vec& theta) const {
    require_scalar(theta, "normal selector");
    return Vec{normal_selector(theta[0])};
}

double normal_selector(double q) { return q; }

// ---- exponential --------------------------------------------------------

ExponentialTiltFamily::ExponentialTiltFamily(double lambda) : lambda_(lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("exponential rate must be > 0");
}

bool ExponentialTiltFamily::admissible(const Vec& alpha) const {
    return alpha.size() == 1 && alpha[0] > 0.0 && alpha[0] < 2.0 * lambda_;
}

void ExponentialTiltFamily::sample(const Vec& alpha, Rng& rng, Vec& x) const {
    if (alpha.size() != 1) throw DomainError("exponential tilt is scalar");
    require_tilt(lambda_, alpha[0]);
    x.resize(1);
    x[0] = -std::log(rng.uniform()) / alpha[0];
}

double ExponentialTiltFamily::log_likelihood_ratio(const Vec& x, const Vec& alpha) const {
    const double a = alpha[0];
    return std::log(lambda_ / a) - (lambda_ - a) * x[0];
}

Vec ExponentialTiltFamily::select(const Vec& theta) const {
    require_scalar(theta, "exponential selector");
    return Vec{exponential_selector(lambda_, theta[0])};
}

double exponential_selector(double lambda, double q) {
    if (!(lambda > 0.0)) throw DomainError("exponential selector: lambda must be > 0");
    if (!(q > 0.0)) throw DomainError("exponential selector: q must be > 0");
    return tilt_selector(lambda, q);
}

// ---- Pareto -------------------------------------------------------------

ParetoTiltFamily::ParetoTiltFamily(double lambda) : lambda_(lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("Pareto tail index must be > 0");
}

bool ParetoTiltFamily::admissible(const Vec& alpha) const {
    return alpha.size() == 1 && alpha[0] > 0.0 && alpha[0] < 2.0 * lambda_;
}

void ParetoTiltFamily::sample(const Vec& alpha, Rng& rng, Vec& x) const {
    if (alpha.size() != 1) throw DomainError("Pareto tilt is scalar");
    require_tilt(lambda_, alpha[0]);
    x.resize(1);
    x[0] = std::exp(-std::log(rng.uniform()) / alpha[0]);
}

double ParetoTiltFamily::log_likelihood_ratio(const Vec& x, const Vec& alpha) const {
    const double a = alpha[0];
    return std::log(lambda_ / a) - (lambda_ - a) * std::log(x[0]);
}

Vec ParetoTiltFamily::select(const Vec& theta) const {
    require_scalar(theta, "Pareto selector");
    return Vec{pareto_selector(lambda_, theta[0])};
}

double pareto_selector(double lambda, double q) {
    if (!(lambda > 0.0)) throw DomainError("Pareto selector: lambda must be > 0");
    if (!(q > 1.0)) throw DomainError("Pareto selector: q must be > 1");
    return tilt_selector(lambda, std::log(q));
}

// ---- second moments and asymptotic variances ----------------------------

double normal_second_moment(double q, double alpha) {
    return std::exp(alpha * alpha) * normal_sf(q + alpha);
}

double exponential_second_moment(double lambda, double q, double alpha) {
    require_tilt(lambda, alpha);
    return lambda * lambda * std::exp(-2.0 * lambda * q + alpha * q) / (alpha * (2.0 * lambda - alpha));
}

double pareto_second_moment(double lambda, double q, double alpha) {
    require_tilt(lambda, alpha);
    return (lambda * lambda / alpha) * std::pow(q, alpha - 2.0 * lambda) / (2.0 * lambda - alpha);
}

double normal_asymptotic_variance(double q_star, double p) {
    const double tail = 1.0 - p;
    const double f = normal_pdf(q_star);
    return (normal_second_moment(q_star, q_star) - tail * tail) / (f * f);
}

double exponential_asymptotic_variance(double lambda, double q_star) {
    const double s = std::sqrt(1.0 + lambda * lambda * q_star * q_star);
    return q_star * q_star * std::exp(lambda * q_star + 1.0 - s) / (2.0 * (s - 1.0)) -
           1.0 / (lambda * lambda);
}

double pareto_asymptotic_variance(double lambda, double q_star) {
    const double a = pareto_selector(lambda, q_star);
    return q_star * q_star *
           (std::pow(q_star, a) / (a * (2.0 * lambda - a)) - 1.0 / (lambda * lambda));
}

double normal_is_variance(double q_star, double alpha) {
    const double tail = normal_sf(q_star);
    const double f = normal_pdf(q_star);
    return (normal_second_moment(q_star, alpha) - tail * tail) / (f * f);
}

double exponential_is_variance(double lambda, double q_star, double alpha) {
    const double tail = std::exp(-lambda * q_star);
    const double f = lambda * tail;
    return (exponential_second_moment(lambda, q_star, alpha) - tail * tail) / (f * f);
}

double pareto_is_variance(double lambda, double q_star, double alpha) {
    const double tail = std::pow(q_star, -lambda);
    const double f = lambda * tail / q_star;
    return (pareto_second_moment(lambda, q_star, alpha) - tail * tail) / (f * f);
}

double rm_asymptotic_variance(double gamma, double fprime, double numerator) {
    const double denom = 2.0 * gamma * fprime - 1.0;
    if (!(denom > 0.0)) throw DomainError("RM-SA variance needs 2 gamma f' > 1");
    return gamma * gamma * numerator / denom;
}

}  // namespace adaptis
