#include "adaptis/portfolio/black_scholes.hpp"

#include <cmath>

#include "adaptis/errors.hpp"
#include "adaptis/normal_dist.hpp"

namespace adaptis {

namespace {
void check_inputs(double S, double K, double sigma, double T) {
    if (!(S > 0.0 && K > 0.0 && sigma > 0.0 && T > 0.0))
        throw DomainError("Black-Scholes needs S, K, sigma, T > 0");
}
}  // namespace

Greeks black_scholes(double S, double K, double r, double sigma, double T, OptionKind kind) {
    check_inputs(S, K, sigma, T);
    const double sqrt_t = std::sqrt(T);
    const double vol = sigma * sqrt_t;
    const double d1 = (std::log(S / K) + (r + 0.5 * sigma * sigma) * T) / vol;
    const double d2 = d1 - vol;
    const double disc_k = K * std::exp(-r * T);
    const double pdf1 = normal_pdf(d1);

    Greeks g;
    g.price = S * normal_cdf(d1) - disc_k * normal_cdf(d2);
    g.delta = normal_cdf(d1);
    g.gamma = pdf1 / (S * vol);
    g.theta = -S * pdf1 * sigma / (2.0 * sqrt_t) - r * disc_k * normal_cdf(d2);
    if (kind == OptionKind::put) {
        g.price += disc_k - S;
        g.delta -= 1.0;
        g.theta += r * disc_k;
    }
    return g;
}

double black_scholes_price(double S, double K, double r, double sigma, double T, OptionKind kind) {
    check_inputs(S, K, sigma, T);
    const double vol = sigma * std::sqrt(T);
    const double d1 = (std::log(S / K) + (r + 0.5 * sigma * sigma) * T) / vol;
    const double disc_k = K * std::exp(-r * T);
    if (kind == OptionKind::call) return S * normal_cdf(d1) - disc_k * normal_cdf(d1 - vol);
    return disc_k * normal_cdf(vol - d1) - S * normal_cdf(-d1);
}

}  // namespace adaptis
