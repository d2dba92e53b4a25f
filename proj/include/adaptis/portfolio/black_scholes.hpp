#pragma once

namespace adaptis {

enum class OptionKind { call, put };

struct Greeks {
    double price = 0.0;
    double delta = 0.0;
    double gamma = 0.0;
    double theta = 0.0;  // dV/dt in calendar time (textbook sign: negative for a long call)
};

/// European option price and Greeks; puts via put-call parity.
/// Throws DomainError unless S, K, sigma, T > 0.
Greeks black_scholes(double S, double K, double r, double sigma, double T, OptionKind kind);

/// Price only; the hot path of loss repricing.
double black_scholes_price(double S, double K, double r, double sigma, double T, OptionKind kind);

}  // namespace adaptis
