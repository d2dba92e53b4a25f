#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "adaptis/engines/config.hpp"
#include "adaptis/family.hpp"
#include "adaptis/mat.hpp"
#include "adaptis/portfolio/black_scholes.hpp"
#include "adaptis/trace.hpp"

namespace adaptis {

struct OptionPosition {
    std::size_t asset = 0;
    OptionKind kind = OptionKind::call;
    double quantity = 0.0;  // negative = short
    double strike = 0.0;
    double maturity = 0.0;  // years from today
};

struct PortfolioSpec {
    std::vector<double> spot;
    std::vector<double> vol;
    Mat correlation;  // identity when empty
    double rate = 0.0;
    double horizon = 0.0;
    std::vector<OptionPosition> positions;

    std::size_t assets() const noexcept { return spot.size(); }
    /// Sigma_S = D R D t with D = diag(S0 sigma).
    Mat covariance() const;
    /// Mark-to-market value at asset prices S after `elapsed` years.
    double value(const double* S, double elapsed) const;
    /// Throws ConfigError on inconsistent sizes, maturities <= horizon, etc.
    void validate() const;
};

/// Ten uncorrelated assets at 100 with 30% vol, r = 5%, a 10-day horizon
/// (t = 0.04), short 10 ATM calls and 5 ATM puts per asset, half-year expiry.
PortfolioSpec ten_asset_portfolio();

/// JSON schema: {"rate", "horizon", "assets": [{"spot", "vol"}...],
/// "correlation": [[...]] (optional), "positions": [{"asset", "kind",
/// "quantity", "strike", "maturity"}...]}. Throws IoError / ConfigError.
PortfolioSpec load_portfolio(const std::string& path);
PortfolioSpec parse_portfolio(const std::string& json_text);

/// Delta-gamma model L ~ a0 + b'Z + Z' Lambda Z with Z ~ N(0, I) and dS = C Z.
struct QuadraticFormModel {
    double a0 = 0.0;
    std::vector<double> b;
    std::vector<double> lambda;  // descending
    Mat C;                       // C C' = Sigma_S, C' A C = Lambda
    std::vector<double> a;       // -delta
    Mat A;                       // -Gamma / 2

    std::size_t dim() const noexcept { return b.size(); }
    /// Admissible twists form the open interval (alpha_lo, alpha_hi), possibly unbounded.
    double alpha_lo() const;
    double alpha_hi() const;
    bool admissible(double alpha) const;
    /// E[Q] = sum lambda_i.
    double mean_q() const;
    double q_of(const double* z) const;
};

/// Loss L = V(S0, 0) - V(S(t), t) expanded to second order in dS:
/// a0 = -Theta t, a = -delta, A = -Gamma / 2.
QuadraticFormModel build_quadratic_form(const PortfolioSpec& spec);

/// Model with C = I and the given diagonal form (tests, toys).
QuadraticFormModel make_diagonal_model(double a0, std::vector<double> b, std::vector<double> lambda);

/// Log-MGF of Q and its derivatives. Throw DomainError off the admissible interval.
double psi(const QuadraticFormModel& model, double alpha);
double psi_prime(const QuadraticFormModel& model, double alpha);
double psi_second(const QuadraticFormModel& model, double alpha);

struct TwistChoice {
    double alpha = 0.0;
    bool saturated = false;
};

/// Solves psi'(alpha) = x - a0. Unattainable levels saturate at the domain
/// boundary pulled in by a relative 1e-6.
TwistChoice twist_selector(const QuadraticFormModel& model, double x);

/// Chernoff bracket [q_min, q_max] for the delta-gamma p-quantile.
std::pair<double, double> var_truncation_bounds(const QuadraticFormModel& model, double p);

/// Exponential twist of Q as an IS family over Z; the sample point is Z.
class TwistedGaussianFamily : public ISFamily {
public:
    explicit TwistedGaussianFamily(QuadraticFormModel model);

    const QuadraticFormModel& model() const noexcept { return model_; }
    std::size_t sample_dim() const override { return model_.dim(); }
    std::size_t param_dim() const override { return 1; }
    Vec base_param() const override { return Vec{0.0}; }
    bool admissible(const Vec& alpha) const override;
    void sample(const Vec& alpha, Rng& rng, Vec& z) const override;
    double log_likelihood_ratio(const Vec& z, const Vec& alpha) const override;
    /// theta is a loss level x; returns I(x) (saturating).
    Vec select(const Vec& theta) const override;

private:
    QuadraticFormModel model_;
};

struct TwistedDraw {
    Vec dS;
    double Q = 0.0;
    double log_lr = 0.0;
};

/// Z ~ N(mu(alpha), B(alpha)), dS = C Z, Q and l = exp(-alpha Q + psi(alpha)).
TwistedDraw sample_twisted(const QuadraticFormModel& model, double alpha, Rng& rng);

/// Exact repriced loss for standard-normal factors z.
class LossFunction {
public:
    LossFunction(const PortfolioSpec& spec, const QuadraticFormModel& model);
    double operator()(const Vec& z) const;
    double delta_gamma(const Vec& z) const;

private:
    const PortfolioSpec* spec_;
    const QuadraticFormModel* model_;
    double v0_;
};

struct VarCvarConfig {
    SolverKind solver = SolverKind::saa;
    ISMode is_mode = ISMode::adaptive;
    double p = 0.999;
    std::size_t n = 32000;
    std::uint64_t seed = 0;
    /// SA: projection box for the loss level; defaults to the Chernoff bracket.
    std::optional<std::pair<double, double>> projection;
    /// SA: gamma; the default is 1 / density of the Gaussian fit at q_max.
    std::optional<double> gamma;
    double pr_exponent = 0.9;
    std::size_t burn_in = 100;
    /// Samples for the CVaR expectation; 0 means n.
    std::size_t cvar_samples = 0;
};

struct VarCvarResult {
    double var = 0.0;
    double cvar = 0.0;
    double final_alpha = 0.0;
    RunTrace trace;
};

/// VaR by the chosen adaptive solver on the exactly repriced loss, CVaR from
/// v + E[(L - v)^+] / (1 - p) with a fresh batch twisted at I(v).
VarCvarResult estimate_var_cvar(const PortfolioSpec& spec, const VarCvarConfig& config);
/// Same with a prebuilt model (avoids repeating the decomposition per replication).
VarCvarResult estimate_var_cvar(const PortfolioSpec& spec, const QuadraticFormModel& model,
                                const VarCvarConfig& config);

}  // namespace adaptis
