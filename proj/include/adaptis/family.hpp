#pragma once

#include <cstddef>
#include <cstdint>

#include "adaptis/mat.hpp"
#include "adaptis/rng.hpp"
#include "adaptis/vec.hpp"

namespace adaptis {

/// Parametric sampler P_alpha with likelihood ratio dP/dP_alpha and the
/// black-box selector I(theta).
class ISFamily {
public:
    virtual ~ISFamily() = default;

    virtual std::size_t sample_dim() const = 0;
    virtual std::size_t param_dim() const = 0;
    /// alpha_0 with P_{alpha_0} = P.
    virtual Vec base_param() const = 0;
    virtual bool admissible(const Vec& alpha) const = 0;

    /// Draw x ~ P_alpha. Throws DomainError for inadmissible alpha.
    virtual void sample(const Vec& alpha, Rng& rng, Vec& x) const = 0;
    virtual double log_likelihood_ratio(const Vec& x, const Vec& alpha) const = 0;

    virtual Vec select(const Vec& theta) const = 0;
    /// Jacobian-aware selector I(theta, J); families that ignore J keep the default.
    virtual bool uses_jacobian() const { return false; }
    virtual Vec select(const Vec& theta, const Mat& /*jacobian*/) const { return select(theta); }
};

struct MeanEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Monte Carlo mean of l(X, alpha) under X ~ P_alpha. Requires n_mc >= 100;
/// throws NumericalError if any ratio is non-finite.
MeanEstimate check_unit_mean_lr(const ISFamily& family, const Vec& alpha, std::size_t n_mc,
                                std::uint64_t seed);

}  // namespace adaptis
