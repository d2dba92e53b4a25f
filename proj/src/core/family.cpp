#include "adaptis/family.hpp"

#include <cmath>
#include <sstream>

#include "adaptis/errors.hpp"

namespace adaptis {

MeanEstimate check_unit_mean_lr(const ISFamily& family, const Vec& alpha, std::size_t n_mc,
                                std::uint64_t seed) {
    if (n_mc < 100) throw UsageError("check_unit_mean_lr needs at least 100 draws");
    if (!family.admissible(alpha)) throw DomainError("check_unit_mean_lr: inadmissible parameter");
    Rng rng(seed);
    Vec x(family.sample_dim());
    // Welford keeps the variance honest when the ratios are nearly constant.
    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < n_mc; ++i) {
        family.sample(alpha, rng, x);
        const double w = std::exp(family.log_likelihood_ratio(x, alpha));
        if (!std::isfinite(w)) {
            std::ostringstream msg;
            msg << "non-finite likelihood ratio at alpha = (";
            for (std::size_t k = 0; k < alpha.size(); ++k) msg << (k ? ", " : "") << alpha[k];
            msg << ")";
            throw NumericalError(msg.str());
        }
        const double delta = w - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (w - mean);
    }
    const double var = m2 / static_cast<double>(n_mc - 1);
    return {mean, std::sqrt(var / static_cast<double>(n_mc))};
}

}  // namespace adaptis
