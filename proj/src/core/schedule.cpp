#include "adaptis/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "adaptis/errors.hpp"

namespace adaptis {

void StepsizeSchedule::validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("stepsize gamma must be > 0");
    if (!(exponent > 0.5 && exponent <= 1.0))
        throw ConfigError("stepsize exponent must lie in (1/2, 1]");
}

double StepsizeSchedule::step(std::size_t n) const {
    if (n == 0) throw UsageError("step_size: iteration index starts at 1");
    if (exponent == 1.0) return gamma / static_cast<double>(n);
    return gamma / std::pow(static_cast<double>(n), exponent);
}

double step_size(const StepsizeSchedule& schedule, std::size_t n) { return schedule.step(n); }

TruncationSchedule TruncationSchedule::constant(Box box) {
    box.validate();
    return TruncationSchedule([box](std::size_t) { return box; });
}

TruncationSchedule TruncationSchedule::sqrt_log(double a, double eps) {
    if (!(a > 1.0)) throw ConfigError("sqrt_log truncation needs a > 1");
    if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("sqrt_log truncation needs eps in (0,1)");
    return TruncationSchedule([a, eps](std::size_t n) {
        const double r = std::sqrt(std::log(a) + (1.0 - eps) * std::log(static_cast<double>(n)));
        return Box::interval(-r, r);
    });
}

TruncationSchedule TruncationSchedule::tilt(double upper, double alpha_min, double c, double eps) {
    if (!(alpha_min > 0.0) || !(upper > alpha_min)) throw ConfigError("tilt truncation needs 0 < alpha_min < upper");
    if (!(c > 0.0)) throw ConfigError("tilt truncation needs c > 0");
    if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("tilt truncation needs eps in (0,1)");
    return TruncationSchedule([=](std::size_t n) {
        const double lo = c * std::pow(static_cast<double>(n), -(1.0 - eps));
        return Box::interval(std::min(upper, std::max(alpha_min, lo)), upper);
    });
}

Box TruncationSchedule::set_at(std::size_t n) const {
    if (n == 0) throw UsageError("truncation sets are indexed from n = 1");
    return set_at_(n);
}

}  // namespace adaptis
