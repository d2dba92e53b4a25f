#include "adaptis/trace.hpp"

#include <cmath>
#include <cstring>

#include "adaptis/errors.hpp"

namespace adaptis {

Vec RunTrace::iterate(std::size_t i) const {
    return Vec(std::span<const double>(iterates.data() + i * theta_dim, theta_dim));
}

Vec RunTrace::is_param(std::size_t i) const {
    return Vec(std::span<const double>(is_params.data() + i * param_dim, param_dim));
}

double RunTrace::likelihood_ratio(std::size_t i) const { return std::exp(log_lrs[i]); }

void RunTrace::check_invariants() const {
    const std::size_t n = length();
    if (iterates.size() != n * theta_dim || is_params.size() != n * param_dim)
        throw NumericalError("trace: iterate/parameter/sample lengths disagree");
    if (samples_retained && sample_points.size() != n * sample_dim)
        throw NumericalError("trace: retained sample count disagrees");
    for (std::size_t i = 0; i < n; ++i) {
        // -inf is an underflowed (zero) weight, counted separately; anything else must be finite.
        if (std::isnan(log_lrs[i]) || log_lrs[i] == INFINITY)
            throw NumericalError("trace: non-finite likelihood ratio", i + 1);
    }
}

namespace {
template <class T>
bool same_bytes(const std::vector<T>& a, const std::vector<T>& b) {
    return a.size() == b.size() &&
           (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(T)) == 0);
}
}  // namespace

bool bitwise_equal(const RunTrace& a, const RunTrace& b) {
    return a.theta_dim == b.theta_dim && a.param_dim == b.param_dim &&
           a.sample_dim == b.sample_dim && a.samples_retained == b.samples_retained &&
           same_bytes(a.iterates, b.iterates) && same_bytes(a.is_params, b.is_params) &&
           same_bytes(a.log_lrs, b.log_lrs) && same_bytes(a.sample_points, b.sample_points) &&
           a.final_estimate.size() == b.final_estimate.size() &&
           std::memcmp(a.final_estimate.data(), b.final_estimate.data(),
                       a.final_estimate.size() * sizeof(double)) == 0 &&
           a.flagged == b.flagged && a.zero_weight_count == b.zero_weight_count &&
           a.warnings == b.warnings;
}

}  // namespace adaptis
