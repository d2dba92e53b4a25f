#include "adaptis/engines/weighted_quantile.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "adaptis/errors.hpp"

namespace adaptis {

namespace {
void check_level(double p) {
    if (!(p > 0.0 && p < 1.0) && p != 1.0) throw UsageError("quantile level must lie in (0, 1]");
}
}  // namespace

double weighted_empirical_quantile(std::span<const double> values, std::span<const double> weights,
                                   double p) {
    check_level(p);
    if (values.empty()) throw UsageError("weighted quantile of an empty sample");
    if (values.size() != weights.size()) throw UsageError("values and weights differ in length");
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw UsageError("weights must be finite and nonnegative");
    }

    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    const long double target = static_cast<long double>(p) * values.size();
    long double cum = 0.0L;
    for (std::size_t k = 0; k < order.size(); ++k) {
        cum += weights[order[k]];
        // Only test at the last copy of a value: the empirical CDF jumps there.
        const bool last_of_value = k + 1 == order.size() || values[order[k + 1]] != values[order[k]];
        if (last_of_value && cum >= target) return values[order[k]];
    }
    throw LevelUnreachableError("normalized weight total never reaches the requested level");
}

IncrementalWeightedQuantile::IncrementalWeightedQuantile(double p) : p_(p) { check_level(p); }

void IncrementalWeightedQuantile::insert(double value, double weight) {
    ++count_;
    if (!lower_.empty() && value <= lower_.top().value) {
        lower_.push({value, weight});
        lower_sum_ += weight;
    } else {
        upper_.push({value, weight});
    }
    rebalance();
}

void IncrementalWeightedQuantile::rebalance() {
    const long double t = target();
    while (lower_sum_ < t && !upper_.empty()) {
        const Item it = upper_.top();
        upper_.pop();
        lower_.push(it);
        lower_sum_ += it.weight;
    }
    while (!lower_.empty() && lower_sum_ - lower_.top().weight >= t) {
        const Item it = lower_.top();
        lower_.pop();
        lower_sum_ -= it.weight;
        upper_.push(it);
    }
}

double IncrementalWeightedQuantile::quantile() const {
    if (count_ == 0) throw UsageError("quantile of an empty sample");
    return lower_.top().value;
}

}  // namespace adaptis
