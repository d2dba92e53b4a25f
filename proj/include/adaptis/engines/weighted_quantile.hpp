#pragma once

#include <cstddef>
#include <queue>
#include <span>
#include <vector>

namespace adaptis {

/// inf{ q : (1/n) sum_i 1{v_i <= q} w_i >= p }. Throws LevelUnreachableError
/// when the normalized total weight stays below p.
double weighted_empirical_quantile(std::span<const double> values, std::span<const double> weights,
                                   double p);

/// Same quantity maintained under insertion in O(log n) per step.
///
/// Two heaps split the sample at the answer: `lower_` is the shortest sorted
/// prefix whose weight reaches p * n, so its maximum is the quantile. When the
/// total weight cannot reach the level every sample sits in `lower_` and the
/// answer degrades to the largest value; `degenerate()` reports that case.
class IncrementalWeightedQuantile {
public:
    explicit IncrementalWeightedQuantile(double p);

    void insert(double value, double weight);
    double quantile() const;
    bool degenerate() const noexcept { return lower_sum_ < target(); }
    std::size_t size() const noexcept { return count_; }

private:
    struct Item {
        double value;
        double weight;
    };
    struct Less {
        bool operator()(const Item& a, const Item& b) const { return a.value < b.value; }
    };
    struct Greater {
        bool operator()(const Item& a, const Item& b) const { return a.value > b.value; }
    };

    long double target() const noexcept { return static_cast<long double>(p_) * count_; }
    void rebalance();

    double p_;
    std::size_t count_ = 0;
    long double lower_sum_ = 0.0L;
    std::priority_queue<Item, std::vector<Item>, Less> lower_;    // max-heap
    std::priority_queue<Item, std::vector<Item>, Greater> upper_; // min-heap
};

}  // namespace adaptis
