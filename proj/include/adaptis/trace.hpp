#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "adaptis/vec.hpp"

namespace adaptis {

/// Per-iteration record of an adaptive run. Row i holds iteration n = i + 1:
/// the sample X_n was drawn under alpha_n and produced theta_n.
struct RunTrace {
    std::size_t theta_dim = 1;
    std::size_t param_dim = 1;
    std::size_t sample_dim = 1;

    std::vector<double> iterates;       // length() x theta_dim
    std::vector<double> is_params;      // length() x param_dim
    std::vector<double> log_lrs;        // length()
    std::vector<double> sample_points;  // length() x sample_dim, empty unless retained
    bool samples_retained = false;

    Vec final_estimate;
    std::vector<std::size_t> flagged;  // iterations with a degenerate or fallback solve
    std::size_t zero_weight_count = 0;
    std::vector<std::string> warnings;

    std::size_t length() const noexcept { return log_lrs.size(); }
    Vec iterate(std::size_t i) const;
    Vec is_param(std::size_t i) const;
    double likelihood_ratio(std::size_t i) const;

    /// Throws NumericalError if lengths disagree or a ratio is NaN/+inf.
    void check_invariants() const;
};

/// Byte-level equality of every recorded field (NaN payloads included).
bool bitwise_equal(const RunTrace& a, const RunTrace& b);

}  // namespace adaptis
