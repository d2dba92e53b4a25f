#pragma once

#include <cstddef>
#include <functional>

#include "adaptis/box.hpp"

namespace adaptis {

/// gamma_n = gamma / n^exponent.
struct StepsizeSchedule {
    double gamma = 1.0;
    double exponent = 1.0;

    /// Throws ConfigError unless gamma > 0 and exponent in (1/2, 1].
    void validate() const;
    double step(std::size_t n) const;
};

double step_size(const StepsizeSchedule& schedule, std::size_t n);

/// Growing boxes A_n for the IS parameter. Nested by construction for every
/// factory below; a user-supplied map is trusted.
class TruncationSchedule {
public:
    using Fn = std::function<Box(std::size_t)>;

    explicit TruncationSchedule(Fn set_at) : set_at_(std::move(set_at)) {}

    static TruncationSchedule constant(Box box);
    /// [-sqrt(log(a n^{1-eps})), +sqrt(log(a n^{1-eps}))]; requires a > 1.
    static TruncationSchedule sqrt_log(double a = 5.0, double eps = 0.1);
    /// [max(alpha_min, c n^{-(1-eps)}), upper] for rate-type parameters.
    static TruncationSchedule tilt(double upper, double alpha_min = 1e-8, double c = 1.0,
                                   double eps = 0.1);

    /// A_n for n >= 1.
    Box set_at(std::size_t n) const;

private:
    Fn set_at_;
};

}  // namespace adaptis
