#pragma once

#include "adaptis/vec.hpp"

namespace adaptis {

/// Axis-aligned box [lo_1, hi_1] x ... x [lo_d, hi_d].
struct Box {
    Vec lo;
    Vec hi;

    static Box interval(double lo, double hi) { return {Vec{lo}, Vec{hi}}; }

    std::size_t dim() const noexcept { return lo.size(); }
    bool contains(const Vec& v) const noexcept;
    /// Throws ConfigError on size mismatch, NaN bounds, or lo > hi.
    void validate() const;
};

/// Componentwise clamp into `box`. Infinite bounds are allowed here so that
/// "no projection" can be expressed as the whole space.
Vec project_box(const Vec& v, const Box& box);
double project_interval(double v, double lo, double hi);

/// Box with the sign of every coordinate flipped: [-hi, -lo].
Box negate(const Box& box);

}  // namespace adaptis
