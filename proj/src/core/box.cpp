#include "adaptis/box.hpp"

#include <cmath>

#include "adaptis/errors.hpp"

namespace adaptis {

bool Box::contains(const Vec& v) const noexcept {
    if (v.size() != lo.size()) return false;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(v[i] >= lo[i] && v[i] <= hi[i])) return false;
    }
    return true;
}

void Box::validate() const {
    if (lo.size() != hi.size() || lo.empty())
        throw ConfigError("box bounds have mismatched or zero dimension");
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (std::isnan(lo[i]) || std::isnan(hi[i])) throw ConfigError("box bound is NaN");
        if (lo[i] > hi[i])
            throw ConfigError("malformed box: lo[" + std::to_string(i) + "] > hi[" +
                              std::to_string(i) + "]");
    }
}

double project_interval(double v, double lo, double hi) {
    if (lo > hi) throw ConfigError("malformed interval: lo > hi");
    return v < lo ? lo : (v > hi ? hi : v);
}

Vec project_box(const Vec& v, const Box& box) {
    box.validate();
    if (v.size() != box.dim()) throw UsageError("project_box: dimension mismatch");
    Vec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double x = v[i];
        out[i] = x < box.lo[i] ? box.lo[i] : (x > box.hi[i] ? box.hi[i] : x);
    }
    return out;
}

Box negate(const Box& box) {
    Box out{Vec(box.dim()), Vec(box.dim())};
    for (std::size_t i = 0; i < box.dim(); ++i) {
        out.lo[i] = -box.hi[i];
        out.hi[i] = -box.lo[i];
    }
    return out;
}

}  // namespace adaptis
