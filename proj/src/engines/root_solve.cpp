#include "adaptis/engines/root_solve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adaptis/errors.hpp"

namespace adaptis {

namespace {

struct Bracket {
    double lo, hi, glo, ghi;
};

bool opposite(double a, double b) { return (a <= 0.0 && b >= 0.0) || (a >= 0.0 && b <= 0.0); }

Bracket find_bracket(const std::function<double(double)>& g, const ScalarRootOptions& opt) {
    if (opt.bracket) {
        auto [lo, hi] = *opt.bracket;
        if (!(lo <= hi)) throw BracketError("bracket has lo > hi");
        const double glo = g(lo), ghi = g(hi);
        if (!opposite(glo, ghi)) throw BracketError("no sign change on the supplied bracket");
        return {lo, hi, glo, ghi};
    }
    const double x0 = opt.start;
    const double g0 = g(x0);
    if (g0 == 0.0) return {x0, x0, g0, g0};
    double h = opt.initial_step > 0.0 ? opt.initial_step : 1.0;
    double lo = x0, hi = x0, glo = g0, ghi = g0;
    for (int k = 0; k <= opt.max_doublings; ++k) {
        const double a = x0 - h, b = x0 + h;
        const double ga = g(a);
        if (opposite(ga, glo)) return {a, lo, ga, glo};
        const double gb = g(b);
        if (opposite(ghi, gb)) return {hi, b, ghi, gb};
        lo = a, glo = ga, hi = b, ghi = gb;
        h *= 2.0;
    }
    throw BracketError("no sign change within 60 bracket doublings");
}

}  // namespace

double solve_scalar_root(const std::function<double(double)>& g_raw, double c,
                         const ScalarRootOptions& opt) {
    const auto g = [&](double t) { return g_raw(t) - c; };
    const double tol_f = std::isnan(opt.tol_f) ? 1e-10 * std::max(1.0, std::abs(c)) : opt.tol_f;

    Bracket b = find_bracket(g, opt);
    if (b.glo == 0.0) return b.lo;
    if (b.ghi == 0.0) return b.hi;
    // Orient so that g(lo) < 0 < g(hi).
    const bool increasing = b.glo < 0.0;
    auto signed_g = [&](double t) { return increasing ? g(t) : -g(t); };
    double lo = b.lo, hi = b.hi;
    double flo = increasing ? b.glo : -b.glo;
    double fhi = increasing ? b.ghi : -b.ghi;

    int side = 0;  // Illinois: which end was retained last time
    for (int it = 0; it < opt.max_iterations; ++it) {
        double x;
        const double width = hi - lo;
        if (it % 3 != 2 && std::isfinite(flo) && std::isfinite(fhi) && fhi != flo) {
            x = hi - fhi * width / (fhi - flo);
            if (!(x > lo && x < hi)) x = lo + 0.5 * width;
        } else {
            x = lo + 0.5 * width;
        }
        if (x <= lo || x >= hi) break;  // adjacent doubles
        const double fx = signed_g(x);
        if (std::abs(fx) <= tol_f) return x;
        if (fx < 0.0) {
            lo = x, flo = fx;
            if (side == -1) fhi *= 0.5;
            side = -1;
        } else {
            hi = x, fhi = fx;
            if (side == 1) flo *= 0.5;
            side = 1;
        }
        if (hi - lo <= opt.tol_x) {
            // Converged in x. A residual still above tolerance means g jumps
            // here; pin the jump to adjacent doubles by plain bisection.
            if (std::abs(signed_g(hi)) <= tol_f) return hi;
            for (int k = 0; k < 128; ++k) {
                const double m = lo + 0.5 * (hi - lo);
                if (m <= lo || m >= hi) break;
                (signed_g(m) < 0.0 ? lo : hi) = m;
            }
            return hi;
        }
    }
    return hi;
}

double solve_weighted_scalar_root(const WeightedSamples& samples, const ScalarOutput& F, double c,
                                  const ScalarRootOptions& options) {
    const std::size_t n = samples.size();
    if (n == 0) throw UsageError("root solve needs at least one sample");
    if (samples.points.size() != n * samples.dim) throw UsageError("sample points and weights disagree");
    const double inv_n = 1.0 / static_cast<double>(n);
    auto g = [&](double theta) {
        double s = 0.0;
        Vec x(samples.dim);
        for (std::size_t i = 0; i < n; ++i) {
            const double w = samples.weights[i];
            if (w == 0.0) continue;
            std::copy_n(samples.points.data() + i * samples.dim, samples.dim, x.data());
            s += F(x, theta) * w;
        }
        return s * inv_n;
    };
    return solve_scalar_root(g, c, options);
}

}  // namespace adaptis
