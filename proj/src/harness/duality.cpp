#include "adaptis/harness/duality.hpp"

#include <cmath>
#include <limits>

#include "adaptis/errors.hpp"
#include "adaptis/normal_dist.hpp"
#include "adaptis/rng.hpp"

namespace adaptis {

namespace {

// Both grid optima from a dense value table v[t][a].
DualityResult optimize(const std::vector<std::vector<double>>& v) {
    const double inf = std::numeric_limits<double>::infinity();
    DualityResult r;
    r.maxmin = -inf;
    for (std::size_t t = 0; t < v.size(); ++t) {
        double row_min = inf;
        for (double x : v[t]) row_min = std::min(row_min, x);
        if (row_min > r.maxmin) r.maxmin = row_min, r.argmax_theta = t;
    }
    r.minmax = inf;
    for (std::size_t a = 0; a < v[0].size(); ++a) {
        double col_max = -inf;
        for (const auto& row : v) col_max = std::max(col_max, row[a]);
        if (col_max < r.minmax) r.minmax = col_max, r.argmin_alpha = a;
    }
    return r;
}

void check_grids(const std::vector<double>& gt, const std::vector<double>& ga) {
    if (gt.empty() || ga.empty()) throw ConfigError("duality grids must be nonempty");
}

}  // namespace

DualityResult duality_demo(const std::vector<double>& grid_theta, const std::vector<double>& grid_alpha,
                           const VarianceSurface& surface) {
    check_grids(grid_theta, grid_alpha);
    std::vector<std::vector<double>> v(grid_theta.size(), std::vector<double>(grid_alpha.size()));
    for (std::size_t t = 0; t < grid_theta.size(); ++t)
        for (std::size_t a = 0; a < grid_alpha.size(); ++a) v[t][a] = surface(grid_theta[t], grid_alpha[a]);
    return optimize(v);
}

DualityResult duality_demo(const std::vector<double>& grid_theta, const std::vector<double>& grid_alpha,
                           const ISFamily& family, const std::function<double(const Vec&, double)>& F,
                           const std::function<double(double)>& fprime, std::size_t n_mc,
                           std::uint64_t seed) {
    check_grids(grid_theta, grid_alpha);
    if (n_mc < 2) throw UsageError("duality Monte Carlo needs n_mc >= 2");
    const std::size_t nt = grid_theta.size(), na = grid_alpha.size();
    std::vector<std::vector<double>> v(nt, std::vector<double>(na)), se(nt, std::vector<double>(na));
    const Rng root(seed);
    Vec x(family.sample_dim());
    for (std::size_t a = 0; a < na; ++a) {
        const Vec alpha{grid_alpha[a]};
        Rng rng = root.split(a);
        std::vector<double> s1(nt, 0.0), s2(nt, 0.0), s4(nt, 0.0);
        for (std::size_t i = 0; i < n_mc; ++i) {
            family.sample(alpha, rng, x);
            const double w = std::exp(family.log_likelihood_ratio(x, alpha));
            for (std::size_t t = 0; t < nt; ++t) {
                const double y = F(x, grid_theta[t]) * w;
                s1[t] += y;
                s2[t] += y * y;
                s4[t] += y * y * y * y;
            }
        }
        const double n = static_cast<double>(n_mc);
        for (std::size_t t = 0; t < nt; ++t) {
            const double m = s1[t] / n, m2 = s2[t] / n;
            const double var = std::max(0.0, (m2 - m * m) * n / (n - 1.0));
            const double scale = 1.0 / (fprime(grid_theta[t]) * fprime(grid_theta[t]));
            v[t][a] = var * scale;
            // Crude standard error of a second moment: sqrt(Var(Y^2) / n).
            se[t][a] = std::sqrt(std::max(0.0, s4[t] / n - m2 * m2) / n) * scale;
        }
    }
    DualityResult r = optimize(v);
    double e1 = 0.0, e2 = 0.0;
    for (std::size_t a = 0; a < na; ++a) e1 = std::max(e1, se[r.argmax_theta][a]);
    for (std::size_t t = 0; t < nt; ++t) e2 = std::max(e2, se[t][r.argmin_alpha]);
    r.mc_error = std::max(e1, e2);
    return r;
}

double normal_quantile_surface(double theta, double alpha) {
    const double tail = normal_sf(theta);
    const double f = normal_pdf(theta);
    return (std::exp(alpha * alpha) * normal_sf(theta + alpha) - tail * tail) / (f * f);
}

DualityResult normal_duality_demo() {
    std::vector<double> thetas{1.5, 2.5, 3.5}, alphas;
    for (int k = 0; k <= 100; ++k) alphas.push_back(0.05 * k);
    return duality_demo(thetas, alphas, normal_quantile_surface);
}

}  // namespace adaptis
