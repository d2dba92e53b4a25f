#include "adaptis/harness/selftest.hpp"

#include <cmath>
#include <sstream>

#include "adaptis/engines/adaptive.hpp"
#include "adaptis/engines/weighted_quantile.hpp"
#include "adaptis/harness/duality.hpp"
#include "adaptis/harness/scenarios.hpp"
#include "adaptis/portfolio/portfolio.hpp"
#include "adaptis/samplers/toy_families.hpp"

namespace adaptis {

namespace {
std::string fmt(double a, double b) {
    std::ostringstream s;
    s << a << " vs " << b;
    return s.str();
}
}  // namespace

std::vector<CheckResult> run_selftest() {
    std::vector<CheckResult> out;

    {
        const NormalShiftFamily fam;
        const MeanEstimate m = check_unit_mean_lr(fam, Vec{2.0}, 20000, 7);
        out.push_back({"unit-mean likelihood ratio (normal, alpha=2)",
                       std::abs(m.mean - 1.0) <= 4.0 * m.std_error, fmt(m.mean, 1.0)});
    }
    {
        const double v[] = {1, 2, 3, 4}, w[] = {2, 0, 0, 2};
        const double q = weighted_empirical_quantile(v, w, 0.75);
        out.push_back({"weighted quantile hand example", q == 4.0, fmt(q, 4.0)});
    }
    {
        const DualityResult d = normal_duality_demo();
        out.push_back({"weak duality on the normal grid", d.maxmin <= d.minmax, fmt(d.maxmin, d.minmax)});
    }
    {
        const ToyScenario t = make_toy_scenario(Scenario::normal, 0.99);
        const RunTrace a = run_adaptive(t.problem, *t.family, t.run_config(SolverKind::saa, ISMode::adaptive, 4000, 3));
        const RunTrace b = run_adaptive(t.problem, *t.family, t.run_config(SolverKind::saa, ISMode::adaptive, 4000, 3));
        out.push_back({"seed determinism", bitwise_equal(a, b), ""});
        const double err = std::abs(a.final_estimate[0] - t.q_star);
        out.push_back({"SAA-IS normal p=0.99 n=4000 near q*", err < 0.1, fmt(a.final_estimate[0], t.q_star)});
    }
    {
        const QuadraticFormModel m = build_quadratic_form(ten_asset_portfolio());
        const auto [lo, hi] = var_truncation_bounds(m, 0.999);
        const TwistChoice c = twist_selector(m, 0.5 * (lo + hi));
        const double res = std::abs(psi_prime(m, c.alpha) - (0.5 * (lo + hi) - m.a0));
        out.push_back({"twist selector first-order residual", res <= 1e-10 * std::max(1.0, std::abs(0.5 * (lo + hi) - m.a0)),
                       fmt(res, 0.0)});
    }
    return out;
}

}  // namespace adaptis
