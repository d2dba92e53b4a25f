#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "adaptis/engines/adaptive.hpp"
#include "adaptis/engines/root_solve.hpp"
#include "adaptis/engines/weighted_quantile.hpp"
#include "adaptis/errors.hpp"
#include "adaptis/normal_dist.hpp"
#include "adaptis/samplers/toy_families.hpp"
#include "support/oracles.hpp"

using namespace adaptis;

namespace {

QuantileProblem identity_quantile(double p, Tail tail = Tail::lower) {
    return {[](const Vec& x) { return x[0]; }, p, tail};
}

// Normal family whose selector always answers the base measure.
struct InertNormal : NormalShiftFamily {
    Vec select(const Vec&) const override { return Vec{0.0}; }
};

}  // namespace

TEST_CASE("weighted quantile examples") {
    const double v3[] = {1, 2, 3}, w3[] = {1, 1, 1};
    CHECK(weighted_empirical_quantile(v3, w3, 0.5) == 2.0);
    const double v1[] = {5}, w1[] = {1};
    CHECK(weighted_empirical_quantile(v1, w1, 0.999) == 5.0);
    const double v4[] = {1, 2, 3, 4}, w4[] = {2, 0, 0, 2};
    CHECK(weighted_empirical_quantile(v4, w4, 0.25) == 1.0);
    CHECK(weighted_empirical_quantile(v4, w4, 0.75) == 4.0);
    const double wz[] = {0.1, 0.1, 0.1};
    CHECK_THROWS_AS(weighted_empirical_quantile(v3, wz, 0.5), LevelUnreachableError);
}

TEST_CASE("weighted quantile equals brute force on random small instances") {
    std::mt19937_64 gen(2024);
    std::uniform_int_distribution<int> len(1, 12), small(0, 5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int reachable = 0;
    for (int t = 0; t < 1000; ++t) {
        const int n = len(gen);
        std::vector<double> v(n), w_unit(n, 1.0), w(n);
        for (int i = 0; i < n; ++i) {
            v[i] = t % 2 ? static_cast<double>(small(gen)) : u(gen);  // odd instances carry ties
            w[i] = t % 3 == 0 ? 0.0 : 2.5 * u(gen);
        }
        const double p = 0.01 + 0.98 * u(gen);

        // Unit weights: the classical inf-definition empirical quantile.
        const double ref_unit = oracle::brute_force_weighted_quantile(v, w_unit, p);
        REQUIRE(weighted_empirical_quantile(v, w_unit, p) == ref_unit);

        const double ref = oracle::brute_force_weighted_quantile(v, w, p);
        if (std::isnan(ref)) {
            CHECK_THROWS_AS(weighted_empirical_quantile(v, w, p), LevelUnreachableError);
        } else {
            ++reachable;
            CHECK(weighted_empirical_quantile(v, w, p) == ref);
        }
    }
    CHECK(reachable > 300);
}

TEST_CASE("incremental weighted quantile tracks the sorted answer") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double p : {0.05, 0.5, 0.9, 0.999}) {
        IncrementalWeightedQuantile inc(p);
        std::vector<double> v, w;
        for (int i = 0; i < 400; ++i) {
            const double x = std::floor(u(gen) * 50.0);  // ties
            const double wt = u(gen) < 0.2 ? 0.0 : 3.0 * u(gen);
            v.push_back(x);
            w.push_back(wt);
            inc.insert(x, wt);
            const double ref = oracle::brute_force_weighted_quantile(v, w, p);
            if (std::isnan(ref)) {
                REQUIRE(inc.degenerate());
                REQUIRE(inc.quantile() == *std::max_element(v.begin(), v.end()));
            } else {
                REQUIRE_FALSE(inc.degenerate());
                REQUIRE(inc.quantile() == ref);
            }
        }
    }
}

TEST_CASE("solve_weighted_scalar_root examples") {
    const double xs[] = {1, 2, 3}, ones[] = {1, 1, 1};
    const WeightedSamples s{xs, ones, 1};
    CHECK(solve_weighted_scalar_root(s, [](const Vec& x, double t) { return t - x[0]; }, 0.0) ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK(solve_weighted_scalar_root(s, [](const Vec& x, double t) { return x[0] <= t ? 1.0 : 0.0; }, 0.5) ==
          2.0);
    const double eight[] = {8}, one[] = {1};
    CHECK(solve_weighted_scalar_root({eight, one, 1}, [](const Vec& x, double t) { return t * t * t - x[0]; },
                                     0.0) == doctest::Approx(2.0).epsilon(1e-12));
    ScalarRootOptions opt;
    opt.bracket = std::pair{-1.0, 1.0};
    CHECK_THROWS_AS(solve_weighted_scalar_root(s, [](const Vec&, double) { return 1.0; }, 0.0, opt), BracketError);
    CHECK_THROWS_AS(solve_scalar_root([](double) { return 1.0; }, 0.0), BracketError);
}

TEST_CASE("SAA median of a standard normal") {
    AdaptiveRunConfig cfg;
    cfg.budget = 2000;
    cfg.seed = 17;
    const RunTrace t = run_saa_adaptive(identity_quantile(0.5), NormalShiftFamily{}, cfg);
    CHECK(std::abs(t.final_estimate[0]) < 0.1);
    CHECK(t.length() == 2000);
    CHECK_NOTHROW(t.check_invariants());
}

TEST_CASE("generic SAA agrees with the quantile SAA on an indicator problem") {
    AdaptiveRunConfig cfg;
    cfg.budget = 500;
    cfg.seed = 3;
    cfg.is_mode = ISMode::none;
    const RootProblem rp = scalar_problem([](const Vec& x, double t) { return x[0] <= t ? 1.0 : 0.0; }, 0.3);
    const RunTrace a = run_saa_adaptive(rp, NormalShiftFamily{}, cfg);
    const RunTrace b = run_saa_adaptive(identity_quantile(0.3), NormalShiftFamily{}, cfg);
    CHECK(a.final_estimate[0] == b.final_estimate[0]);
}

TEST_CASE("SA deterministic root: the first gain kills the iterate") {
    AdaptiveRunConfig cfg;
    cfg.solver = SolverKind::rm_sa;
    cfg.budget = 5;
    cfg.is_mode = ISMode::none;
    cfg.initial_theta = Vec{1.0};
    cfg.projection = Box::interval(-10, 10);
    cfg.stepsize = {1.0, 1.0};
    const RunTrace t = run_sa_adaptive(scalar_problem([](const Vec&, double th) { return th; }, 0.0),
                                       NormalShiftFamily{}, cfg);
    for (std::size_t i = 0; i < t.length(); ++i) CHECK(t.iterate(i)[0] == 0.0);
}

TEST_CASE("Polyak average of constant iterates is exact") {
    std::vector<double> it(100, 5.0);
    it.resize(1000, 0.1234567);
    CHECK(polyak_average(it, 100) == 0.1234567);
    CHECK(polyak_average(std::vector<double>{1.0, 2.0}, 100) == 2.0);
}

TEST_CASE("SA configuration is validated") {
    AdaptiveRunConfig cfg;
    cfg.solver = SolverKind::rm_sa;
    cfg.stepsize = {1.0, 0.9};
    CHECK_THROWS_AS(run_sa_adaptive(identity_quantile(0.9), NormalShiftFamily{}, cfg), ConfigError);
    cfg.solver = SolverKind::pr_sa;
    cfg.stepsize = {1.0, 1.0};
    CHECK_THROWS_AS(run_sa_adaptive(identity_quantile(0.9), NormalShiftFamily{}, cfg), ConfigError);
    cfg.budget = 0;
    cfg.stepsize = {1.0, 0.9};
    CHECK_THROWS_AS(run_sa_adaptive(identity_quantile(0.9), NormalShiftFamily{}, cfg), UsageError);
}

TEST_CASE("RM-SA warns when the gain condition fails but still runs") {
    AdaptiveRunConfig cfg;
    cfg.solver = SolverKind::rm_sa;
    cfg.budget = 100;
    cfg.stepsize = {0.1, 1.0};
    cfg.fprime_hint = 1.0;
    cfg.projection = Box::interval(-5, 5);
    const RunTrace t = run_sa_adaptive(identity_quantile(0.5), NormalShiftFamily{}, cfg);
    CHECK(t.warnings.size() == 1);
    cfg.stepsize = {1.0, 1.0};
    CHECK(run_sa_adaptive(identity_quantile(0.5), NormalShiftFamily{}, cfg).warnings.empty());
}

TEST_CASE("overflowing likelihood ratios abort with the iteration") {
    struct Huge : NormalShiftFamily {
        double log_likelihood_ratio(const Vec&, const Vec&) const override { return 800.0; }
    };
    AdaptiveRunConfig cfg;
    cfg.budget = 10;
    try {
        run_saa_adaptive(identity_quantile(0.5), Huge{}, cfg);
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(e.iteration() == std::optional<std::size_t>{1});
    }
}

TEST_CASE("selector failures surface as solver errors") {
    AdaptiveRunConfig cfg;
    cfg.budget = 50;
    // Median of N(0,1) passes through q <= 0 where the exponential selector is undefined.
    const QuantileProblem prob{[](const Vec& x) { return x[0] - 1.0; }, 0.5, Tail::lower};
    CHECK_THROWS_AS(run_saa_adaptive(prob, ExponentialTiltFamily(1.0), cfg), SolverError);
}

TEST_CASE("identical seeds give byte-identical traces") {
    for (SolverKind s : {SolverKind::saa, SolverKind::rm_sa, SolverKind::pr_sa}) {
        AdaptiveRunConfig cfg;
        cfg.solver = s;
        cfg.budget = 3000;
        cfg.seed = 99;
        cfg.stepsize = {30.0, s == SolverKind::pr_sa ? 0.9 : 1.0};
        cfg.projection = Box::interval(0, 5);
        cfg.retain_samples = true;
        const auto prob = identity_quantile(0.99, Tail::upper);
        const RunTrace a = run_adaptive(prob, NormalShiftFamily{}, cfg);
        const RunTrace b = run_adaptive(prob, NormalShiftFamily{}, cfg);
        CHECK(bitwise_equal(a, b));
        cfg.seed = 100;
        CHECK_FALSE(bitwise_equal(a, run_adaptive(prob, NormalShiftFamily{}, cfg)));
    }
}

TEST_CASE("no-IS runs match a crude reference implementation exactly") {
    const double p = 0.9;
    const std::size_t n = 3000;
    const std::uint64_t seed = 4242;

    // Crude SAA: classical empirical quantile of the first k draws.
    std::vector<double> crude_saa, crude_sa;
    {
        Rng rng(seed);
        std::vector<double> xs;
        for (std::size_t k = 1; k <= n; ++k) {
            xs.push_back(rng.normal());
            std::vector<double> sorted = xs;
            std::sort(sorted.begin(), sorted.end());
            const long double target = static_cast<long double>(p) * k;
            std::size_t i = 0;
            while (static_cast<long double>(i + 1) < target) ++i;
            crude_saa.push_back(sorted[i]);
        }
    }
    {
        Rng rng(seed);
        double t = 2.5;
        for (std::size_t k = 1; k <= n; ++k) {
            const double x = rng.normal();
            t -= (2.0 / static_cast<double>(k)) * ((x <= t ? 1.0 : 0.0) - p);
            t = std::clamp(t, 0.0, 5.0);
            crude_sa.push_back(t);
        }
    }

    const InertNormal inert;
    for (bool use_mode : {true, false}) {
        AdaptiveRunConfig cfg;
        cfg.budget = n;
        cfg.seed = seed;
        cfg.is_mode = use_mode ? ISMode::none : ISMode::adaptive;
        const ISFamily& fam = use_mode ? static_cast<const ISFamily&>(NormalShiftFamily{}) : inert;

        const RunTrace saa = run_saa_adaptive(identity_quantile(p), fam, cfg);
        CHECK(saa.iterates == crude_saa);
        CHECK(std::all_of(saa.log_lrs.begin(), saa.log_lrs.end(), [](double l) { return l == 0.0; }));

        cfg.solver = SolverKind::rm_sa;
        cfg.stepsize = {2.0, 1.0};
        cfg.projection = Box::interval(0, 5);
        const RunTrace sa = run_sa_adaptive(identity_quantile(p), fam, cfg);
        CHECK(sa.iterates == crude_sa);
        CHECK(std::all_of(sa.log_lrs.begin(), sa.log_lrs.end(), [](double l) { return l == 0.0; }));
    }
}

TEST_CASE("upper tail is the lower tail of the negated output") {
    for (SolverKind s : {SolverKind::saa, SolverKind::rm_sa}) {
        AdaptiveRunConfig cfg;
        cfg.solver = s;
        cfg.budget = 2000;
        cfg.seed = 5;
        cfg.is_mode = ISMode::none;
        cfg.projection = Box::interval(0, 5);
        cfg.stepsize = {10.0, 1.0};
        const RunTrace up = run_adaptive(identity_quantile(0.95, Tail::upper), NormalShiftFamily{}, cfg);
        cfg.projection = Box::interval(-5, 0);
        const QuantileProblem neg{[](const Vec& x) { return -x[0]; }, 1.0 - 0.95, Tail::lower};
        const RunTrace low = run_adaptive(neg, NormalShiftFamily{}, cfg);
        CHECK(up.final_estimate[0] == -low.final_estimate[0]);
    }
}

TEST_CASE("adaptive SAA concentrates on the normal 0.99 quantile") {
    AdaptiveRunConfig cfg;
    cfg.budget = 20000;
    cfg.seed = 8;
    cfg.truncation = TruncationSchedule::sqrt_log();
    const RunTrace t = run_saa_adaptive(identity_quantile(0.99, Tail::upper), NormalShiftFamily{}, cfg);
    CHECK(std::abs(t.final_estimate[0] - normal_quantile(0.99)) < 0.05);
    // The tilt follows the estimate once the truncation set allows it.
    CHECK(t.is_params.back() == doctest::Approx(t.iterates[t.length() - 2]));
}
