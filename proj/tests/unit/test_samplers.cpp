#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "adaptis/errors.hpp"
#include "adaptis/normal_dist.hpp"
#include "adaptis/rng.hpp"
#include "adaptis/samplers/toy_families.hpp"
#include "support/oracles.hpp"

using namespace adaptis;

namespace {

// Exact E_alpha[(1{X >= q} l)^2] for the two tilt families, written from the
// integral rather than copied from the library.
long double expo_m2(long double lam, long double q, long double a) {
    return lam * lam * std::exp(-(2 * lam - a) * q) / (a * (2 * lam - a));
}

struct Draws {
    std::vector<double> y, y2;
};

// Y = 1{X >= q} l(X, alpha) under X ~ P_alpha.
Draws tail_weights(const ISFamily& fam, double q, double alpha, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    Draws d;
    d.y.reserve(n);
    d.y2.reserve(n);
    Vec x, a{alpha};
    for (std::size_t i = 0; i < n; ++i) {
        fam.sample(a, rng, x);
        const double v = x[0] >= q ? std::exp(fam.log_likelihood_ratio(x, a)) : 0.0;
        d.y.push_back(v);
        d.y2.push_back(v * v);
    }
    return d;
}

double sample_variance(const std::vector<double>& v) {
    long double m = 0, s = 0;
    for (double x : v) m += x;
    m /= v.size();
    for (double x : v) s += (x - m) * (x - m);
    return static_cast<double>(s / (v.size() - 1));
}

}  // namespace

TEST_CASE("normal selector is the identity") {
    CHECK(normal_selector(2.0) == 2.0);
    CHECK(normal_selector(0.0) == 0.0);
    CHECK(normal_selector(-1.5) == -1.5);
}

TEST_CASE("exponential selector examples") {
    CHECK(exponential_selector(2.0, 1.0) == doctest::Approx(3.0 - std::sqrt(5.0)).epsilon(1e-14));
    CHECK(exponential_selector(2.0, 10.0) == doctest::Approx((21.0 - std::sqrt(401.0)) / 10.0).epsilon(1e-13));
    CHECK(exponential_selector(1.0, 1e-300) == 1.0);
    CHECK_THROWS_AS(exponential_selector(2.0, 0.0), DomainError);
    CHECK_THROWS_AS(exponential_selector(2.0, -1.0), DomainError);
    const auto obj = [](long double a) { return expo_m2(2, 1, a); };
    CHECK(std::abs(exponential_selector(2.0, 1.0) - oracle::golden_section_min(obj, 1e-9L, 4 - 1e-9L)) < 1e-6);
}

TEST_CASE("pareto selector examples") {
    CHECK(pareto_selector(2.0, std::exp(1.0)) == doctest::Approx(3.0 - std::sqrt(5.0)).epsilon(1e-12));
    CHECK(pareto_selector(2.0, std::exp(10.0)) == doctest::Approx(0.097506).epsilon(1e-5));
    CHECK(pareto_selector(1.0, std::nextafter(1.0, 2.0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(pareto_selector(2.0, 1.0), DomainError);
    CHECK_THROWS_AS(pareto_selector(2.0, 0.5), DomainError);
}

TEST_CASE("closed-form selectors minimize the exact second moment") {
    for (double lam : {0.5, 1.0, 2.0, 3.5}) {
        for (double q : {0.05, 0.3, 1.0, 2.5, 6.0, 20.0}) {
            const auto expo = [&](long double a) { return std::log(expo_m2(lam, q, a)); };
            const double ref = oracle::golden_section_min(expo, 1e-12L, 2.0L * lam - 1e-12L, 1e-13L);
            CHECK(std::abs(exponential_selector(lam, q) - ref) < 1e-8);

            // Pareto with q' = e^q shares the optimizer; check it through its own moment.
            const long double qp = std::exp(static_cast<long double>(q));
            const auto par = [&](long double a) {
                return std::log(lam * lam / (a * (2 * lam - a))) + (a - 2 * lam) * std::log(qp);
            };
            const double ref_p = oracle::golden_section_min(par, 1e-12L, 2.0L * lam - 1e-12L, 1e-13L);
            CHECK(std::abs(pareto_selector(lam, static_cast<double>(qp)) - ref_p) < 1e-8);
        }
    }
}

TEST_CASE("normal selector minimizes the Chernoff bound on the second moment") {
    // exp(alpha^2 - 2 alpha q) bounds E_alpha[(1{Z >= q} l)^2]; its minimizer is the selector.
    for (double q : {-1.0, 0.0, 1.0, 2.326, 3.09, 3.719}) {
        const auto bound = [&](long double a) { return a * a - 2 * a * q; };
        CHECK(std::abs(normal_selector(q) - oracle::golden_section_min(bound, -10.0L, 10.0L, 1e-13L)) < 1e-8);
    }
}

TEST_CASE("tilt selectors stay inside (0, lambda) and are nonincreasing") {
    for (double lam : {0.5, 2.0, 7.0}) {
        double prev_e = lam, prev_p = lam;
        for (double q = 0.01; q < 200.0; q *= 1.3) {
            const double e = exponential_selector(lam, q);
            CHECK(e > 0.0);
            CHECK(e < lam);
            CHECK(e <= prev_e);
            prev_e = e;
            const double p = pareto_selector(lam, 1.0 + q);
            CHECK(p > 0.0);
            CHECK(p < lam);
            CHECK(p <= prev_p);
            prev_p = p;
        }
    }
}

TEST_CASE("family samplers reproduce their laws") {
    const std::size_t n = 100000;
    {
        Rng rng(11);
        NormalShiftFamily fam;
        std::vector<double> xs;
        Vec x;
        for (std::size_t i = 0; i < n; ++i) {
            fam.sample(Vec{0.0}, rng, x);
            xs.push_back(x[0]);
        }
        const auto m = oracle::mean_and_se(xs);
        CHECK(std::abs(m.mean) <= 4 * m.std_error);
    }
    {
        Rng rng(12);
        ExponentialTiltFamily fam(2.0);
        std::vector<double> xs;
        Vec x;
        for (std::size_t i = 0; i < n; ++i) {
            fam.sample(Vec{1.0}, rng, x);
            xs.push_back(x[0]);
        }
        const auto m = oracle::mean_and_se(xs);
        CHECK(std::abs(m.mean - 1.0) <= 4 * m.std_error);
    }
    {
        Rng rng(13);
        ParetoTiltFamily fam(2.0);
        std::vector<double> hits;
        Vec x;
        for (std::size_t i = 0; i < n; ++i) {
            fam.sample(Vec{1.5}, rng, x);
            REQUIRE(x[0] >= 1.0);
            hits.push_back(x[0] > 2.0 ? 1.0 : 0.0);
        }
        const auto m = oracle::mean_and_se(hits);
        CHECK(std::abs(m.mean - std::pow(2.0, -1.5)) <= 4 * m.std_error);
    }
}

TEST_CASE("inadmissible tilts are rejected") {
    Rng rng(1);
    Vec x;
    ExponentialTiltFamily e(2.0);
    ParetoTiltFamily p(2.0);
    CHECK_THROWS_AS(e.sample(Vec{4.0}, rng, x), DomainError);
    CHECK_THROWS_AS(e.sample(Vec{0.0}, rng, x), DomainError);
    CHECK_THROWS_AS(p.sample(Vec{-0.1}, rng, x), DomainError);
    CHECK_FALSE(e.admissible(Vec{4.0}));
    CHECK(e.admissible(Vec{3.9}));
}

TEST_CASE("unit-mean likelihood ratio for every family") {
    const NormalShiftFamily normal;
    const ExponentialTiltFamily expo(2.0);
    const ParetoTiltFamily pareto(2.0);
    struct Case {
        const ISFamily* fam;
        double alpha;
    };
    const Case cases[] = {{&normal, -2.0}, {&normal, 1.0}, {&normal, 3.0}, {&expo, 0.75},
                          {&expo, 1.5},    {&expo, 3.0},   {&pareto, 0.5}, {&pareto, 1.2}};
    std::uint64_t seed = 100;
    for (const auto& c : cases) {
        const auto m = check_unit_mean_lr(*c.fam, Vec{c.alpha}, 100000, seed++);
        CHECK(std::abs(m.mean - 1.0) <= 4.0 * m.std_error);
    }
}

TEST_CASE("IS estimates of a fixed-threshold probability are unbiased") {
    // E_alpha[1{X <= theta} l] against E_P[1{X <= theta}] with independent streams.
    const NormalShiftFamily normal;
    const ExponentialTiltFamily expo(2.0);
    struct Case {
        const ISFamily* fam;
        double alpha, theta;
    };
    const Case cases[] = {{&normal, 2.0, 1.5}, {&normal, -1.0, 0.3}, {&expo, 1.0, 0.8}, {&expo, 0.5, 2.0}};
    std::uint64_t seed = 500;
    for (const auto& c : cases) {
        Rng r_is(seed++), r_crude(seed++);
        std::vector<double> is, crude;
        Vec x;
        for (int i = 0; i < 100000; ++i) {
            c.fam->sample(Vec{c.alpha}, r_is, x);
            is.push_back(x[0] <= c.theta ? std::exp(c.fam->log_likelihood_ratio(x, Vec{c.alpha})) : 0.0);
            c.fam->sample(c.fam->base_param(), r_crude, x);
            crude.push_back(x[0] <= c.theta ? 1.0 : 0.0);
        }
        const auto a = oracle::mean_and_se(is), b = oracle::mean_and_se(crude);
        CHECK(std::abs(a.mean - b.mean) <= 4.0 * std::hypot(a.std_error, b.std_error));
    }
}

TEST_CASE("closed-form second moments agree with Monte Carlo") {
    std::mt19937_64 gen(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const NormalShiftFamily normal;
    for (int t = 0; t < 5; ++t) {
        const double q = 0.5 + 2.5 * u(gen), a = q * (0.6 + 0.6 * u(gen));
        const auto d = tail_weights(normal, q, a, 100000, 900 + t);
        const auto m = oracle::mean_and_se(d.y2);
        CHECK(std::abs(m.mean - normal_second_moment(q, a)) <= 4.0 * m.std_error);
    }
    for (int t = 0; t < 5; ++t) {
        const double lam = 0.5 + 2.0 * u(gen), q = (0.5 + 3.0 * u(gen)) / lam;
        const double a = lam * (0.3 + 0.9 * u(gen));  // keeps the fourth moment finite
        const ExponentialTiltFamily fam(lam);
        const auto d = tail_weights(fam, q, a, 100000, 950 + t);
        const auto m = oracle::mean_and_se(d.y2);
        CHECK(std::abs(m.mean - exponential_second_moment(lam, q, a)) <= 4.0 * m.std_error);
    }
    for (int t = 0; t < 5; ++t) {
        const double lam = 0.5 + 2.0 * u(gen), q = std::exp((0.5 + 3.0 * u(gen)) / lam);
        const double a = lam * (0.3 + 0.9 * u(gen));
        const ParetoTiltFamily fam(lam);
        const auto d = tail_weights(fam, q, a, 100000, 990 + t);
        const auto m = oracle::mean_and_se(d.y2);
        CHECK(std::abs(m.mean - pareto_second_moment(lam, q, a)) <= 4.0 * m.std_error);
    }
}

TEST_CASE("normal asymptotic variance examples") {
    CHECK(normal_asymptotic_variance(0.0, 0.5) == doctest::Approx(0.25 * 2 * std::numbers::pi).epsilon(1e-13));
    for (double q = 0.0; q < 6.0; q += 0.05)
        CHECK(normal_asymptotic_variance(q, normal_cdf(q)) <= std::numbers::pi);

    // q* = 0 against a 10^6-sample variance.
    {
        const auto d = tail_weights(NormalShiftFamily{}, 0.0, 0.0, 1000000, 31);
        const double mc = sample_variance(d.y) / std::pow(normal_pdf(0.0), 2);
        CHECK(std::abs(mc / normal_asymptotic_variance(0.0, 0.5) - 1.0) < 0.02);
    }
    const double q = 3.090;
    const double v = normal_asymptotic_variance(q, normal_cdf(q));
    CHECK(v > 0.0);
    CHECK(v < std::numbers::pi);
    const auto d = tail_weights(NormalShiftFamily{}, q, q, 1000000, 32);
    const double mc = sample_variance(d.y) / std::pow(normal_pdf(q), 2);
    CHECK(std::abs(mc / v - 1.0) < 0.02);
}

TEST_CASE("tilt asymptotic variances agree with Monte Carlo") {
    const double lam = 2.0;
    {
        const double q = -std::log(0.001) / lam;
        const double v = exponential_asymptotic_variance(lam, q);
        CHECK(v > 0.0);
        const ExponentialTiltFamily fam(lam);
        const auto d = tail_weights(fam, q, exponential_selector(lam, q), 1000000, 41);
        const double f = lam * std::exp(-lam * q);
        CHECK(std::abs(sample_variance(d.y) / (f * f) / v - 1.0) < 0.02);
        CHECK(exponential_is_variance(lam, q, exponential_selector(lam, q)) == doctest::Approx(v).epsilon(1e-10));
    }
    {
        const double q = std::pow(0.001, -1.0 / lam);
        const double v = pareto_asymptotic_variance(lam, q);
        CHECK(v > 0.0);
        const ParetoTiltFamily fam(lam);
        const auto d = tail_weights(fam, q, pareto_selector(lam, q), 1000000, 42);
        const double f = lam * std::pow(q, -lam - 1.0);
        CHECK(std::abs(sample_variance(d.y) / (f * f) / v - 1.0) < 0.02);
        CHECK(pareto_is_variance(lam, q, pareto_selector(lam, q)) == doctest::Approx(v).epsilon(1e-10));
    }
}

TEST_CASE("no-IS variance is the binomial quantile variance") {
    const double q = 2.326;
    const double p = normal_cdf(q);
    CHECK(normal_is_variance(q, 0.0) == doctest::Approx(p * (1 - p) / std::pow(normal_pdf(q), 2)).epsilon(1e-12));
}

TEST_CASE("RM asymptotic variance") {
    CHECK(rm_asymptotic_variance(1.0, 1.0, 2.0) == doctest::Approx(2.0));
    CHECK_THROWS_AS(rm_asymptotic_variance(0.5, 1.0, 2.0), DomainError);
}
