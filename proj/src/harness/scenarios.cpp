#include "adaptis/harness/scenarios.hpp"

#include <cmath>

#include "adaptis/engines/adaptive.hpp"
#include "adaptis/errors.hpp"
#include "adaptis/normal_dist.hpp"
#include "adaptis/samplers/toy_families.hpp"

namespace adaptis {

const char* to_string(Scenario s) {
    switch (s) {
        case Scenario::normal: return "normal";
        case Scenario::exponential: return "exponential";
        case Scenario::pareto: return "pareto";
        case Scenario::portfolio: return "portfolio";
        case Scenario::custom: return "custom";
    }
    return "?";
}

Scenario parse_scenario(const std::string& name) {
    if (name == "normal") return Scenario::normal;
    if (name == "exponential") return Scenario::exponential;
    if (name == "pareto") return Scenario::pareto;
    if (name == "portfolio") return Scenario::portfolio;
    if (name == "custom") return Scenario::custom;
    throw ConfigError("unknown scenario '" + name + "'");
}

double true_quantile(Scenario s, double p, double lambda) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile level must lie in (0, 1)");
    switch (s) {
        case Scenario::normal: return normal_quantile(p);
        case Scenario::exponential: return -std::log1p(-p) / lambda;
        case Scenario::pareto: return std::pow(1.0 - p, -1.0 / lambda);
        default: throw UsageError("no analytic quantile for this scenario");
    }
}

double toy_density(Scenario s, double x, double lambda) {
    switch (s) {
        case Scenario::normal: return normal_pdf(x);
        case Scenario::exponential: return x < 0.0 ? 0.0 : lambda * std::exp(-lambda * x);
        case Scenario::pareto: return x < 1.0 ? 0.0 : lambda * std::pow(x, -lambda - 1.0);
        default: throw UsageError("no analytic density for this scenario");
    }
}

ToyScenario make_toy_scenario(Scenario s, double p, double lambda) {
    ToyScenario t;
    t.kind = s;
    t.p = p;
    t.lambda = lambda;
    t.q_star = true_quantile(s, p, lambda);
    t.density = toy_density(s, t.q_star, lambda);
    t.problem = QuantileProblem{[](const Vec& x) { return x[0]; }, p, Tail::upper};
    switch (s) {
        case Scenario::normal:
            t.family = std::make_shared<NormalShiftFamily>();
            t.sa_box = Box::interval(0.0, 5.0);
            break;
        case Scenario::exponential:
            // The selector needs q > 0, so the box starts just above zero.
            t.family = std::make_shared<ExponentialTiltFamily>(lambda);
            t.sa_box = Box::interval(0.1, 5.0);
            break;
        case Scenario::pareto:
            t.family = std::make_shared<ParetoTiltFamily>(lambda);
            // q* ranges over two decades across the p grid, so the box scales with it.
            t.sa_box = Box::interval(1.0 + 0.25 * (t.q_star - 1.0), 3.0 * t.q_star);
            break;
        default:
            throw UsageError("not a toy scenario");
    }
    if (!t.sa_box.contains(Vec{t.q_star}))
        throw ConfigError("true quantile lies outside the scenario's projection box");
    return t;
}

double ToyScenario::optimal_param() const { return family->select(Vec{q_star})[0]; }

double ToyScenario::asymptotic_variance(ISMode mode) const {
    const double a = mode == ISMode::none ? family->base_param()[0] : optimal_param();
    switch (kind) {
        case Scenario::normal: return normal_is_variance(q_star, a);
        case Scenario::exponential: return exponential_is_variance(lambda, q_star, a);
        case Scenario::pareto: return pareto_is_variance(lambda, q_star, a);
        default: throw UsageError("not a toy scenario");
    }
}

double ToyScenario::rm_asymptotic_variance(ISMode mode) const {
    const double num = asymptotic_variance(mode) * density * density;
    return adaptis::rm_asymptotic_variance(gamma(), density, num);
}

AdaptiveRunConfig ToyScenario::run_config(SolverKind solver, ISMode mode, std::size_t n,
                                          std::uint64_t seed) const {
    AdaptiveRunConfig c;
    c.solver = solver;
    c.budget = n;
    c.seed = seed;
    c.is_mode = mode;
    if (mode == ISMode::fixed) c.fixed_param = Vec{optimal_param()};
    c.initial_theta = Vec{0.5 * (sa_box.lo[0] + sa_box.hi[0])};
    if (solver == SolverKind::saa) {
        c.truncation = kind == Scenario::normal ? TruncationSchedule::sqrt_log(5.0, 0.1)
                                                : TruncationSchedule::tilt(lambda, 1e-8, 1.0, 0.1);
    } else {
        c.projection = sa_box;
        c.stepsize = {gamma(), solver == SolverKind::rm_sa ? 1.0 : 0.9};
        c.burn_in = 100;
        c.fprime_hint = density;
    }
    return c;
}

double fixed_optimal_is_run(Scenario s, double p, std::size_t n, std::uint64_t seed,
                            SolverKind solver, double lambda) {
    const ToyScenario t = make_toy_scenario(s, p, lambda);
    return run_adaptive(t.problem, *t.family, t.run_config(solver, ISMode::fixed, n, seed)).final_estimate[0];
}

}  // namespace adaptis
