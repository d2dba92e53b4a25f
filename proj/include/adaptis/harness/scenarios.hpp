#pragma once

#include <memory>
#include <string>

#include "adaptis/engines/config.hpp"
#include "adaptis/family.hpp"
#include "adaptis/problem.hpp"

namespace adaptis {

enum class Scenario { normal, exponential, pareto, portfolio, custom };

const char* to_string(Scenario s);
Scenario parse_scenario(const std::string& name);

/// Analytic p-quantile of the toy distributions (lambda ignored for normal).
double true_quantile(Scenario s, double p, double lambda = 2.0);
/// Density at x of the toy distributions.
double toy_density(Scenario s, double x, double lambda = 2.0);

/// Upper-tail quantile experiment on one of the three toy distributions,
/// with the solver settings used throughout the experiments: growing
/// truncation sets for SAA, a fixed projection box and gamma = 1/f(q*) for SA.
struct ToyScenario {
    Scenario kind = Scenario::normal;
    double p = 0.99;
    double lambda = 2.0;
    double q_star = 0.0;
    double density = 0.0;  // f(q*)
    std::shared_ptr<const ISFamily> family;
    QuantileProblem problem;
    Box sa_box;

    /// Asymptotic variance of sqrt(n)(q_n - q*) for SAA / PR-SA under the given mode.
    double asymptotic_variance(ISMode mode) const;
    /// RM-SA variant with the scenario's gamma.
    double rm_asymptotic_variance(ISMode mode) const;
    /// I(q*), the frozen tilt for fixed-optimal runs.
    double optimal_param() const;
    double gamma() const { return 1.0 / density; }

    AdaptiveRunConfig run_config(SolverKind solver, ISMode mode, std::size_t n, std::uint64_t seed) const;
};

ToyScenario make_toy_scenario(Scenario s, double p, double lambda = 2.0);

/// One replication with alpha frozen at I(q*).
double fixed_optimal_is_run(Scenario s, double p, std::size_t n, std::uint64_t seed,
                            SolverKind solver = SolverKind::saa, double lambda = 2.0);

}  // namespace adaptis
