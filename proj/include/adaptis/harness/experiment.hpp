#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "adaptis/engines/config.hpp"
#include "adaptis/harness/scenarios.hpp"
#include "adaptis/portfolio/portfolio.hpp"

namespace adaptis {

struct ExperimentPlan {
    Scenario scenario = Scenario::normal;
    std::vector<double> p_levels{0.99};
    std::vector<std::size_t> sizes{500};
    std::size_t replications = 200;
    std::vector<SolverKind> solvers{SolverKind::saa, SolverKind::rm_sa, SolverKind::pr_sa};
    std::vector<ISMode> is_modes{ISMode::adaptive, ISMode::none};
    std::uint64_t seed = 1;
    unsigned jobs = 1;
    double lambda = 2.0;

    // Portfolio scenario only.
    std::optional<PortfolioSpec> portfolio;
    std::optional<double> sa_gamma;
    std::optional<std::pair<double, double>> sa_box;
    /// Reference VaR for the MSE column; NaN leaves MSE undefined.
    std::optional<double> reference_value;

    /// Custom scenario: one replication -> estimate.
    std::function<double(double p, std::size_t n, SolverKind, ISMode, std::uint64_t seed)> custom_run;
    std::optional<double> custom_truth;

    /// Throws ConfigError (replications < 2, empty lists, bad levels).
    void validate() const;
    /// Every section of the plan is its own replication stream; this is the
    /// seed of replication `rep` in the cell keyed by (p, n, solver, mode).
    std::uint64_t replication_seed(double p, std::size_t n, SolverKind solver, ISMode mode,
                                   std::size_t rep) const;
};

/// Parses a JSON experiment plan (scenario, p, n, replications, solvers,
/// is_modes, seed, jobs, lambda, portfolio, sa_gamma, sa_box).
ExperimentPlan parse_plan(const std::string& json_text);

struct CellKey {
    std::string scenario;
    double p = 0.0;
    std::size_t n = 0;
    std::string solver;
    std::string is_mode;

    auto tie() const { return std::tie(scenario, p, n, solver, is_mode); }
    friend bool operator<(const CellKey& a, const CellKey& b) { return a.tie() < b.tie(); }
    friend bool operator==(const CellKey& a, const CellKey& b) { return a.tie() == b.tie(); }
};

struct CellResult {
    double mean = 0.0;
    double variance = 0.0;  // sample variance (n - 1 denominator)
    double mse = 0.0;       // mean squared error against the reference value
    double ratio = std::numeric_limits<double>::quiet_NaN();  // var(no-IS) / var(this)
    std::size_t failures = 0;
    bool valid = true;  // false when more than 1% of replications failed
    std::vector<double> estimates;
};

struct ResultTable {
    std::map<CellKey, CellResult> cells;

    /// Fills `ratio` for every cell that has a matching no-IS cell.
    void compute_ratios();
};

ResultTable run_experiment(const ExperimentPlan& plan);

/// Summary statistics used by the runner (exposed for tests).
CellResult summarize(std::vector<double> estimates, std::size_t failures, double truth);

/// CSV with header scenario,p,n,solver,is_mode,mean,variance,mse,ratio;
/// lexicographic key order, shortest round-trip floats, LF line endings.
std::string to_csv(const ResultTable& table);
void emit_csv(const ResultTable& table, const std::string& path);
ResultTable parse_csv(const std::string& text);

/// Shortest decimal string that parses back to exactly `x`.
std::string format_double(double x);

}  // namespace adaptis
