// Command-line front end: replication experiments, the duality grid and a selftest.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "adaptis/errors.hpp"
#include "adaptis/harness/duality.hpp"
#include "adaptis/harness/experiment.hpp"
#include "adaptis/harness/selftest.hpp"
#include "adaptis/portfolio/portfolio.hpp"

namespace {

constexpr int kOk = 0, kUsage = 1, kRunFailure = 2, kCheckFailure = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw adaptis::IoError("cannot open '" + path + "'");
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

struct CommonFlags {
    std::string scenario = "normal";
    std::vector<double> p;
    std::vector<std::size_t> n;
    std::size_t reps = 200;
    std::vector<std::string> solvers;
    std::vector<std::string> is_modes;
    std::uint64_t seed = 1;
    std::string out;
    std::string config;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
};

void add_common(CLI::App* app, CommonFlags& f) {
    app->add_option("--p", f.p, "quantile level(s)");
    app->add_option("--n", f.n, "sample size(s)");
    app->add_option("--reps", f.reps, "replications per cell");
    app->add_option("--solver", f.solvers, "saa | rm_sa | pr_sa (repeatable)");
    app->add_option("--is-mode", f.is_modes, "is | no_is | fixed_is (repeatable)");
    app->add_option("--seed", f.seed, "base seed");
    app->add_option("--out", f.out, "CSV output path (stdout when omitted)");
    app->add_option("--jobs", f.jobs, "worker threads");
}

void apply_common(const CommonFlags& f, adaptis::ExperimentPlan& plan) {
    if (!f.p.empty()) plan.p_levels = f.p;
    if (!f.n.empty()) plan.sizes = f.n;
    plan.replications = f.reps;
    if (!f.solvers.empty()) {
        plan.solvers.clear();
        for (const auto& s : f.solvers) plan.solvers.push_back(adaptis::parse_solver(s.c_str()));
    }
    if (!f.is_modes.empty()) {
        plan.is_modes.clear();
        for (const auto& s : f.is_modes) plan.is_modes.push_back(adaptis::parse_is_mode(s.c_str()));
    }
    plan.seed = f.seed;
    plan.jobs = f.jobs;
}

void write_table(const adaptis::ResultTable& t, const std::string& out) {
    if (out.empty()) std::cout << adaptis::to_csv(t);
    else adaptis::emit_csv(t, out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive importance sampling for stochastic root finding and quantile estimation"};
    app.require_subcommand(1);

    CommonFlags toy_f, pf_f;
    auto* toy = app.add_subcommand("toy", "normal / exponential / Pareto quantile experiments");
    toy->add_option("--scenario", toy_f.scenario, "normal | exponential | pareto");
    toy->add_option("--config", toy_f.config, "JSON experiment plan (flags override)");
    double lambda = 2.0;
    toy->add_option("--lambda", lambda, "rate / tail index for exponential and Pareto");
    add_common(toy, toy_f);

    auto* pf = app.add_subcommand("portfolio", "delta-gamma VaR / CVaR experiments");
    pf->add_option("--config", pf_f.config, "portfolio JSON (defaults to the ten-asset book)");
    std::optional<double> gamma;
    std::vector<double> box;
    pf->add_option("--gamma", gamma, "SA stepsize constant");
    pf->add_option("--box", box, "SA projection box for the loss level: lo hi")->expected(2);
    add_common(pf, pf_f);

    auto* dual = app.add_subcommand("duality", "max-min vs min-max on the normal grid");
    auto* self = app.add_subcommand("selftest", "quick invariant checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        if (*toy) {
            adaptis::ExperimentPlan plan;
            if (!toy_f.config.empty()) plan = adaptis::parse_plan(read_file(toy_f.config));
            if (toy->count("--scenario") || toy_f.config.empty())
                plan.scenario = adaptis::parse_scenario(toy_f.scenario);
            if (toy->count("--lambda")) plan.lambda = lambda;
            apply_common(toy_f, plan);
            if (plan.scenario == adaptis::Scenario::portfolio || plan.scenario == adaptis::Scenario::custom)
                throw adaptis::ConfigError("toy supports normal, exponential and pareto");
            write_table(adaptis::run_experiment(plan), toy_f.out);
        } else if (*pf) {
            adaptis::ExperimentPlan plan;
            plan.scenario = adaptis::Scenario::portfolio;
            plan.p_levels = {0.999};
            plan.sizes = {32000};
            plan.solvers = {adaptis::SolverKind::saa, adaptis::SolverKind::pr_sa};
            if (!pf_f.config.empty()) plan.portfolio = adaptis::load_portfolio(pf_f.config);
            plan.sa_gamma = gamma;
            if (box.size() == 2) plan.sa_box = std::make_pair(box[0], box[1]);
            apply_common(pf_f, plan);
            write_table(adaptis::run_experiment(plan), pf_f.out);
        } else if (*dual) {
            const adaptis::DualityResult d = adaptis::normal_duality_demo();
            std::printf("maxmin=%.10g minmax=%.10g holds=%s\n", d.maxmin, d.minmax, d.holds() ? "yes" : "no");
            return d.holds() ? kOk : kCheckFailure;
        } else if (*self) {
            bool all = true;
            for (const auto& c : adaptis::run_selftest()) {
                std::printf("%s  %s%s%s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                            c.detail.empty() ? "" : "  ", c.detail.c_str());
                all = all && c.passed;
            }
            return all ? kOk : kCheckFailure;
        }
    } catch (const adaptis::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const adaptis::UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "run failed: %s\n", e.what());
        return kRunFailure;
    }
    return kOk;
}
