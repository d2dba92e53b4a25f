#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "adaptis/engines/adaptive.hpp"
#include "adaptis/errors.hpp"
#include "adaptis/harness/duality.hpp"
#include "adaptis/harness/experiment.hpp"
#include "adaptis/harness/scenarios.hpp"
#include "adaptis/normal_dist.hpp"
#include "adaptis/samplers/toy_families.hpp"
#include "support/oracles.hpp"

using namespace adaptis;

namespace {

ExperimentPlan constant_plan() {
    ExperimentPlan plan;
    plan.scenario = Scenario::custom;
    plan.replications = 2;
    plan.custom_run = [](double p, std::size_t, SolverKind, ISMode, std::uint64_t) { return p; };
    plan.custom_truth = 0.5;
    return plan;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("true quantiles") {
    for (double p : {0.5, 0.99, 0.999, 0.9999})
        CHECK(std::abs(true_quantile(Scenario::normal, p) - oracle::normal_quantile_ref(p)) < 1e-12 * 4);
    CHECK(true_quantile(Scenario::exponential, 0.999, 2.0) == doctest::Approx(-std::log(0.001) / 2).epsilon(1e-14));
    CHECK(true_quantile(Scenario::pareto, 0.999, 2.0) == doctest::Approx(std::sqrt(1000.0)).epsilon(1e-13));
    CHECK_THROWS_AS(true_quantile(Scenario::normal, 1.0), Error);
}

TEST_CASE("toy scenario wiring") {
    const ToyScenario t = make_toy_scenario(Scenario::exponential, 0.999, 2.0);
    CHECK(t.optimal_param() == exponential_selector(2.0, t.q_star));
    CHECK(t.family->select(Vec{t.q_star})[0] == t.optimal_param());
    CHECK(t.density == doctest::Approx(2.0 * 0.001).epsilon(1e-12));
    const auto c = t.run_config(SolverKind::pr_sa, ISMode::fixed, 1000, 3);
    CHECK(c.fixed_param[0] == t.optimal_param());
    CHECK(c.stepsize.exponent == 0.9);
    CHECK(c.stepsize.gamma == doctest::Approx(1.0 / t.density));

    const ToyScenario n = make_toy_scenario(Scenario::normal, 0.999);
    CHECK(n.asymptotic_variance(ISMode::adaptive) == doctest::Approx(normal_asymptotic_variance(n.q_star, 0.999)));
    CHECK(n.asymptotic_variance(ISMode::none) == doctest::Approx(0.999 * 0.001 / std::pow(normal_pdf(n.q_star), 2)));
    // gamma = 1/f makes the RM variance coincide with the SAA variance.
    CHECK(n.rm_asymptotic_variance(ISMode::adaptive) == doctest::Approx(n.asymptotic_variance(ISMode::adaptive)));
}

TEST_CASE("fixed-optimal run freezes the tilt at I(q*)") {
    const ToyScenario t = make_toy_scenario(Scenario::normal, 0.999);
    const RunTrace tr = run_adaptive(t.problem, *t.family, t.run_config(SolverKind::saa, ISMode::fixed, 500, 9));
    for (double a : tr.is_params) CHECK(a == t.optimal_param());
    CHECK(fixed_optimal_is_run(Scenario::normal, 0.999, 500, 9) == tr.final_estimate[0]);
}

TEST_CASE("adaptive estimates are consistent at p = 0.99") {
    // |q_n - q*| below 0.05 (relative to q* for the Pareto scale) on at least 195 of 200 seeds.
    for (Scenario s : {Scenario::normal, Scenario::exponential, Scenario::pareto}) {
        const ToyScenario t = make_toy_scenario(s, 0.99, 2.0);
        const double tol = s == Scenario::pareto ? 0.05 * t.q_star : 0.05;
        for (SolverKind solver : {SolverKind::saa, SolverKind::rm_sa, SolverKind::pr_sa}) {
            int hits = 0;
            for (std::uint64_t seed = 0; seed < 200; ++seed) {
                const RunTrace tr = run_adaptive(t.problem, *t.family,
                                                 t.run_config(solver, ISMode::adaptive, 100000, 7000 + seed));
                hits += std::abs(tr.final_estimate[0] - t.q_star) < tol;
            }
            const std::string label = std::string(to_string(s)) + " " + to_string(solver) + " hits=" + std::to_string(hits);
            INFO(label);
            CHECK(hits >= 195);
        }
    }
}

TEST_CASE("summary statistics") {
    const CellResult r = summarize({1.0, 2.0, 3.0, 6.0}, 0, 2.0);
    CHECK(r.mean == 3.0);
    CHECK(r.variance == doctest::Approx(14.0 / 3.0));
    CHECK(r.mse == doctest::Approx((1.0 + 0.0 + 1.0 + 16.0) / 4.0));
    // MSE = (k-1)/k variance + bias^2.
    CHECK(r.mse == doctest::Approx(0.75 * r.variance + 1.0));
    CHECK(summarize({1.0, 1.0}, 1, 1.0).valid == false);
}

TEST_CASE("deterministic plan has zero variance") {
    const ResultTable t = run_experiment(constant_plan());
    REQUIRE_FALSE(t.cells.empty());
    for (const auto& [k, c] : t.cells) {
        CHECK(c.variance == 0.0);
        CHECK(c.valid);
    }
    ExperimentPlan bad = constant_plan();
    bad.replications = 1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("CSV emission") {
    const std::string header = "scenario,p,n,solver,is_mode,mean,variance,mse,ratio\n";
    CHECK(to_csv(ResultTable{}) == header);

    ResultTable one;
    CellResult c;
    c.mean = 0.1 + 0.2;
    c.variance = 1.0 / 3.0;
    c.mse = 2.5e-300;
    one.cells[{"normal", 0.999, 128000, "saa", "is"}] = c;
    const std::string text = to_csv(one);
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
    const ResultTable back = parse_csv(text);
    REQUIRE(back.cells.size() == 1);
    const auto& [k, v] = *back.cells.begin();
    CHECK(k == one.cells.begin()->first);
    CHECK(v.mean == c.mean);
    CHECK(v.variance == c.variance);
    CHECK(v.mse == c.mse);
    CHECK(std::isnan(v.ratio));
    CHECK(to_csv(back) == text);

    const std::string path = "csv_roundtrip_test.csv";
    emit_csv(one, path);
    CHECK(slurp(path) == text);
    std::remove(path.c_str());
    CHECK_THROWS_AS(emit_csv(one, "/nonexistent-dir/x.csv"), IoError);
}

TEST_CASE("paper-scale plan shape") {
    ExperimentPlan plan = constant_plan();
    plan.sizes.clear();
    for (int k = 0; k <= 8; ++k) plan.sizes.push_back(500u << k);
    plan.p_levels = {0.99, 0.999};
    const ResultTable t = run_experiment(plan);
    CHECK(t.cells.size() == 2 * 54);
    const std::string csv = to_csv(t);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * 54);
}

TEST_CASE("experiments are deterministic and ratios consistent") {
    ExperimentPlan plan;
    plan.scenario = Scenario::normal;
    plan.p_levels = {0.99};
    plan.sizes = {2000};
    plan.replications = 12;
    plan.is_modes = {ISMode::adaptive, ISMode::none, ISMode::fixed};
    plan.jobs = 1;
    const std::string a = to_csv(run_experiment(plan));
    plan.jobs = 3;
    const ResultTable tb = run_experiment(plan);
    CHECK(to_csv(tb) == a);
    int checked = 0;
    for (const auto& [k, c] : tb.cells) {
        CellKey nk = k;
        nk.is_mode = "no_is";
        const CellResult& base = tb.cells.at(nk);
        CHECK(c.ratio == base.variance / c.variance);
        ++checked;
    }
    CHECK(checked == 9);
    // The ratio survives the CSV round trip exactly.
    const ResultTable back = parse_csv(a);
    for (const auto& [k, c] : back.cells) CHECK(c.ratio == tb.cells.at(k).ratio);
}

TEST_CASE("experiment plans parse from JSON") {
    const ExperimentPlan p = parse_plan(slurp(std::string(ADAPTIS_SOURCE_DIR) + "/configs/example_plan.json"));
    CHECK(p.scenario == Scenario::normal);
    CHECK(p.replications >= 2);
    CHECK_THROWS_AS(parse_plan("{\"replications\": 1}"), ConfigError);
    CHECK_THROWS_AS(parse_plan("{\"solvers\": [\"newton\"]}"), Error);
    CHECK_THROWS_AS(parse_plan("not json"), ConfigError);
}

TEST_CASE("duality demo") {
    const auto one = duality_demo({1.0}, {2.0}, normal_quantile_surface);
    CHECK(one.maxmin == one.minmax);
    const auto flat = duality_demo({1.0, 2.0, 3.0}, {0.0, 1.0, 2.0},
                                   [](double th, double) { return th * th; });
    CHECK(flat.maxmin == flat.minmax);

    const DualityResult d = normal_duality_demo();
    CHECK(d.maxmin <= d.minmax);
    CHECK(d.holds());
    // Exhaustive re-evaluation of the shipped grid.
    double maxmin = -INFINITY, minmax = INFINITY;
    for (double th : {1.5, 2.5, 3.5}) {
        double m = INFINITY;
        for (int i = 0; i <= 100; ++i) m = std::min(m, normal_quantile_surface(th, 0.05 * i));
        maxmin = std::max(maxmin, m);
    }
    for (int i = 0; i <= 100; ++i) {
        double m = -INFINITY;
        for (double th : {1.5, 2.5, 3.5}) m = std::max(m, normal_quantile_surface(th, 0.05 * i));
        minmax = std::min(minmax, m);
    }
    CHECK(d.maxmin == maxmin);
    CHECK(d.minmax == minmax);
}

TEST_CASE("Monte Carlo duality surface") {
    std::vector<double> alphas;
    for (int i = 0; i <= 20; ++i) alphas.push_back(0.2 * i);
    const DualityResult d = duality_demo(
        {1.5, 2.5}, alphas, NormalShiftFamily{}, [](const Vec& x, double th) { return x[0] >= th ? 1.0 : 0.0; },
        [](double th) { return normal_pdf(th); }, 20000, 5);
    CHECK(d.mc_error > 0.0);
    CHECK(d.holds());
    CHECK(d.maxmin == doctest::Approx(normal_quantile_surface(2.5, alphas[d.argmin_alpha])).epsilon(0.5));
}
