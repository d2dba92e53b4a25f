#include "adaptis/engines/adaptive.hpp"

#include <cmath>
#include <limits>

#include "adaptis/engines/param_policy.hpp"
#include "adaptis/engines/root_solve.hpp"
#include "adaptis/engines/weighted_quantile.hpp"
#include "adaptis/errors.hpp"

namespace adaptis {

using detail::ParamPolicy;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_budget(const AdaptiveRunConfig& c) {
    if (c.budget == 0) throw UsageError("sample budget must be >= 1");
}

void check_sa_config(const AdaptiveRunConfig& c) {
    check_budget(c);
    c.stepsize.validate();
    if (c.solver == SolverKind::rm_sa && c.stepsize.exponent != 1.0)
        throw ConfigError("RM-SA uses gamma / n (exponent 1)");
    if (c.solver == SolverKind::pr_sa && !(c.stepsize.exponent > 0.5 && c.stepsize.exponent < 1.0))
        throw ConfigError("PR-SA needs a stepsize exponent in (1/2, 1)");
    if (c.solver == SolverKind::saa) throw ConfigError("run_sa_adaptive called with the SAA solver");
    if (c.projection) c.projection->validate();
}

RunTrace make_trace(const ISFamily& family, std::size_t theta_dim, std::size_t n, bool retain) {
    RunTrace t;
    t.theta_dim = theta_dim;
    t.param_dim = family.param_dim();
    t.sample_dim = family.sample_dim();
    t.samples_retained = retain;
    t.iterates.reserve(n * theta_dim);
    t.is_params.reserve(n * t.param_dim);
    t.log_lrs.reserve(n);
    if (retain) t.sample_points.reserve(n * t.sample_dim);
    return t;
}

// Draws X_n ~ P_alpha and returns its weight, recording (alpha, x, log l).
double draw(const ISFamily& family, const Vec& alpha, Rng& rng, Vec& x, RunTrace& trace,
            std::size_t n) {
    family.sample(alpha, rng, x);
    const double lw = family.log_likelihood_ratio(x, alpha);
    const double w = std::exp(lw);
    if (!std::isfinite(w)) throw NumericalError("likelihood ratio overflowed", n);
    if (w == 0.0) ++trace.zero_weight_count;
    trace.is_params.insert(trace.is_params.end(), alpha.begin(), alpha.end());
    trace.log_lrs.push_back(lw);
    if (trace.samples_retained) trace.sample_points.insert(trace.sample_points.end(), x.begin(), x.end());
    return w;
}

Box sa_box(const AdaptiveRunConfig& c) {
    return c.projection ? *c.projection : Box::interval(-kInf, kInf);
}

double sa_start(const AdaptiveRunConfig& c, const Box& box) {
    if (c.initial_theta) {
        if (c.initial_theta->size() != 1) throw ConfigError("scalar engine needs a scalar theta_0");
        return (*c.initial_theta)[0];
    }
    if (std::isfinite(box.lo[0]) && std::isfinite(box.hi[0])) return 0.5 * (box.lo[0] + box.hi[0]);
    return project_interval(0.0, box.lo[0], box.hi[0]);
}

void rm_gain_warning(const AdaptiveRunConfig& c, RunTrace& trace) {
    if (c.solver == SolverKind::rm_sa && c.fprime_hint &&
        !(2.0 * c.stepsize.gamma * *c.fprime_hint > 1.0)) {
        trace.warnings.emplace_back(
            "RM-SA: 2 gamma f'(theta*) <= 1, the asymptotic normality claim does not apply");
    }
}

void finish_sa(const AdaptiveRunConfig& c, RunTrace& trace) {
    const double last = trace.iterates.back();
    trace.final_estimate =
        Vec{c.solver == SolverKind::pr_sa ? polyak_average(trace.iterates, c.burn_in) : last};
}

}  // namespace

double polyak_average(std::span<const double> iterates, std::size_t burn_in) {
    if (iterates.empty()) throw UsageError("polyak_average of an empty sequence");
    if (iterates.size() <= burn_in) return iterates.back();
    // Running mean: constant tails average to themselves exactly.
    double mean = 0.0;
    std::size_t k = 0;
    for (std::size_t i = burn_in; i < iterates.size(); ++i) {
        ++k;
        mean += (iterates[i] - mean) / static_cast<double>(k);
    }
    return mean;
}

RunTrace run_saa_adaptive(const QuantileProblem& problem, const ISFamily& family,
                          const AdaptiveRunConfig& config) {
    problem.validate();
    check_budget(config);
    const bool upper = problem.tail == Tail::upper;
    const double sign = upper ? -1.0 : 1.0;
    const double level = upper ? 1.0 - problem.p : problem.p;
    const std::size_t n_total = config.budget;

    RunTrace trace = make_trace(family, 1, n_total, config.retain_samples.value_or(true));
    ParamPolicy policy(family, config, true);
    Rng rng(config.seed);
    IncrementalWeightedQuantile wq(level);
    Vec x(family.sample_dim());

    Vec alpha = config.initial_theta ? policy.next(*config.initial_theta, 1)
                                     : (config.is_mode == ISMode::fixed ? config.fixed_param
                                                                        : family.base_param());
    if (!config.initial_theta && config.truncation && config.is_mode == ISMode::adaptive)
        alpha = project_box(alpha, config.truncation->set_at(1));

    double theta = 0.0;
    for (std::size_t n = 1; n <= n_total; ++n) {
        const double w = draw(family, alpha, rng, x, trace, n);
        wq.insert(sign * problem.h(x), w);
        theta = sign * wq.quantile();
        if (wq.degenerate()) trace.flagged.push_back(n);
        trace.iterates.push_back(theta);
        if (n < n_total) alpha = policy.next(Vec{theta}, n + 1);
    }
    trace.final_estimate = Vec{theta};
    return trace;
}

RunTrace run_saa_adaptive(const RootProblem& problem, const ISFamily& family,
                          const AdaptiveRunConfig& config) {
    problem.validate();
    check_budget(config);
    if (problem.dim != 1) throw UsageError("scalar SAA engine needs dim = 1; use run_saa_adaptive_md");
    if (config.refit_every == 0) throw ConfigError("refit_every must be >= 1");
    const std::size_t n_total = config.budget;

    RunTrace trace = make_trace(family, 1, n_total, true);
    ParamPolicy policy(family, config, true);
    Rng rng(config.seed);
    Vec x(family.sample_dim());
    std::vector<double> weights;
    weights.reserve(n_total);

    double theta = config.initial_theta ? (*config.initial_theta)[0] : 0.0;
    Vec alpha = config.initial_theta ? policy.next(Vec{theta}, 1)
                                     : (config.is_mode == ISMode::fixed ? config.fixed_param
                                                                        : family.base_param());
    const double c = problem.target[0];
    Vec out(1);
    const ScalarOutput F = [&](const Vec& xi, double t) {
        problem.evaluate(xi, Vec{t}, out);
        return out[0];
    };

    for (std::size_t n = 1; n <= n_total; ++n) {
        weights.push_back(draw(family, alpha, rng, x, trace, n));
        if (n % config.refit_every == 0 || n == n_total) {
            ScalarRootOptions opt;
            opt.start = theta;
            opt.initial_step = config.bracket_step;
            try {
                theta = solve_weighted_scalar_root({trace.sample_points, weights, family.sample_dim()},
                                                   F, c, opt);
            } catch (const BracketError& e) {
                throw SolverError(e.what(), n);
            }
        }
        trace.iterates.push_back(theta);
        if (n < n_total) alpha = policy.next(Vec{theta}, n + 1);
    }
    trace.final_estimate = Vec{theta};
    if (config.retain_samples == false) trace.sample_points.clear(), trace.samples_retained = false;
    return trace;
}

RunTrace run_sa_adaptive(const QuantileProblem& problem, const ISFamily& family,
                         const AdaptiveRunConfig& config) {
    problem.validate();
    check_sa_config(config);
    const bool upper = problem.tail == Tail::upper;
    const double sign = upper ? -1.0 : 1.0;
    const double level = upper ? 1.0 - problem.p : problem.p;
    const std::size_t n_total = config.budget;

    const Box box = sa_box(config);
    const Box ibox = upper ? negate(box) : box;  // box for the internal (sign-flipped) iterate
    const double lo = ibox.lo[0], hi = ibox.hi[0];

    RunTrace trace = make_trace(family, 1, n_total, config.retain_samples.value_or(false));
    rm_gain_warning(config, trace);
    ParamPolicy policy(family, config, true);
    Rng rng(config.seed);
    Vec x(family.sample_dim());

    const double theta0 = sa_start(config, box);
    double t = sign * theta0;
    Vec alpha = policy.next(Vec{theta0}, 1);

    for (std::size_t n = 1; n <= n_total; ++n) {
        const double w = draw(family, alpha, rng, x, trace, n);
        const double ind = sign * problem.h(x) <= t ? 1.0 : 0.0;
        t = t - config.stepsize.step(n) * (ind * w - level);
        if (!std::isfinite(t)) throw NumericalError("non-finite SA update", n);
        t = t < lo ? lo : (t > hi ? hi : t);
        const double theta = sign * t;
        trace.iterates.push_back(theta);
        if (n < n_total) alpha = policy.next(Vec{theta}, n + 1);
    }
    finish_sa(config, trace);
    return trace;
}

RunTrace run_sa_adaptive(const RootProblem& problem, const ISFamily& family,
                         const AdaptiveRunConfig& config) {
    problem.validate();
    check_sa_config(config);
    if (problem.dim != 1) throw UsageError("scalar SA engine needs dim = 1; use run_sa_adaptive_md");
    const std::size_t n_total = config.budget;
    const Box box = sa_box(config);
    const double lo = box.lo[0], hi = box.hi[0];

    RunTrace trace = make_trace(family, 1, n_total, config.retain_samples.value_or(false));
    rm_gain_warning(config, trace);
    ParamPolicy policy(family, config, true);
    Rng rng(config.seed);
    Vec x(family.sample_dim());
    Vec out(1);
    const double c = problem.target[0];

    double t = sa_start(config, box);
    Vec alpha = policy.next(Vec{t}, 1);
    for (std::size_t n = 1; n <= n_total; ++n) {
        const double w = draw(family, alpha, rng, x, trace, n);
        problem.evaluate(x, Vec{t}, out);
        t = t - config.stepsize.step(n) * (out[0] * w - c);
        if (!std::isfinite(t)) throw NumericalError("non-finite SA update", n);
        t = t < lo ? lo : (t > hi ? hi : t);
        trace.iterates.push_back(t);
        if (n < n_total) alpha = policy.next(Vec{t}, n + 1);
    }
    finish_sa(config, trace);
    return trace;
}

RunTrace run_adaptive(const QuantileProblem& problem, const ISFamily& family,
                      const AdaptiveRunConfig& config) {
    return config.solver == SolverKind::saa ? run_saa_adaptive(problem, family, config)
                                            : run_sa_adaptive(problem, family, config);
}

}  // namespace adaptis
