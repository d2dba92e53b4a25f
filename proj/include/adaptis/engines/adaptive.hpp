#pragma once

#include <span>

#include "adaptis/engines/config.hpp"
#include "adaptis/family.hpp"
#include "adaptis/problem.hpp"
#include "adaptis/trace.hpp"

namespace adaptis {

/// SAA with adaptive IS (weighted empirical quantile form). Iteration n draws
/// X_n ~ P_{alpha_n}, sets q_n to the weighted quantile of everything seen so
/// far and alpha_{n+1} = Pi_{A_{n+1}}[I(q_n)].
RunTrace run_saa_adaptive(const QuantileProblem& problem, const ISFamily& family,
                          const AdaptiveRunConfig& config);

/// SAA with adaptive IS on a scalar root problem; the weighted empirical
/// equation is re-solved every `refit_every` iterations (and at the end).
RunTrace run_saa_adaptive(const RootProblem& problem, const ISFamily& family,
                          const AdaptiveRunConfig& config);

/// RM-SA / PR-SA with adaptive IS. For quantiles the update is
/// q_n = Pi_A[q_{n-1} - gamma_n (1{h(X_n) <= q_{n-1}} l_n - p)], upper tail via -h.
RunTrace run_sa_adaptive(const QuantileProblem& problem, const ISFamily& family,
                         const AdaptiveRunConfig& config);
RunTrace run_sa_adaptive(const RootProblem& problem, const ISFamily& family,
                         const AdaptiveRunConfig& config);

/// Dispatch on config.solver.
RunTrace run_adaptive(const QuantileProblem& problem, const ISFamily& family,
                      const AdaptiveRunConfig& config);

/// theta_bar_n = mean of iterates N0+1..n (theta_n itself when n <= N0).
double polyak_average(std::span<const double> iterates, std::size_t burn_in);

}  // namespace adaptis
