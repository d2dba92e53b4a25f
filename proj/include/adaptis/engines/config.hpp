#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "adaptis/box.hpp"
#include "adaptis/schedule.hpp"
#include "adaptis/vec.hpp"

namespace adaptis {

enum class SolverKind { saa, rm_sa, pr_sa };

/// adaptive: alpha_{n+1} = I(theta_n); none: alpha = base parameter;
/// fixed: alpha frozen at `fixed_param`.
enum class ISMode { adaptive, none, fixed };

const char* to_string(SolverKind kind);
const char* to_string(ISMode mode);
SolverKind parse_solver(const char* name);
ISMode parse_is_mode(const char* name);

struct AdaptiveRunConfig {
    SolverKind solver = SolverKind::saa;
    std::size_t budget = 1000;
    std::uint64_t seed = 0;

    ISMode is_mode = ISMode::adaptive;
    Vec fixed_param;

    /// A_n for the IS parameter. SAA projects through it; SA only when set.
    std::optional<TruncationSchedule> truncation;
    /// theta_0. Defaults to the midpoint of `projection` for SA and to 0 for SAA.
    std::optional<Vec> initial_theta;

    // SAA
    std::size_t refit_every = 1;  // generic root problems only; quantiles refit every step
    double bracket_step = 1.0;    // initial half-width for the bracket search

    // SA
    StepsizeSchedule stepsize{1.0, 1.0};
    std::optional<Box> projection;
    std::size_t burn_in = 100;  // PR-SA averages iterates N0+1 .. n
    /// f'(theta*) if known; RM-SA warns when 2 gamma f' <= 1.
    std::optional<double> fprime_hint;

    /// Defaults to true for SAA, false for SA.
    std::optional<bool> retain_samples;
};

}  // namespace adaptis
