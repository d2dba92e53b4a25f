#include "adaptis/engines/config.hpp"

#include <string_view>

#include "adaptis/errors.hpp"

namespace adaptis {

const char* to_string(SolverKind kind) {
    switch (kind) {
        case SolverKind::saa: return "saa";
        case SolverKind::rm_sa: return "rm_sa";
        case SolverKind::pr_sa: return "pr_sa";
    }
    return "?";
}

const char* to_string(ISMode mode) {
    switch (mode) {
        case ISMode::adaptive: return "is";
        case ISMode::none: return "no_is";
        case ISMode::fixed: return "fixed_is";
    }
    return "?";
}

SolverKind parse_solver(const char* name) {
    const std::string_view s(name);
    if (s == "saa") return SolverKind::saa;
    if (s == "rm_sa" || s == "rm") return SolverKind::rm_sa;
    if (s == "pr_sa" || s == "pr") return SolverKind::pr_sa;
    throw ConfigError("unknown solver '" + std::string(s) + "'");
}

ISMode parse_is_mode(const char* name) {
    const std::string_view s(name);
    if (s == "is" || s == "adaptive") return ISMode::adaptive;
    if (s == "no_is" || s == "none") return ISMode::none;
    if (s == "fixed_is" || s == "fixed") return ISMode::fixed;
    throw ConfigError("unknown IS mode '" + std::string(s) + "'");
}

}  // namespace adaptis
