#include "adaptis/engines/param_policy.hpp"

#include "adaptis/errors.hpp"

namespace adaptis::detail {

ParamPolicy::ParamPolicy(const ISFamily& family, const AdaptiveRunConfig& config, bool truncate)
    : family_(family), config_(config), truncate_(truncate && config.truncation.has_value()) {
    if (config.is_mode == ISMode::fixed && !family.admissible(config.fixed_param))
        throw ConfigError("fixed IS parameter is not admissible for the family");
}

Vec ParamPolicy::next(const Vec& theta, std::size_t n, const Mat* jacobian) const {
    switch (config_.is_mode) {
        case ISMode::none:
            return family_.base_param();
        case ISMode::fixed:
            return config_.fixed_param;
        case ISMode::adaptive:
            break;
    }
    Vec alpha;
    try {
        alpha = (jacobian && family_.uses_jacobian()) ? family_.select(theta, *jacobian)
                                                      : family_.select(theta);
    } catch (const DomainError& e) {
        throw SolverError(std::string("selector rejected the current estimate: ") + e.what(), n);
    }
    if (truncate_) alpha = project_box(alpha, config_.truncation->set_at(n));
    if (!family_.admissible(alpha))
        throw SolverError("selected IS parameter is not admissible", n);
    return alpha;
}

}  // namespace adaptis::detail
