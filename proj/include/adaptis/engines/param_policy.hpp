#pragma once

#include <cstddef>

#include "adaptis/engines/config.hpp"
#include "adaptis/family.hpp"
#include "adaptis/mat.hpp"

namespace adaptis::detail {

/// Maps the latest root estimate to the next IS parameter according to the
/// run's IS mode and truncation schedule. Shared by every engine.
class ParamPolicy {
public:
    ParamPolicy(const ISFamily& family, const AdaptiveRunConfig& config, bool truncate);

    /// alpha for iteration n given theta_{n-1}; `jacobian` is passed to
    /// Jacobian-aware selectors when non-null.
    Vec next(const Vec& theta, std::size_t n, const Mat* jacobian = nullptr) const;

private:
    const ISFamily& family_;
    const AdaptiveRunConfig& config_;
    bool truncate_;
};

}  // namespace adaptis::detail
