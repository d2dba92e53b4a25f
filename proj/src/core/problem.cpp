#include "adaptis/problem.hpp"

#include <cmath>

#include "adaptis/errors.hpp"

namespace adaptis {

void RootProblem::validate() const {
    if (dim == 0 || dim > kMaxDim) throw ConfigError("root problem dimension must be in [1, 64]");
    if (!evaluate) throw ConfigError("root problem has no output function");
    if (target.size() != dim) throw ConfigError("target dimension differs from problem dimension");
}

RootProblem scalar_problem(std::function<double(const Vec& x, double theta)> f, double c) {
    RootProblem p;
    p.dim = 1;
    p.target = Vec{c};
    p.evaluate = [f = std::move(f)](const Vec& x, const Vec& theta, Vec& out) {
        out.resize(1);
        out[0] = f(x, theta[0]);
    };
    return p;
}

void QuantileProblem::validate() const {
    if (!h) throw ConfigError("quantile problem has no performance function");
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("quantile level must lie in (0, 1)");
}

}  // namespace adaptis
