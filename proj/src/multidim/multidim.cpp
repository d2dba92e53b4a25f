#include "adaptis/multidim/multidim.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "adaptis/engines/adaptive.hpp"
#include "adaptis/engines/param_policy.hpp"
#include "adaptis/errors.hpp"

namespace adaptis {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using EVec = Eigen::VectorXd;

Eigen::Map<const RowMat> view(const Mat& m) { return {m.a.data(), Eigen::Index(m.rows), Eigen::Index(m.cols)}; }

Mat to_mat(const Eigen::MatrixXd& e) {
    Mat m(e.rows(), e.cols());
    for (Eigen::Index i = 0; i < e.rows(); ++i)
        for (Eigen::Index j = 0; j < e.cols(); ++j) m(i, j) = e(i, j);
    return m;
}

double condition_number(const Mat& m) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(view(m));
    const auto& s = svd.singularValues();
    if (s.size() == 0) return 1.0;
    const double smin = s(s.size() - 1);
    return smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();
}

// (1/n) sum F(x_i, theta) l_i - c.
Vec residual(const WeightedSamples& s, const RootProblem& problem, const Vec& theta) {
    const std::size_t d = problem.dim;
    Vec acc(d, 0.0), out(d), x(s.dim);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double w = s.weights[i];
        if (w == 0.0) continue;
        std::copy_n(s.points.data() + i * s.dim, s.dim, x.data());
        problem.evaluate(x, theta, out);
        for (std::size_t k = 0; k < d; ++k) acc[k] += out[k] * w;
    }
    const double inv_n = 1.0 / static_cast<double>(s.size());
    for (std::size_t k = 0; k < d; ++k) acc[k] = acc[k] * inv_n - problem.target[k];
    return acc;
}

double sup_norm(const Vec& v) {
    double m = 0.0;
    for (double e : v) m = std::max(m, std::abs(e));
    return m;
}

// Per-sample derivative of F(x, .) l at theta, added into `acc` (d x d).
void add_sample_jacobian(const RootProblem& problem, const Vec& x, double w, const Vec& theta,
                         double fd_step, Mat& acc) {
    const std::size_t d = problem.dim;
    if (problem.jacobian) {
        Mat j(d, d);
        (*problem.jacobian)(x, theta, j);
        for (std::size_t k = 0; k < d * d; ++k) acc.a[k] += j.a[k] * w;
        return;
    }
    Vec tp = theta, tm = theta, fp(d), fm(d);
    for (std::size_t c = 0; c < d; ++c) {
        tp[c] = theta[c] + fd_step;
        tm[c] = theta[c] - fd_step;
        problem.evaluate(x, tp, fp);
        problem.evaluate(x, tm, fm);
        for (std::size_t r = 0; r < d; ++r) acc(r, c) += (fp[r] - fm[r]) / (2.0 * fd_step) * w;
        tp[c] = tm[c] = theta[c];
    }
}

struct NewtonOutcome {
    Vec theta;
    bool fallback = false;
};

NewtonOutcome solve_md(const WeightedSamples& s, const RootProblem& problem, Vec theta,
                       double fd_step) {
    const std::size_t d = problem.dim;
    const double tol = 1e-10 * std::max(1.0, sup_norm(problem.target));
    Vec g = residual(s, problem, theta);
    for (int it = 0; it < 50; ++it) {
        const double gn = sup_norm(g);
        if (gn <= tol) return {theta, false};
        const JacobianEstimate je = estimate_jacobian(s, problem, theta, fd_step);
        if (je.ill_conditioned) break;
        const EVec step = view(je.matrix).partialPivLu().solve(Eigen::Map<const EVec>(g.data(), Eigen::Index(d)));
        double lambda = 1.0;
        bool accepted = false;
        while (lambda > 1e-8) {
            Vec trial = theta;
            for (std::size_t k = 0; k < d; ++k) trial[k] -= lambda * step(Eigen::Index(k));
            const Vec gt = residual(s, problem, trial);
            if (sup_norm(gt) <= (1.0 - 1e-4 * lambda) * gn) {
                theta = trial;
                g = gt;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) break;
    }
    if (sup_norm(g) <= tol) return {theta, false};

    // Relaxed fixed point theta <- theta - g / k; slow but monotone for
    // problems whose Jacobian is near the identity scale.
    for (int k = 1; k <= 2000; ++k) {
        for (std::size_t i = 0; i < d; ++i) theta[i] -= g[i] / static_cast<double>(k);
        g = residual(s, problem, theta);
        if (sup_norm(g) <= tol) break;
    }
    return {theta, true};
}

Mat covariance(const std::vector<double>& rows, std::size_t d) {
    const std::size_t n = rows.size() / d;
    Mat cov(d, d);
    if (n < 2) return cov;
    Eigen::Map<const RowMat> m(rows.data(), Eigen::Index(n), Eigen::Index(d));
    const Eigen::RowVectorXd mean = m.colwise().mean();
    const RowMat centered = m.rowwise() - mean;
    return to_mat((centered.transpose() * centered) / static_cast<double>(n - 1));
}

void check_common(const RootProblem& problem, const ISFamily& family, const MdRunConfig& c) {
    problem.validate();
    if (c.budget == 0) throw UsageError("sample budget must be >= 1");
    if (!(c.fd_step > 0.0)) throw ConfigError("fd_step must be > 0");
    if (c.jacobian_every == 0) throw ConfigError("jacobian_every must be >= 1");
    (void)family;
}

}  // namespace

JacobianEstimate estimate_jacobian(const WeightedSamples& samples, const RootProblem& problem,
                                   const Vec& theta, double fd_step) {
    if (samples.size() == 0) throw UsageError("Jacobian estimate needs samples");
    if (!(fd_step > 0.0)) throw UsageError("fd_step must be > 0");
    const std::size_t d = problem.dim;
    JacobianEstimate je;
    je.matrix = Mat(d, d);
    je.at_theta = theta;
    je.n_samples = samples.size();
    Vec x(samples.dim);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double w = samples.weights[i];
        if (w == 0.0) continue;
        std::copy_n(samples.points.data() + i * samples.dim, samples.dim, x.data());
        add_sample_jacobian(problem, x, w, theta, fd_step, je.matrix);
    }
    const double inv_n = 1.0 / static_cast<double>(samples.size());
    for (double& v : je.matrix.a) v *= inv_n;
    je.condition = condition_number(je.matrix);
    je.ill_conditioned = !(je.condition <= kMaxJacobianCondition);
    return je;
}

double indicator_bandwidth(std::span<const double> h, double c) {
    if (h.size() < 2) throw UsageError("bandwidth needs at least two samples");
    double mean = 0.0, m2 = 0.0;
    std::size_t k = 0;
    for (double v : h) {
        ++k;
        const double delta = v - mean;
        mean += delta / static_cast<double>(k);
        m2 += delta * (v - mean);
    }
    const double sd = std::sqrt(m2 / static_cast<double>(h.size() - 1));
    return c * sd * std::pow(static_cast<double>(h.size()), -0.2);
}

double delta_method_variance(const Mat& J, const Mat& sigma, const Vec& grad_g) {
    const std::size_t d = grad_g.size();
    if (J.rows != d || J.cols != d || sigma.rows != d || sigma.cols != d)
        throw UsageError("delta method: dimension mismatch");
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(view(J));
    if (!lu.isInvertible()) throw SingularMatrixError("delta method: J is singular");
    // u = J^{-1} grad_g; the quadratic form is u' Sigma u.
    const EVec u = lu.solve(Eigen::Map<const EVec>(grad_g.data(), Eigen::Index(d)));
    return std::max(0.0, u.dot(view(sigma) * u));
}

double gradient_mismatch(const PerformanceFunction& pf, const Vec& theta, double step) {
    const Vec grad = pf.grad_g(theta);
    double worst = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        Vec tp = theta, tm = theta;
        tp[i] += step;
        tm[i] -= step;
        const double fd = (pf.g(tp) - pf.g(tm)) / (2.0 * step);
        const double scale = std::max(std::abs(grad[i]), 1e-12);
        worst = std::max(worst, std::abs(fd - grad[i]) / scale);
    }
    return worst;
}

// ---- Gaussian shift family -----------------------------------------------

GaussianShiftFamily::GaussianShiftFamily(const Mat& cov, Selector selector, bool uses_jacobian)
    : dim_(cov.rows), selector_(std::move(selector)), uses_jacobian_(uses_jacobian) {
    if (cov.rows == 0 || cov.rows != cov.cols || cov.rows > kMaxDim)
        throw ConfigError("Gaussian family needs a square covariance of size 1..64");
    const Eigen::LLT<Eigen::MatrixXd> llt{Eigen::MatrixXd(view(cov))};
    if (llt.info() != Eigen::Success) throw DecompositionError("covariance is not positive definite");
    chol_ = to_mat(llt.matrixL().toDenseMatrix());
    precision_ = to_mat(llt.solve(Eigen::MatrixXd::Identity(Eigen::Index(dim_), Eigen::Index(dim_))));
}

bool GaussianShiftFamily::admissible(const Vec& alpha) const {
    if (alpha.size() != dim_) return false;
    return std::all_of(alpha.begin(), alpha.end(), [](double a) { return std::isfinite(a); });
}

void GaussianShiftFamily::sample(const Vec& alpha, Rng& rng, Vec& x) const {
    if (!admissible(alpha)) throw DomainError("Gaussian shift must be finite with matching dimension");
    Vec z(dim_);
    for (std::size_t i = 0; i < dim_; ++i) z[i] = rng.normal();
    x.resize(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        double s = alpha[i];
        for (std::size_t j = 0; j <= i; ++j) s += chol_(i, j) * z[j];
        x[i] = s;
    }
}

double GaussianShiftFamily::log_likelihood_ratio(const Vec& x, const Vec& alpha) const {
    // -alpha' P x + alpha' P alpha / 2 with P = Sigma^{-1}.
    double s = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        if (alpha[i] == 0.0) continue;
        double px = 0.0;
        for (std::size_t j = 0; j < dim_; ++j) px += precision_(i, j) * (0.5 * alpha[j] - x[j]);
        s += alpha[i] * px;
    }
    return s;
}

Vec GaussianShiftFamily::select(const Vec& theta) const {
    return selector_ ? selector_(theta, nullptr) : base_param();
}

Vec GaussianShiftFamily::select(const Vec& theta, const Mat& jacobian) const {
    return selector_ ? selector_(theta, &jacobian) : base_param();
}

// ---- engines ---------------------------------------------------------------

MdRunResult run_saa_adaptive_md(const RootProblem& problem, const ISFamily& family,
                                const MdRunConfig& config) {
    check_common(problem, family, config);
    if (config.refit_every == 0) throw ConfigError("refit_every must be >= 1");
    const std::size_t d = problem.dim;
    const std::size_t n_total = config.budget;
    const std::size_t sd = family.sample_dim();

    MdRunResult result;
    RunTrace& trace = result.trace;
    trace.theta_dim = d;
    trace.param_dim = family.param_dim();
    trace.sample_dim = sd;
    trace.samples_retained = true;
    trace.iterates.reserve(n_total * d);
    trace.is_params.reserve(n_total * family.param_dim());
    trace.log_lrs.reserve(n_total);
    trace.sample_points.reserve(n_total * sd);

    detail::ParamPolicy policy(family, config, true);
    Rng rng(config.seed);
    Vec x(sd);
    std::vector<double> weights;
    weights.reserve(n_total);

    Vec theta = config.initial_theta ? *config.initial_theta : Vec(d, 0.0);
    if (theta.size() != d) throw ConfigError("theta_0 dimension differs from the problem");
    Vec alpha = config.initial_theta ? policy.next(theta, 1)
                                     : (config.is_mode == ISMode::fixed ? config.fixed_param
                                                                        : family.base_param());
    const bool want_j = config.is_mode == ISMode::adaptive && family.uses_jacobian();
    Mat j_hat = Mat::identity(d);  // last well-conditioned estimate

    Vec out(d);
    const ScalarOutput F1 = [&](const Vec& xi, double t) {
        problem.evaluate(xi, Vec{t}, out);
        return out[0];
    };

    for (std::size_t n = 1; n <= n_total; ++n) {
        family.sample(alpha, rng, x);
        const double lw = family.log_likelihood_ratio(x, alpha);
        const double w = std::exp(lw);
        if (!std::isfinite(w)) throw NumericalError("likelihood ratio overflowed", n);
        if (w == 0.0) ++trace.zero_weight_count;
        trace.is_params.insert(trace.is_params.end(), alpha.begin(), alpha.end());
        trace.log_lrs.push_back(lw);
        trace.sample_points.insert(trace.sample_points.end(), x.begin(), x.end());
        weights.push_back(w);

        const WeightedSamples ws{trace.sample_points, weights, sd};
        if (n % config.refit_every == 0 || n == n_total) {
            if (d == 1) {
                ScalarRootOptions opt;
                opt.start = theta[0];
                opt.initial_step = config.bracket_step;
                try {
                    theta = Vec{solve_weighted_scalar_root(ws, F1, problem.target[0], opt)};
                } catch (const BracketError& e) {
                    throw SolverError(e.what(), n);
                }
            } else {
                const NewtonOutcome r = solve_md(ws, problem, theta, config.fd_step);
                theta = r.theta;
                if (r.fallback) trace.flagged.push_back(n);
            }
        }
        trace.iterates.insert(trace.iterates.end(), theta.begin(), theta.end());
        if (n < n_total) {
            if (want_j && n % config.jacobian_every == 0) {
                const JacobianEstimate je = estimate_jacobian(ws, problem, theta, config.fd_step);
                if (!je.ill_conditioned) j_hat = je.matrix;
                else trace.flagged.push_back(n);
            }
            alpha = policy.next(theta, n + 1, want_j ? &j_hat : nullptr);
        }
    }
    trace.final_estimate = theta;

    const WeightedSamples ws{trace.sample_points, weights, sd};
    result.jacobian = estimate_jacobian(ws, problem, theta, config.fd_step);
    std::vector<double> rows;
    rows.reserve((n_total - n_total / 2) * d);
    for (std::size_t i = n_total / 2; i < n_total; ++i) {
        std::copy_n(trace.sample_points.data() + i * sd, sd, x.data());
        problem.evaluate(x, theta, out);
        for (std::size_t k = 0; k < d; ++k) rows.push_back(out[k] * weights[i]);
    }
    result.sigma = covariance(rows, d);

    if (config.retain_samples == false) {
        trace.sample_points.clear();
        trace.samples_retained = false;
    }
    return result;
}

MdRunResult run_sa_adaptive_md(const RootProblem& problem, const ISFamily& family,
                               const MdRunConfig& config) {
    check_common(problem, family, config);
    config.stepsize.validate();
    if (config.solver == SolverKind::rm_sa && config.stepsize.exponent != 1.0)
        throw ConfigError("RM-SA uses gamma / n (exponent 1)");
    if (config.solver == SolverKind::pr_sa &&
        !(config.stepsize.exponent > 0.5 && config.stepsize.exponent < 1.0))
        throw ConfigError("PR-SA needs a stepsize exponent in (1/2, 1)");
    if (config.solver == SolverKind::saa) throw ConfigError("run_sa_adaptive_md called with the SAA solver");

    const std::size_t d = problem.dim;
    const std::size_t n_total = config.budget;
    const std::size_t sd = family.sample_dim();
    const double inf = std::numeric_limits<double>::infinity();
    const Box box = config.projection ? *config.projection : Box{Vec(d, -inf), Vec(d, inf)};
    box.validate();
    if (box.dim() != d) throw ConfigError("projection box dimension differs from the problem");

    MdRunResult result;
    RunTrace& trace = result.trace;
    trace.theta_dim = d;
    trace.param_dim = family.param_dim();
    trace.sample_dim = sd;
    trace.samples_retained = config.retain_samples.value_or(false);
    trace.iterates.reserve(n_total * d);
    trace.is_params.reserve(n_total * family.param_dim());
    trace.log_lrs.reserve(n_total);
    if (config.solver == SolverKind::rm_sa && config.fprime_hint &&
        !(2.0 * config.stepsize.gamma * *config.fprime_hint > 1.0))
        trace.warnings.emplace_back(
            "RM-SA: 2 gamma f'(theta*) <= 1, the asymptotic normality claim does not apply");

    detail::ParamPolicy policy(family, config, true);
    Rng rng(config.seed);
    Vec x(sd), out(d);

    Vec theta(d);
    if (config.initial_theta) {
        theta = *config.initial_theta;
        if (theta.size() != d) throw ConfigError("theta_0 dimension differs from the problem");
    } else {
        for (std::size_t k = 0; k < d; ++k) {
            theta[k] = std::isfinite(box.lo[k]) && std::isfinite(box.hi[k])
                           ? 0.5 * (box.lo[k] + box.hi[k])
                           : project_interval(0.0, box.lo[k], box.hi[k]);
        }
    }

    const bool want_j = config.is_mode == ISMode::adaptive && family.uses_jacobian();
    Mat j_run(d, d), j_tail(d, d), j_hat = Mat::identity(d);
    std::vector<double> tail_rows;
    const std::size_t tail_start = n_total / 2;  // 0-based index of the trailing half
    tail_rows.reserve((n_total - tail_start) * d);

    Vec alpha = policy.next(theta, 1, want_j ? &j_hat : nullptr);
    for (std::size_t n = 1; n <= n_total; ++n) {
        family.sample(alpha, rng, x);
        const double lw = family.log_likelihood_ratio(x, alpha);
        const double w = std::exp(lw);
        if (!std::isfinite(w)) throw NumericalError("likelihood ratio overflowed", n);
        if (w == 0.0) ++trace.zero_weight_count;
        trace.is_params.insert(trace.is_params.end(), alpha.begin(), alpha.end());
        trace.log_lrs.push_back(lw);
        if (trace.samples_retained) trace.sample_points.insert(trace.sample_points.end(), x.begin(), x.end());

        problem.evaluate(x, theta, out);
        const bool in_tail = n - 1 >= tail_start;
        if (want_j) add_sample_jacobian(problem, x, w, theta, config.fd_step, j_run);
        if (in_tail) {
            add_sample_jacobian(problem, x, w, theta, config.fd_step, j_tail);
            for (std::size_t k = 0; k < d; ++k) tail_rows.push_back(out[k] * w);
        }

        const double g = config.stepsize.step(n);
        for (std::size_t k = 0; k < d; ++k) {
            double t = theta[k] - g * (out[k] * w - problem.target[k]);
            if (!std::isfinite(t)) throw NumericalError("non-finite SA update", n);
            theta[k] = t < box.lo[k] ? box.lo[k] : (t > box.hi[k] ? box.hi[k] : t);
        }
        trace.iterates.insert(trace.iterates.end(), theta.begin(), theta.end());

        if (n < n_total) {
            if (want_j && n % config.jacobian_every == 0) {
                Mat j = j_run;
                for (double& v : j.a) v /= static_cast<double>(n);
                if (condition_number(j) <= kMaxJacobianCondition) j_hat = j;
                else trace.flagged.push_back(n);
            }
            alpha = policy.next(theta, n + 1, want_j ? &j_hat : nullptr);
        }
    }

    if (config.solver == SolverKind::pr_sa) {
        Vec avg(d);
        std::vector<double> comp(n_total);
        for (std::size_t k = 0; k < d; ++k) {
            for (std::size_t i = 0; i < n_total; ++i) comp[i] = trace.iterates[i * d + k];
            avg[k] = polyak_average(comp, config.burn_in);
        }
        trace.final_estimate = avg;
    } else {
        trace.final_estimate = theta;
    }

    const std::size_t tail_n = n_total - tail_start;
    for (double& v : j_tail.a) v /= static_cast<double>(tail_n);
    result.jacobian.matrix = j_tail;
    result.jacobian.at_theta = trace.final_estimate;
    result.jacobian.n_samples = tail_n;
    result.jacobian.condition = condition_number(j_tail);
    result.jacobian.ill_conditioned = !(result.jacobian.condition <= kMaxJacobianCondition);
    result.sigma = covariance(tail_rows, d);
    return result;
}

}  // namespace adaptis
