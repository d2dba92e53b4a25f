#include "adaptis/portfolio/portfolio.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "adaptis/engines/adaptive.hpp"
#include "adaptis/errors.hpp"

namespace adaptis {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBoundaryInset = 1e-6;

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Mat to_mat(const Eigen::MatrixXd& e) {
    Mat m(e.rows(), e.cols());
    for (Eigen::Index i = 0; i < e.rows(); ++i)
        for (Eigen::Index j = 0; j < e.cols(); ++j) m(i, j) = e(i, j);
    return m;
}

Eigen::MatrixXd to_eigen(const Mat& m) {
    return Eigen::Map<const RowMat>(m.a.data(), Eigen::Index(m.rows), Eigen::Index(m.cols));
}

void require_domain(const QuadraticFormModel& m, double alpha) {
    if (!m.admissible(alpha))
        throw DomainError("twist " + std::to_string(alpha) + " outside the log-MGF domain");
}

// Safeguarded Newton for an increasing function k on (lo, hi) with k(lo) < 0 < k(hi).
template <class F, class DF>
double newton_bisect(F k, DF dk, double lo, double hi, double x, double tol) {
    for (int it = 0; it < 300; ++it) {
        const double kx = k(x);
        if (std::abs(kx) <= tol) return x;
        (kx < 0.0 ? lo : hi) = x;
        const double d = dk(x);
        double nx = d > 0.0 ? x - kx / d : lo + 0.5 * (hi - lo);
        if (!(nx > lo && nx < hi)) nx = lo + 0.5 * (hi - lo);
        if (nx == x || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) return nx;
        x = nx;
    }
    return x;
}

// Pull a finite domain edge toward the origin by a relative 1e-6.
double inset_boundary(double b) { return b * (1.0 - kBoundaryInset); }

}  // namespace

// ---- spec ---------------------------------------------------------------

Mat PortfolioSpec::covariance() const {
    const std::size_t m = assets();
    Mat cov(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double rho = correlation.rows == 0 ? (i == j ? 1.0 : 0.0) : correlation(i, j);
            cov(i, j) = spot[i] * vol[i] * spot[j] * vol[j] * rho * horizon;
        }
    }
    return cov;
}

double PortfolioSpec::value(const double* S, double elapsed) const {
    double v = 0.0;
    for (const auto& pos : positions) {
        const double tau = pos.maturity - elapsed;
        v += pos.quantity * black_scholes_price(S[pos.asset], pos.strike, rate, vol[pos.asset], tau, pos.kind);
    }
    return v;
}

void PortfolioSpec::validate() const {
    const std::size_t m = assets();
    if (m == 0 || m > kMaxDim) throw ConfigError("portfolio needs 1..64 assets");
    if (vol.size() != m) throw ConfigError("one volatility per asset is required");
    for (std::size_t i = 0; i < m; ++i) {
        if (!(spot[i] > 0.0) || !(vol[i] > 0.0)) throw ConfigError("spots and vols must be > 0");
    }
    if (!(horizon > 0.0)) throw ConfigError("horizon must be > 0");
    if (correlation.rows != 0) {
        if (correlation.rows != m || correlation.cols != m) throw ConfigError("correlation must be m x m");
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                if (correlation(i, j) != correlation(j, i)) throw ConfigError("correlation must be symmetric");
    }
    for (const auto& pos : positions) {
        if (pos.asset >= m) throw ConfigError("position refers to an unknown asset");
        if (!(pos.strike > 0.0)) throw ConfigError("strike must be > 0");
        if (!(pos.maturity > horizon)) throw ConfigError("option maturity must exceed the horizon");
    }
}

PortfolioSpec ten_asset_portfolio() {
    PortfolioSpec s;
    s.spot.assign(10, 100.0);
    s.vol.assign(10, 0.3);
    s.rate = 0.05;
    s.horizon = 0.04;
    for (std::size_t i = 0; i < 10; ++i) {
        s.positions.push_back({i, OptionKind::call, -10.0, 100.0, 0.5});
        s.positions.push_back({i, OptionKind::put, -5.0, 100.0, 0.5});
    }
    return s;
}

PortfolioSpec parse_portfolio(const std::string& text) {
    using nlohmann::json;
    PortfolioSpec s;
    try {
        const json j = json::parse(text);
        s.rate = j.at("rate").get<double>();
        s.horizon = j.at("horizon").get<double>();
        for (const auto& a : j.at("assets")) {
            s.spot.push_back(a.at("spot").get<double>());
            s.vol.push_back(a.at("vol").get<double>());
        }
        if (j.contains("correlation")) {
            const auto& c = j.at("correlation");
            const std::size_t m = c.size();
            s.correlation = Mat(m, m);
            for (std::size_t r = 0; r < m; ++r) {
                if (c[r].size() != m) throw ConfigError("correlation must be square");
                for (std::size_t k = 0; k < m; ++k) s.correlation(r, k) = c[r][k].get<double>();
            }
        }
        for (const auto& p : j.at("positions")) {
            OptionPosition pos;
            pos.asset = p.at("asset").get<std::size_t>();
            const std::string kind = p.at("kind").get<std::string>();
            if (kind == "call") pos.kind = OptionKind::call;
            else if (kind == "put") pos.kind = OptionKind::put;
            else throw ConfigError("option kind must be 'call' or 'put'");
            pos.quantity = p.at("quantity").get<double>();
            pos.strike = p.at("strike").get<double>();
            pos.maturity = p.at("maturity").get<double>();
            s.positions.push_back(pos);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("portfolio JSON: ") + e.what());
    }
    s.validate();
    return s;
}

PortfolioSpec load_portfolio(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open portfolio file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_portfolio(buf.str());
}

// ---- quadratic form -----------------------------------------------------

double QuadraticFormModel::alpha_lo() const {
    double lo = -kInf;
    for (double l : lambda)
        if (l < 0.0) lo = std::max(lo, 1.0 / (2.0 * l));
    return lo;
}

double QuadraticFormModel::alpha_hi() const {
    double hi = kInf;
    for (double l : lambda)
        if (l > 0.0) hi = std::min(hi, 1.0 / (2.0 * l));
    return hi;
}

bool QuadraticFormModel::admissible(double alpha) const {
    if (!std::isfinite(alpha)) return false;
    for (double l : lambda)
        if (!(1.0 - 2.0 * alpha * l > 0.0)) return false;
    return true;
}

double QuadraticFormModel::mean_q() const { return std::accumulate(lambda.begin(), lambda.end(), 0.0); }

double QuadraticFormModel::q_of(const double* z) const {
    double q = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) q += b[i] * z[i] + lambda[i] * z[i] * z[i];
    return q;
}

QuadraticFormModel build_quadratic_form(const PortfolioSpec& spec) {
    spec.validate();
    const std::size_t m = spec.assets();
    std::vector<double> delta(m, 0.0), gamma(m, 0.0);
    double theta = 0.0;
    for (const auto& pos : spec.positions) {
        const Greeks g = black_scholes(spec.spot[pos.asset], pos.strike, spec.rate, spec.vol[pos.asset],
                                       pos.maturity, pos.kind);
        delta[pos.asset] += pos.quantity * g.delta;
        gamma[pos.asset] += pos.quantity * g.gamma;
        theta += pos.quantity * g.theta;
    }

    QuadraticFormModel model;
    model.a0 = -theta * spec.horizon;
    model.a.resize(m);
    model.A = Mat(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        model.a[i] = -delta[i];
        model.A(i, i) = -0.5 * gamma[i];  // options are single-asset: Gamma is diagonal
    }

    const Eigen::MatrixXd sigma = to_eigen(spec.covariance());
    Eigen::MatrixXd c0;
    const Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() == Eigen::Success) {
        c0 = llt.matrixL();
    } else {
        // Semidefinite: fall back to the symmetric square root, rejecting negative spectra.
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
        if (es.info() != Eigen::Success) throw DecompositionError("covariance eigendecomposition failed");
        const double tol = 1e-12 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
        if (es.eigenvalues().minCoeff() < -tol) throw DecompositionError("covariance is not positive semidefinite");
        c0 = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    }

    const Eigen::MatrixXd inner = c0.transpose() * to_eigen(model.A) * c0;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (inner + inner.transpose()));
    if (es.info() != Eigen::Success) throw DecompositionError("eigendecomposition of C0' A C0 failed");

    // Descending eigenvalues; ties keep the solver's order, which is deterministic.
    std::vector<Eigen::Index> order(m);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
        return es.eigenvalues()(x) > es.eigenvalues()(y);
    });
    Eigen::MatrixXd U(m, m);
    model.lambda.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        U.col(Eigen::Index(k)) = es.eigenvectors().col(order[k]);
        model.lambda[k] = es.eigenvalues()(order[k]);
    }
    const Eigen::MatrixXd C = c0 * U;
    model.C = to_mat(C);
    const Eigen::VectorXd b = C.transpose() * Eigen::Map<const Eigen::VectorXd>(model.a.data(), Eigen::Index(m));
    model.b.assign(b.data(), b.data() + m);
    return model;
}

QuadraticFormModel make_diagonal_model(double a0, std::vector<double> b, std::vector<double> lambda) {
    if (b.size() != lambda.size() || b.empty() || b.size() > kMaxDim)
        throw ConfigError("diagonal model needs matching b and lambda of size 1..64");
    QuadraticFormModel m;
    const std::size_t d = b.size();
    m.a0 = a0;
    m.C = Mat::identity(d);
    m.a = b;
    m.A = Mat(d, d);
    for (std::size_t i = 0; i < d; ++i) m.A(i, i) = lambda[i];
    m.b = std::move(b);
    m.lambda = std::move(lambda);
    return m;
}

// ---- log-MGF ----------------------------------------------------------------

double psi(const QuadraticFormModel& m, double alpha) {
    require_domain(m, alpha);
    double s = 0.0;
    for (std::size_t i = 0; i < m.dim(); ++i) {
        const double u = 1.0 - 2.0 * alpha * m.lambda[i];
        s += alpha * alpha * m.b[i] * m.b[i] / (2.0 * u) - 0.5 * std::log(u);
    }
    return s;
}

double psi_prime(const QuadraticFormModel& m, double alpha) {
    require_domain(m, alpha);
    double s = 0.0;
    for (std::size_t i = 0; i < m.dim(); ++i) {
        const double l = m.lambda[i];
        const double u = 1.0 - 2.0 * alpha * l;
        s += alpha * m.b[i] * m.b[i] * (1.0 - alpha * l) / (u * u) + l / u;
    }
    return s;
}

double psi_second(const QuadraticFormModel& m, double alpha) {
    require_domain(m, alpha);
    double s = 0.0;
    for (std::size_t i = 0; i < m.dim(); ++i) {
        const double l = m.lambda[i];
        const double u = 1.0 - 2.0 * alpha * l;
        s += m.b[i] * m.b[i] / (u * u * u) + 2.0 * l * l / (u * u);
    }
    return s;
}

TwistChoice twist_selector(const QuadraticFormModel& m, double x) {
    const double y = x - m.a0;
    const double tol = 1e-10 * std::max(1.0, std::abs(y));
    // Unbounded sides are capped far out; psi' is at least linear there unless Q is degenerate.
    const double lo_edge = std::isfinite(m.alpha_lo()) ? inset_boundary(m.alpha_lo()) : -1e8;
    const double hi_edge = std::isfinite(m.alpha_hi()) ? inset_boundary(m.alpha_hi()) : 1e8;

    const double k0 = psi_prime(m, 0.0) - y;
    if (std::abs(k0) <= tol) return {0.0, false};
    if (k0 < 0.0) {
        if (psi_prime(m, hi_edge) - y < 0.0) return {hi_edge, true};
    } else {
        if (psi_prime(m, lo_edge) - y > 0.0) return {lo_edge, true};
    }
    const double lo = k0 < 0.0 ? 0.0 : lo_edge;
    const double hi = k0 < 0.0 ? hi_edge : 0.0;
    const double a = newton_bisect([&](double t) { return psi_prime(m, t) - y; },
                                   [&](double t) { return psi_second(m, t); }, lo, hi, 0.0, tol);
    return {a, false};
}

std::pair<double, double> var_truncation_bounds(const QuadraticFormModel& m, double p) {
    if (!(p > 0.0 && p < 1.0)) throw UsageError("VaR level must lie in (0, 1)");
    // Along the twist path, the optimized Chernoff exponent is k(a) = psi(a) - a psi'(a),
    // with k' = -a psi''; solve k(a) = log(tail) on each side of 0.
    auto solve_side = [&](double target, double edge) {
        auto k = [&](double a) { return psi(m, a) - a * psi_prime(m, a) - target; };
        double far = 0.0;
        if (std::isfinite(edge)) {
            // Step toward the pole until the exponent drops below target.
            for (int i = 0; i < 300; ++i) {
                far = edge * (1.0 - std::pow(10.0, -6.0 - 0.05 * i));
                if (k(far) <= 0.0) break;
            }
        } else {
            far = edge > 0.0 ? 1.0 : -1.0;
            for (int i = 0; i < 200 && k(far) > 0.0; ++i) far *= 2.0;
        }
        double lo = 0.0, hi = far;  // k(lo) > 0 >= k(hi)
        for (int it = 0; it < 200; ++it) {
            const double mid = lo + 0.5 * (hi - lo);
            if (mid == lo || mid == hi) break;
            (k(mid) > 0.0 ? lo : hi) = mid;
        }
        return m.a0 + psi_prime(m, hi);
    };
    const double q_max = solve_side(std::log1p(-p), m.alpha_hi());
    const double q_min = solve_side(std::log(p), m.alpha_lo());
    return {q_min, q_max};
}

// ---- twisted sampling ---------------------------------------------------

TwistedGaussianFamily::TwistedGaussianFamily(QuadraticFormModel model) : model_(std::move(model)) {
    if (model_.dim() == 0) throw ConfigError("twisted family needs a nonempty model");
}

bool TwistedGaussianFamily::admissible(const Vec& alpha) const {
    return alpha.size() == 1 && model_.admissible(alpha[0]);
}

void TwistedGaussianFamily::sample(const Vec& alpha, Rng& rng, Vec& z) const {
    if (!admissible(alpha)) throw DomainError("twist outside the log-MGF domain");
    const double a = alpha[0];
    const std::size_t d = model_.dim();
    z.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
        const double B = 1.0 / (1.0 - 2.0 * a * model_.lambda[i]);
        z[i] = a * B * model_.b[i] + std::sqrt(B) * rng.normal();
    }
}

double TwistedGaussianFamily::log_likelihood_ratio(const Vec& z, const Vec& alpha) const {
    const double a = alpha[0];
    if (a == 0.0) return 0.0;
    return -a * model_.q_of(z.data()) + psi(model_, a);
}

Vec TwistedGaussianFamily::select(const Vec& theta) const {
    return Vec{twist_selector(model_, theta[0]).alpha};
}

TwistedDraw sample_twisted(const QuadraticFormModel& model, double alpha, Rng& rng) {
    require_domain(model, alpha);
    const TwistedGaussianFamily fam(model);
    Vec z;
    fam.sample(Vec{alpha}, rng, z);
    TwistedDraw out;
    out.Q = model.q_of(z.data());
    out.log_lr = alpha == 0.0 ? 0.0 : -alpha * out.Q + psi(model, alpha);
    const std::size_t d = model.dim();
    out.dS = Vec(d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) out.dS[i] += model.C(i, j) * z[j];
    return out;
}

// ---- loss and VaR/CVaR --------------------------------------------------

LossFunction::LossFunction(const PortfolioSpec& spec, const QuadraticFormModel& model)
    : spec_(&spec), model_(&model), v0_(spec.value(spec.spot.data(), 0.0)) {}

double LossFunction::operator()(const Vec& z) const {
    const std::size_t m = spec_->assets();
    double S[kMaxDim];
    for (std::size_t i = 0; i < m; ++i) {
        double ds = 0.0;
        for (std::size_t j = 0; j < m; ++j) ds += model_->C(i, j) * z[j];
        // Arithmetic factor model can in principle push a price negative; floor it.
        S[i] = std::max(spec_->spot[i] + ds, 1e-12);
    }
    return v0_ - spec_->value(S, spec_->horizon);
}

double LossFunction::delta_gamma(const Vec& z) const { return model_->a0 + model_->q_of(z.data()); }

VarCvarResult estimate_var_cvar(const PortfolioSpec& spec, const VarCvarConfig& config) {
    const QuadraticFormModel model = build_quadratic_form(spec);
    return estimate_var_cvar(spec, model, config);
}

VarCvarResult estimate_var_cvar(const PortfolioSpec& spec, const QuadraticFormModel& model,
                                const VarCvarConfig& config) {
    if (!(config.p > 0.0 && config.p < 1.0)) throw UsageError("VaR level must lie in (0, 1)");
    if (config.n == 0) throw UsageError("sample budget must be >= 1");
    const TwistedGaussianFamily family(model);
    const LossFunction loss(spec, model);
    const auto [q_min, q_max] = var_truncation_bounds(model, config.p);

    QuantileProblem problem{[&loss](const Vec& z) { return loss(z); }, config.p, Tail::upper};

    AdaptiveRunConfig rc;
    rc.solver = config.solver;
    rc.budget = config.n;
    rc.seed = config.seed;
    rc.is_mode = config.is_mode;
    rc.burn_in = config.burn_in;
    rc.retain_samples = false;
    const double a_lo = twist_selector(model, q_min).alpha;
    const double a_hi = twist_selector(model, q_max).alpha;
    if (config.is_mode == ISMode::fixed) rc.fixed_param = Vec{a_hi};
    if (config.solver == SolverKind::saa) {
        rc.truncation = TruncationSchedule::constant(Box::interval(a_lo, a_hi));
        rc.initial_theta = Vec{0.5 * (q_min + q_max)};
    } else {
        const auto box = config.projection.value_or(std::make_pair(q_min, q_max));
        rc.projection = Box::interval(box.first, box.second);
        double gamma;
        if (config.gamma) {
            gamma = *config.gamma;
        } else {
            // Saddlepoint density of the delta-gamma loss at q_max; it sits beyond
            // v_p, so 1/f overshoots the ideal gain and keeps 2 gamma f' > 1.
            const double a = a_hi;
            const double f = std::exp(psi(model, a) - a * (q_max - model.a0)) /
                             std::sqrt(2.0 * std::numbers::pi * psi_second(model, a));
            gamma = 1.0 / f;
        }
        rc.stepsize = {gamma, config.solver == SolverKind::rm_sa ? 1.0 : config.pr_exponent};
    }

    VarCvarResult out;
    out.trace = run_adaptive(problem, family, rc);
    out.var = out.trace.final_estimate[0];

    // CVaR: fresh batch on an independent stream, twisted at I(v) (or untwisted).
    double alpha = 0.0;
    if (config.is_mode == ISMode::adaptive) alpha = twist_selector(model, out.var).alpha;
    else if (config.is_mode == ISMode::fixed) alpha = a_hi;
    out.final_alpha = alpha;
    const std::size_t nc = config.cvar_samples ? config.cvar_samples : config.n;
    Rng rng(config.seed, 1);
    Vec z;
    const Vec av{alpha};
    long double excess = 0.0L;
    for (std::size_t i = 0; i < nc; ++i) {
        family.sample(av, rng, z);
        const double l = loss(z);
        if (l > out.var) excess += (l - out.var) * std::exp(family.log_likelihood_ratio(z, av));
    }
    out.cvar = out.var + static_cast<double>(excess) / (static_cast<double>(nc) * (1.0 - config.p));
    return out;
}

}  // namespace adaptis
