#include "adaptis/harness/experiment.hpp"

#include <atomic>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "adaptis/engines/adaptive.hpp"
#include "adaptis/errors.hpp"
#include "adaptis/rng.hpp"

namespace adaptis {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Task {
    std::size_t cell;
    std::size_t rep;
};

struct CellSpec {
    double p;
    std::size_t n;
    SolverKind solver;
    ISMode mode;
};

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
    return h;
}

}  // namespace

void ExperimentPlan::validate() const {
    if (replications < 2) throw ConfigError("replications must be >= 2");
    if (p_levels.empty() || sizes.empty() || solvers.empty() || is_modes.empty())
        throw ConfigError("plan lists must be nonempty");
    for (double p : p_levels)
        if (!(p > 0.0 && p < 1.0)) throw ConfigError("p levels must lie in (0, 1)");
    for (std::size_t n : sizes)
        if (n == 0) throw ConfigError("sample sizes must be >= 1");
    if (scenario == Scenario::custom && !custom_run) throw ConfigError("custom scenario needs a run function");
    if (jobs == 0) throw ConfigError("jobs must be >= 1");
}

std::uint64_t ExperimentPlan::replication_seed(double p, std::size_t n, SolverKind solver, ISMode mode,
                                               std::size_t rep) const {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ fnv1a(to_string(scenario)));
    h = mix64(h ^ std::bit_cast<std::uint64_t>(p));
    h = mix64(h ^ n);
    h = mix64(h ^ (static_cast<std::uint64_t>(solver) << 8 | static_cast<std::uint64_t>(mode)));
    return mix64(h ^ rep);
}

ExperimentPlan parse_plan(const std::string& text) {
    using nlohmann::json;
    ExperimentPlan plan;
    try {
        const json j = json::parse(text);
        if (j.contains("scenario")) plan.scenario = parse_scenario(j.at("scenario").get<std::string>());
        if (j.contains("p")) plan.p_levels = j.at("p").get<std::vector<double>>();
        if (j.contains("n")) plan.sizes = j.at("n").get<std::vector<std::size_t>>();
        if (j.contains("replications")) plan.replications = j.at("replications").get<std::size_t>();
        if (j.contains("solvers")) {
            plan.solvers.clear();
            for (const auto& s : j.at("solvers")) plan.solvers.push_back(parse_solver(s.get<std::string>().c_str()));
        }
        if (j.contains("is_modes")) {
            plan.is_modes.clear();
            for (const auto& s : j.at("is_modes")) plan.is_modes.push_back(parse_is_mode(s.get<std::string>().c_str()));
        }
        if (j.contains("seed")) plan.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("jobs")) plan.jobs = j.at("jobs").get<unsigned>();
        if (j.contains("lambda")) plan.lambda = j.at("lambda").get<double>();
        if (j.contains("portfolio")) plan.portfolio = parse_portfolio(j.at("portfolio").dump());
        if (j.contains("sa_gamma")) plan.sa_gamma = j.at("sa_gamma").get<double>();
        if (j.contains("sa_box")) {
            const auto b = j.at("sa_box").get<std::vector<double>>();
            if (b.size() != 2) throw ConfigError("sa_box must have two entries");
            plan.sa_box = std::make_pair(b[0], b[1]);
        }
        if (j.contains("reference_value")) plan.reference_value = j.at("reference_value").get<double>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("plan JSON: ") + e.what());
    }
    plan.validate();
    return plan;
}

CellResult summarize(std::vector<double> estimates, std::size_t failures, double truth) {
    CellResult r;
    const std::size_t k = estimates.size();
    r.failures = failures;
    r.valid = failures * 100 <= (k + failures);
    if (k == 0) {
        r.mean = r.variance = r.mse = kNaN;
        r.valid = false;
        return r;
    }
    long double s = 0.0L;
    for (double e : estimates) s += e;
    r.mean = static_cast<double>(s / k);
    long double ss = 0.0L, se = 0.0L;
    for (double e : estimates) {
        ss += (e - static_cast<long double>(r.mean)) * (e - static_cast<long double>(r.mean));
        se += (e - static_cast<long double>(truth)) * (e - static_cast<long double>(truth));
    }
    r.variance = k > 1 ? static_cast<double>(ss / (k - 1)) : 0.0;
    r.mse = std::isnan(truth) ? kNaN : static_cast<double>(se / k);
    r.estimates = std::move(estimates);
    return r;
}

void ResultTable::compute_ratios() {
    for (auto& [key, cell] : cells) {
        CellKey base = key;
        base.is_mode = to_string(ISMode::none);
        const auto it = cells.find(base);
        cell.ratio = it == cells.end() ? kNaN : it->second.variance / cell.variance;
    }
}

ResultTable run_experiment(const ExperimentPlan& plan) {
    plan.validate();
    std::vector<CellSpec> specs;
    for (double p : plan.p_levels)
        for (std::size_t n : plan.sizes)
            for (SolverKind s : plan.solvers)
                for (ISMode m : plan.is_modes) specs.push_back({p, n, s, m});

    const bool is_portfolio = plan.scenario == Scenario::portfolio;
    const bool is_toy = plan.scenario == Scenario::normal || plan.scenario == Scenario::exponential ||
                        plan.scenario == Scenario::pareto;
    std::optional<PortfolioSpec> pspec;
    std::optional<QuadraticFormModel> model;
    if (is_portfolio) {
        pspec = plan.portfolio.value_or(ten_asset_portfolio());
        model = build_quadratic_form(*pspec);
    }
    std::vector<std::optional<ToyScenario>> toys(plan.p_levels.size());
    if (is_toy) {
        for (std::size_t i = 0; i < plan.p_levels.size(); ++i)
            toys[i] = make_toy_scenario(plan.scenario, plan.p_levels[i], plan.lambda);
    }
    auto toy_for = [&](double p) -> const ToyScenario& {
        for (std::size_t i = 0; i < plan.p_levels.size(); ++i)
            if (plan.p_levels[i] == p) return *toys[i];
        throw UsageError("level not in plan");
    };

    const std::size_t reps = plan.replications;
    // Two outputs per replication: the estimate and (portfolio only) the CVaR.
    std::vector<double> primary(specs.size() * reps, kNaN), secondary(specs.size() * reps, kNaN);
    std::vector<char> failed(specs.size() * reps, 0);

    auto run_one = [&](const Task& t) {
        const CellSpec& c = specs[t.cell];
        const std::uint64_t seed = plan.replication_seed(c.p, c.n, c.solver, c.mode, t.rep);
        const std::size_t slot = t.cell * reps + t.rep;
        try {
            if (is_toy) {
                const ToyScenario& ts = toy_for(c.p);
                primary[slot] = run_adaptive(ts.problem, *ts.family, ts.run_config(c.solver, c.mode, c.n, seed))
                                    .final_estimate[0];
            } else if (is_portfolio) {
                VarCvarConfig vc;
                vc.solver = c.solver;
                vc.is_mode = c.mode;
                vc.p = c.p;
                vc.n = c.n;
                vc.seed = seed;
                vc.gamma = plan.sa_gamma;
                vc.projection = plan.sa_box;
                const VarCvarResult r = estimate_var_cvar(*pspec, *model, vc);
                primary[slot] = r.var;
                secondary[slot] = r.cvar;
            } else {
                primary[slot] = plan.custom_run(c.p, c.n, c.solver, c.mode, seed);
            }
        } catch (const Error&) {
            failed[slot] = 1;
        }
    };

    const std::size_t total = specs.size() * reps;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < total; i = next++) run_one({i / reps, i % reps});
    };
    const unsigned jobs = std::max(1u, std::min<unsigned>(plan.jobs, static_cast<unsigned>(total)));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    }

    ResultTable table;
    for (std::size_t ci = 0; ci < specs.size(); ++ci) {
        const CellSpec& c = specs[ci];
        double truth = kNaN;
        if (is_toy) truth = toy_for(c.p).q_star;
        else if (is_portfolio && plan.reference_value) truth = *plan.reference_value;
        else if (!is_portfolio && plan.custom_truth) truth = *plan.custom_truth;

        auto collect = [&](const std::vector<double>& src, const std::string& scen, double ref) {
            std::vector<double> est;
            std::size_t fails = 0;
            for (std::size_t r = 0; r < reps; ++r) {
                if (failed[ci * reps + r]) ++fails;
                else est.push_back(src[ci * reps + r]);
            }
            CellKey key{scen, c.p, c.n, to_string(c.solver), to_string(c.mode)};
            table.cells[key] = summarize(std::move(est), fails, ref);
        };
        collect(primary, to_string(plan.scenario), truth);
        if (is_portfolio) collect(secondary, "portfolio_cvar", kNaN);
    }
    table.compute_ratios();
    return table;
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string to_csv(const ResultTable& table) {
    std::string out = "scenario,p,n,solver,is_mode,mean,variance,mse,ratio\n";
    for (const auto& [k, c] : table.cells) {
        out += k.scenario + ',' + format_double(k.p) + ',' + std::to_string(k.n) + ',' + k.solver + ',' +
               k.is_mode + ',' + format_double(c.mean) + ',' + format_double(c.variance) + ',' +
               format_double(c.mse) + ',' + format_double(c.ratio) + '\n';
    }
    return out;
}

void emit_csv(const ResultTable& table, const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    const std::string s = to_csv(table);
    f.write(s.data(), static_cast<std::streamsize>(s.size()));
    if (!f) throw IoError("write failed for '" + path + "'");
}

namespace {
double parse_field(const std::string& s) {
    if (s == "nan") return kNaN;
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw IoError("bad CSV number '" + s + "'");
    return v;
}
}  // namespace

ResultTable parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "scenario,p,n,solver,is_mode,mean,variance,mse,ratio")
        throw IoError("CSV header mismatch");
    ResultTable t;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        if (f.size() != 9) throw IoError("CSV row must have 9 fields");
        CellKey k{f[0], parse_field(f[1]), static_cast<std::size_t>(std::stoull(f[2])), f[3], f[4]};
        CellResult r;
        r.mean = parse_field(f[5]);
        r.variance = parse_field(f[6]);
        r.mse = parse_field(f[7]);
        r.ratio = parse_field(f[8]);
        t.cells[k] = r;
    }
    return t;
}

}  // namespace adaptis
