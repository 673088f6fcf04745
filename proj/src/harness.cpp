#include "osar/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "osar/allocation.hpp"
#include "osar/rates.hpp"

#ifndef OSAR_BUILD_STAMP
#define OSAR_BUILD_STAMP "unknown"
#endif

namespace osar {

using nlohmann::json;

std::string build_stamp() { return OSAR_BUILD_STAMP; }

std::unique_ptr<Problem> make_problem(const ProblemSpec& s) {
    if (s.id == "synthetic") {
        auto p = std::make_unique<SyntheticProblem>(s.scenario, s.continuous, s.dense_intervals);
        if (s.theta0) {
            if (s.theta0->size() != 2) throw ConfigError("synthetic theta0 override needs two components");
            p->set_theta0(*s.theta0);
        }
        return p;
    }
    if (s.id == "toy") return std::make_unique<TableProblem>(TableProblem::toy());
    if (s.id == "supply_chain")
        return std::make_unique<SupplyChainProblem>(s.routing.value_or(Routing{}), s.anchors, s.design_size,
                                                    s.anchor_seed, s.reps);
    throw ConfigError("unknown problem id: " + s.id);
}

// ------------------------------------------------------------------- config

void ExperimentConfig::validate() const {
    if (runs == 0) throw ConfigError("macrorun count must be >= 1");
    run.validate();
    for (std::size_t g = 0; g < budget_grid.size(); ++g) {
        if (g > 0 && !(budget_grid[g] > budget_grid[g - 1]))
            throw ConfigError("budget grid must be strictly increasing");
        if (budget_grid[g] > run.budget) throw ConfigError("budget grid exceeds the total budget");
    }
}

namespace {

ProblemSpec problem_from_json(const json& j) {
    ProblemSpec s;
    if (!j.is_object()) return s;
    s.id = j.value("id", s.id);
    s.continuous = j.value("continuous", s.continuous);
    if (j.contains("scenario")) s.scenario = parse_scenario(j.at("scenario").get<std::string>());
    if (j.contains("theta0") && !j.at("theta0").is_null()) s.theta0 = j.at("theta0").get<std::vector<double>>();
    s.dense_intervals = j.value("dense_intervals", s.dense_intervals);
    if (j.contains("routing") && !j.at("routing").is_null()) {
        const auto p = j.at("routing").get<std::vector<double>>();
        if (p.size() != kNumArcs) throw ConfigError("routing needs ten arc probabilities");
        Routing r;
        std::copy(p.begin(), p.end(), r.p.begin());
        s.routing = r;
    }
    s.anchors = j.value("anchors", s.anchors);
    s.design_size = j.value("design_size", s.design_size);
    s.reps = j.value("reps", s.reps);
    s.anchor_seed = j.value("anchor_seed", s.anchor_seed);
    return s;
}

json problem_to_json(const ProblemSpec& s) {
    json j;
    j["id"] = s.id;
    j["continuous"] = s.continuous;
    j["scenario"] = scenario_name(s.scenario);
    j["theta0"] = s.theta0 ? json(*s.theta0) : json(nullptr);
    j["dense_intervals"] = s.dense_intervals;
    j["routing"] = s.routing ? json(std::vector<double>(s.routing->p.begin(), s.routing->p.end())) : json(nullptr);
    j["anchors"] = s.anchors;
    j["design_size"] = s.design_size;
    j["reps"] = s.reps;
    j["anchor_seed"] = s.anchor_seed;
    return j;
}

void apply_algorithm(RunConfig& r, const std::string& a) {
    if (a == "osar") {
        r.estimator = Estimator::SampleMean;
    } else if (a == "osar_plus") {
        r.estimator = Estimator::Krr;
    } else if (a == "osar_pp") {
        r.variant = Variant::PlusPlus;
    } else if (a == "osar_fd") {
        r.variant = Variant::FixedDense;
    } else if (a == "osar_ps") {
        r.variant = Variant::PosteriorSample;
    } else {
        throw ConfigError("unknown algorithm: " + a);
    }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    ExperimentConfig c;
    if (j.contains("problem")) c.problem = problem_from_json(j.at("problem"));
    c.run = RunConfig::from(make_problem(c.problem)->defaults());
    if (j.contains("algorithm")) apply_algorithm(c.run, j.at("algorithm").get<std::string>());
    if (j.contains("run")) {
        const json& r = j.at("run");
        c.run.batch = r.value("batch", c.run.batch);
        c.run.epsilon = r.value("epsilon", c.run.epsilon);
        c.run.m0 = r.value("m0", c.run.m0);
        c.run.n0 = r.value("n0", c.run.n0);
        c.run.budget = r.value("budget", c.run.budget);
        if (r.contains("estimator")) c.run.estimator = parse_estimator(r.at("estimator").get<std::string>());
        c.run.subroutine = r.value("subroutine", c.run.subroutine);
        if (r.contains("variant")) c.run.variant = parse_variant(r.at("variant").get<std::string>());
        c.run.design_size = r.value("design_size", c.run.design_size);
    }
    c.runs = j.value("runs", c.runs);
    c.base_seed = j.value("seed", c.base_seed);
    if (j.contains("budget_grid")) c.budget_grid = j.at("budget_grid").get<std::vector<double>>();
    c.threads = j.value("threads", c.threads);
    return c;
}

json ExperimentConfig::to_json() const {
    json j;
    j["problem"] = problem_to_json(problem);
    json r;
    r["batch"] = run.batch;
    r["epsilon"] = run.epsilon;
    r["m0"] = run.m0;
    r["n0"] = run.n0;
    r["budget"] = run.budget;
    r["estimator"] = estimator_name(run.estimator);
    r["subroutine"] = run.subroutine;
    r["variant"] = variant_name(run.variant);
    r["design_size"] = run.design_size;
    j["run"] = r;
    j["runs"] = runs;
    j["seed"] = base_seed;
    j["budget_grid"] = budget_grid;
    j["threads"] = threads;
    return j;
}

// ------------------------------------------------------------------ running

double pcs_standard_error(double pcs, std::size_t runs) {
    if (runs == 0) return 0.0;
    return std::sqrt(std::max(0.0, pcs * (1.0 - pcs)) / static_cast<double>(runs));
}

namespace {

struct RunSummary {
    std::size_t returned = 0;
    std::vector<std::size_t> grid_best;
    std::vector<double> alpha, beta;
    std::vector<std::size_t> data_counts;
    std::size_t sims = 0;
    double spent = 0.0;
};

RunSummary summarize(const RunResult& r, const std::vector<double>& grid) {
    RunSummary s;
    s.returned = r.returned;
    for (double g : grid) {
        std::size_t best = r.returned;
        for (const auto& snap : r.trajectory)
            if (snap.t >= g) {
                best = snap.best;
                break;
            }
        s.grid_best.push_back(best);
    }
    s.alpha = r.alpha;
    s.beta = r.beta;
    s.data_counts = r.ledger.data_counts;
    for (std::size_t n : r.ledger.point_totals()) s.sims += n;
    s.spent = r.ledger.spent;
    return s;
}

}  // namespace

AggregateReport run_experiment(const ExperimentConfig& cfg, const Progress& progress) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    const auto problem = make_problem(cfg.problem);
    RunConfig rc = cfg.run;
    rc.trajectory_alpha = false;

    const std::size_t R = cfg.runs;
    std::vector<RunSummary> out(R);
    std::size_t workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, R);
    std::atomic<std::size_t> next{0}, done{0};
    std::atomic<bool> failed{false};
    std::mutex mu;
    std::string error;
    std::uint64_t failing_seed = 0;

    auto worker = [&] {
        for (;;) {
            if (failed.load()) return;
            const std::size_t r = next.fetch_add(1);
            if (r >= R) return;
            const std::uint64_t seed = cfg.base_seed + r;
            try {
                out[r] = summarize(run(*problem, rc, seed), cfg.budget_grid);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lk(mu);
                if (!failed.exchange(true)) {
                    error = e.what();
                    failing_seed = seed;
                }
                return;
            }
            const std::size_t d = done.fetch_add(1) + 1;
            if (progress) {
                std::lock_guard<std::mutex> lk(mu);
                progress(d, R);
            }
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failed) throw std::runtime_error("run with seed " + std::to_string(failing_seed) + " failed: " + error);

    // Reduce in run-index order.
    AggregateReport rep;
    rep.config = cfg;
    rep.build = build_stamp();
    rep.true_best = problem->true_best();
    rep.runs = R;
    const std::size_t G = cfg.budget_grid.size();
    std::vector<std::size_t> grid_hits(G, 0);
    std::size_t hits = 0;
    const std::size_t L = problem->sources().size();
    rep.mean_m.assign(L, 0.0);
    rep.mean_beta.assign(L, 0.0);
    for (const auto& s : out) {
        rep.returned.push_back(s.returned);
        hits += s.returned == rep.true_best;
        for (std::size_t g = 0; g < G; ++g) grid_hits[g] += s.grid_best[g] == rep.true_best;
        for (std::size_t l = 0; l < L; ++l) {
            rep.mean_m[l] += static_cast<double>(s.data_counts[l]);
            rep.mean_beta[l] += s.beta[l];
        }
        if (rep.mean_alpha.size() < s.alpha.size()) rep.mean_alpha.resize(s.alpha.size(), 0.0);
        for (std::size_t b = 0; b < s.alpha.size(); ++b) rep.mean_alpha[b] += s.alpha[b];
        rep.mean_n += static_cast<double>(s.sims);
        rep.mean_spent += s.spent;
    }
    const double Rd = static_cast<double>(R);
    rep.pcs = static_cast<double>(hits) / Rd;
    rep.se = pcs_standard_error(rep.pcs, R);
    for (std::size_t g = 0; g < G; ++g) {
        rep.grid_pcs.push_back(static_cast<double>(grid_hits[g]) / Rd);
        rep.grid_se.push_back(pcs_standard_error(rep.grid_pcs.back(), R));
    }
    for (auto& v : rep.mean_m) v /= Rd;
    for (auto& v : rep.mean_beta) v /= Rd;
    for (auto& v : rep.mean_alpha) v /= Rd;
    rep.mean_n /= Rd;
    rep.mean_spent /= Rd;
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

bool AggregateReport::operator==(const AggregateReport& o) const {
    return config.to_json() == o.config.to_json() && build == o.build && true_best == o.true_best &&
           runs == o.runs && pcs == o.pcs && se == o.se && grid_pcs == o.grid_pcs && grid_se == o.grid_se &&
           mean_m == o.mean_m && mean_n == o.mean_n && mean_alpha == o.mean_alpha && mean_beta == o.mean_beta &&
           mean_spent == o.mean_spent && returned == o.returned;
}

// ------------------------------------------------------------------- export

json report_to_json(const AggregateReport& r) {
    json j;
    j["config"] = r.config.to_json();
    j["build"] = r.build;
    j["true_best"] = r.true_best;
    j["runs"] = r.runs;
    j["pcs"] = r.pcs;
    j["se"] = r.se;
    j["grid_pcs"] = r.grid_pcs;
    j["grid_se"] = r.grid_se;
    j["mean_m"] = r.mean_m;
    j["mean_n"] = r.mean_n;
    j["mean_alpha"] = r.mean_alpha;
    j["mean_beta"] = r.mean_beta;
    j["mean_spent"] = r.mean_spent;
    j["returned"] = r.returned;
    return j;
}

AggregateReport report_from_json(const json& j) {
    AggregateReport r;
    r.config = ExperimentConfig::from_json(j.at("config"));
    r.build = j.at("build").get<std::string>();
    r.true_best = j.at("true_best").get<std::size_t>();
    r.runs = j.at("runs").get<std::size_t>();
    r.pcs = j.at("pcs").get<double>();
    r.se = j.at("se").get<double>();
    r.grid_pcs = j.at("grid_pcs").get<std::vector<double>>();
    r.grid_se = j.at("grid_se").get<std::vector<double>>();
    r.mean_m = j.at("mean_m").get<std::vector<double>>();
    r.mean_n = j.at("mean_n").get<double>();
    r.mean_alpha = j.at("mean_alpha").get<std::vector<double>>();
    r.mean_beta = j.at("mean_beta").get<std::vector<double>>();
    r.mean_spent = j.at("mean_spent").get<double>();
    r.returned = j.at("returned").get<std::vector<std::size_t>>();
    return r;
}

std::string report_csv(const AggregateReport& r) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "budget,pcs,se,log_one_minus_pcs\n";
    for (std::size_t g = 0; g < r.config.budget_grid.size(); ++g) {
        const double p = r.grid_pcs[g];
        os << r.config.budget_grid[g] << ',' << p << ',' << r.grid_se[g] << ',';
        if (p < 1.0) os << std::log(1.0 - p);
        else os << "-inf";
        os << '\n';
    }
    return os.str();
}

void export_report(const AggregateReport& r, const std::string& stem) {
    auto write = [](const std::string& path, const std::string& body) {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("I/O error: cannot open " + path);
        f << body;
        if (!f) throw std::runtime_error("I/O error: cannot write " + path);
    };
    write(stem + ".csv", report_csv(r));
    write(stem + ".json", report_to_json(r).dump(2) + "\n");
}

// ------------------------------------------------------------------ targets

namespace {

std::vector<double> kl_to(const Problem& p, std::span<const double> th0, std::span<const double> th) {
    const auto& src = p.sources();
    std::vector<double> row(src.size());
    for (std::size_t l = 0; l < src.size(); ++l) row[l] = kl_divergence(src[l], th0[l], th[l]) / src[l].cost;
    return row;
}

std::size_t true_owner(const Problem& p, std::span<const double> th, std::vector<double>* means) {
    const std::size_t k = p.num_solutions();
    std::size_t o = 0;
    double best = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const auto m = p.true_mean(i, th);
        if (!m) throw InputError("target_ratios needs exact means");
        if (means) (*means)[i] = *m;
        if (i == 0 || *m < best) {
            best = *m;
            o = i;
        }
    }
    return o;
}

}  // namespace

TargetRatios target_ratios(const Problem& p, double epsilon, std::size_t dense_intervals) {
    const ParameterSupport& sup = p.support();
    const std::vector<double> th0 = p.theta0();
    const std::size_t i0 = p.true_best();
    const std::size_t k = p.num_solutions();

    PointSet pts = sup.points;
    if (!sup.is_discrete()) pts.push_back(th0);
    const std::size_t P = pts.size();

    AllocationInstance inst;
    inst.epsilon = epsilon;
    inst.kl.resize(P);
    inst.g_star.assign(P, 0.0);
    inst.favorable.assign(P, 0);
    std::vector<double> means(k), stds(k);
    for (std::size_t b = 0; b < P; ++b) {
        const std::size_t o = true_owner(p, pts[b], &means);
        inst.kl[b] = kl_to(p, th0, pts[b]);
        if (o != i0) continue;
        for (std::size_t i = 0; i < k; ++i) {
            const auto s = p.known_std(i, pts[b]);
            if (!s) throw InputError("target_ratios needs known output variances");
            stds[i] = *s;
        }
        inst.favorable[b] = 1;
        inst.g_star[b] = optimal_point_rate(means, stds, o).g_star;
    }

    TargetRatios out;
    if (!sup.is_discrete()) {
        const std::size_t d = sup.dim();
        const double n = static_cast<double>(dense_intervals);
        const double total = std::pow(n + 1.0, static_cast<double>(d));
        if (dense_intervals == 0 || total > 5e7) throw InputError("target_ratios: dense grid too large");
        // Stream the grid; keep the adversarial rows only.
        std::vector<std::vector<double>> rows;
        std::vector<std::size_t> idx(d, 0);
        std::vector<double> th(d);
        for (;;) {
            for (std::size_t q = 0; q < d; ++q)
                th[q] = sup.lower[q] + (sup.upper[q] - sup.lower[q]) * static_cast<double>(idx[q]) / n;
            if (true_owner(p, th, nullptr) != i0) {
                rows.push_back(kl_to(p, th0, th));
                ++out.adversarial_rows;
                if (rows.size() >= 200000) {
                    std::vector<std::vector<double>> keep;
                    for (std::size_t j : pareto_minimal_rows(rows)) keep.push_back(std::move(rows[j]));
                    rows = std::move(keep);
                }
            }
            std::size_t q = 0;
            while (q < d && ++idx[q] > dense_intervals) idx[q++] = 0;
            if (q == d) break;
        }
        for (std::size_t j : pareto_minimal_rows(rows)) inst.extra_kl.push_back(rows[j]);
    }
    const AllocationSolution sol = solve_maxmin_lp(inst);
    out.alpha = sol.alpha;
    out.beta = sol.beta;
    out.objective = sol.objective;
    return out;
}

}  // namespace osar
