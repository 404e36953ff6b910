#pragma once

#include "rng.hpp"
#include "solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

namespace fixopt {

enum class ObjectiveKind { quadratic, weighted_l1 };

inline std::string_view to_string(ObjectiveKind k)
{
    return k == ObjectiveKind::quadratic ? "quadratic" : "weighted_l1";
}

inline ObjectiveKind parse_objective_kind(std::string_view s)
{
    if (s == "quadratic") return ObjectiveKind::quadratic;
    if (s == "weighted_l1") return ObjectiveKind::weighted_l1;
    throw std::invalid_argument("unknown objective '" + std::string(s) + "'");
}

struct ScheduleParams
{
    double a = 0.25;
    double b = 0.5;
    double scale_alpha = 1e-3;
    double scale_inner = 1e-3;

    StepSchedule schedule() const { return StepSchedule(a, b, scale_alpha, scale_inner); }
};

struct ExperimentConfig
{
    std::size_t d = 64;
    std::size_t I = 4;
    std::size_t K = 3;
    ObjectiveKind objective = ObjectiveKind::quadratic;
    Algorithm algorithm = Algorithm::gradient;
    SamplerKind sampler = SamplerKind::iid;
    std::optional<std::uint64_t> markov_seed; ///< defaults to a stream derived from master_seed
    ScheduleParams schedule;
    std::size_t samplings = 10;
    std::size_t n_max = 1000;
    double d_threshold = 1e-3;
    double f_delta_threshold = 1e-5;
    std::uint64_t master_seed = 1;
    bool projected = true;

    StoppingRule stopping() const { return {d_threshold, f_delta_threshold, n_max}; }

    std::uint64_t effective_markov_seed() const
    {
        return markov_seed ? *markov_seed : derive_seed(master_seed, 0x4d41524b4f56ULL);
    }

    void validate() const
    {
        if (d < 1 || I < 1 || K < 1) throw std::invalid_argument("config: d, I and K must be >= 1");
        if (samplings < 1) throw std::invalid_argument("config: samplings must be >= 1");
        if (!(d_threshold > 0.0) || !(f_delta_threshold > 0.0))
            throw std::invalid_argument("config: thresholds must be positive");
        if (algorithm == Algorithm::gradient && objective != ObjectiveKind::quadratic)
            throw std::invalid_argument("config: the gradient algorithm requires the quadratic objective");
        schedule.schedule().require_admissible(algorithm);
    }
};

/// Random instance of the benchmark family: every T_i is the composite
/// operator over K random balls inside the unit ball, and every f_i is
///   quadratic:    diag in [0, d], linear in [-1, 1]^d
///   weighted_l1:  weights in (0, 1], anchor in [-1, 1]^d
/// with radii in (0, 1] and ball centers in [-1/sqrt(d), 1/sqrt(d))^d.
inline ProblemInstance generate_problem(std::uint64_t seed, std::size_t d, std::size_t I, std::size_t K,
                                        ObjectiveKind objective)
{
    if (d < 1 || I < 1 || K < 1) throw std::invalid_argument("generate_problem: d, I, K must be >= 1");
    Rng rng(seed);
    const auto dim = static_cast<Eigen::Index>(d);
    const double dd = static_cast<double>(d);
    const double c_max = 1.0 / std::sqrt(dd);

    std::vector<Component> comps;
    comps.reserve(I);
    for (std::size_t i = 0; i < I; ++i) {
        Eigen::VectorXd coef(dim);
        Point vec(dim);
        std::optional<ConvexFunction> f;
        if (objective == ObjectiveKind::quadratic) {
            for (Eigen::Index j = 0; j < dim; ++j) coef[j] = rng.uniform01() * dd;
            for (Eigen::Index j = 0; j < dim; ++j) vec[j] = rng.uniform(-1.0, 1.0);
            f = ConvexFunction::diag_quadratic(std::move(coef), std::move(vec));
        } else {
            for (Eigen::Index j = 0; j < dim; ++j) coef[j] = rng.uniform_open_closed();
            for (Eigen::Index j = 0; j < dim; ++j) vec[j] = rng.uniform(-1.0, 1.0);
            f = ConvexFunction::weighted_l1(std::move(coef), std::move(vec));
        }

        std::vector<Ball> balls;
        balls.reserve(K);
        for (std::size_t k = 0; k < K; ++k) {
            Point c(dim);
            for (Eigen::Index j = 0; j < dim; ++j) c[j] = rng.uniform(-c_max, c_max);
            balls.emplace_back(std::move(c), rng.uniform_open_closed());
        }
        comps.push_back({std::move(*f), Operator::gcfs_composite(Ball::unit(dim), std::move(balls))});
    }
    return ProblemInstance(std::move(comps), Ball::unit(dim));
}

/// A first-crossing event of the averaged trace.
struct CrossingEvent
{
    std::string name;              ///< "D_crossing", "dF_crossing", "terminal"
    double threshold = 0.0;        ///< 0 for the terminal row
    std::optional<std::size_t> n;  ///< none if the averaged series never crossed
    double time_s = 0.0;
    double value = 0.0;            ///< D_n, F_n or F_n respectively
    std::optional<double> mean_run_n; ///< mean crossing n over runs that crossed
    std::size_t runs_crossed = 0;
};

struct ReportRow
{
    std::size_t n;
    double D;
    double F;
    double alpha;
    double inner;
    double time_s;
    std::vector<double> residuals;
};

/// Ensemble averages indexed by n.
struct EnsembleReport
{
    ExperimentConfig config;
    std::vector<ReportRow> rows;
    std::vector<CrossingEvent> events; ///< D crossing, dF crossing, terminal
    std::string f_distribution;        ///< "uniform", "stationary" or "uniform_fallback"
    std::uint64_t problem_seed = 0;
    std::vector<std::uint64_t> run_seeds;
};

inline std::uint64_t run_seed(std::uint64_t master, std::size_t run_index)
{
    return derive_seed(master, static_cast<std::uint64_t>(run_index) + 1);
}

inline Point random_start(std::uint64_t seed, std::size_t d)
{
    Rng rng(mix64(seed ^ 0x5851f42d4c957f2dULL));
    Point x(static_cast<Eigen::Index>(d));
    for (Eigen::Index j = 0; j < x.size(); ++j) x[j] = rng.uniform(-1.0, 1.0);
    return x;
}

/// Averages equally long traces pointwise in n and extracts the crossing rows.
inline EnsembleReport aggregate(const ExperimentConfig& cfg, const std::vector<RunTrace>& runs)
{
    if (runs.empty()) throw std::invalid_argument("aggregate: no runs");
    const std::size_t len = runs.front().records.size();
    for (const auto& r : runs)
        if (r.records.size() != len) throw std::invalid_argument("aggregate: traces differ in length");

    EnsembleReport rep;
    rep.config = cfg;
    const double inv = 1.0 / static_cast<double>(runs.size());
    rep.rows.reserve(len);
    for (std::size_t k = 0; k < len; ++k) {
        const auto& first = runs.front().records[k];
        ReportRow row{first.n, 0.0, 0.0, first.alpha, first.inner, 0.0,
                      std::vector<double>(first.residuals.size(), 0.0)};
        for (const auto& r : runs) {
            const auto& rec = r.records[k];
            row.D += rec.D;
            row.F += rec.F;
            row.time_s += rec.elapsed_s;
            for (std::size_t i = 0; i < rec.residuals.size(); ++i) row.residuals[i] += rec.residuals[i];
        }
        row.D *= inv;
        row.F *= inv;
        row.time_s *= inv;
        for (double& v : row.residuals) v *= inv;
        rep.rows.push_back(std::move(row));
    }

    const StoppingRule rule = cfg.stopping();
    auto mean_run = [&](auto member) {
        std::pair<std::optional<double>, std::size_t> out{std::nullopt, 0};
        double s = 0.0;
        for (const auto& r : runs)
            if (auto v = r.*member) {
                s += static_cast<double>(*v);
                ++out.second;
            }
        if (out.second > 0) out.first = s / static_cast<double>(out.second);
        return out;
    };

    CrossingEvent dev{"D_crossing", rule.d_threshold};
    CrossingEvent fev{"dF_crossing", rule.f_delta_threshold};
    for (std::size_t k = 0; k < rep.rows.size(); ++k) {
        const auto& row = rep.rows[k];
        if (!dev.n && row.D <= rule.d_threshold) {
            dev.n = row.n;
            dev.time_s = row.time_s;
            dev.value = row.D;
        }
        if (!fev.n && k > 0 && std::abs(row.F - rep.rows[k - 1].F) <= rule.f_delta_threshold) {
            fev.n = row.n;
            fev.time_s = row.time_s;
            fev.value = row.F;
        }
    }
    std::tie(dev.mean_run_n, dev.runs_crossed) = mean_run(&RunTrace::d_crossing);
    std::tie(fev.mean_run_n, fev.runs_crossed) = mean_run(&RunTrace::f_delta_crossing);

    const auto& last = rep.rows.back();
    CrossingEvent term{"terminal", 0.0, last.n, last.time_s, last.F, static_cast<double>(last.n),
                       runs.size()};
    rep.events = {std::move(dev), std::move(fev), std::move(term)};
    return rep;
}

/// Runs `cfg.samplings` independent runs on one generated instance and
/// averages them. Runs are distributed over `workers` threads; the result
/// does not depend on the worker count.
inline EnsembleReport run_experiment(const ExperimentConfig& cfg, unsigned workers = 1)
{
    cfg.validate();
    const ProblemInstance problem = generate_problem(cfg.master_seed, cfg.d, cfg.I, cfg.K, cfg.objective);
    const SamplerSpec spec = SamplerSpec::make(cfg.sampler, cfg.I, cfg.effective_markov_seed());
    const StepSchedule schedule = cfg.schedule.schedule();
    const StoppingRule stopping = cfg.stopping();

    std::vector<RunTrace> runs(cfg.samplings);
    std::vector<std::uint64_t> seeds(cfg.samplings);
    for (std::size_t s = 0; s < cfg.samplings; ++s) seeds[s] = run_seed(cfg.master_seed, s);

    auto do_run = [&](std::size_t s) {
        runs[s] = run(problem, cfg.algorithm, schedule, spec, random_start(seeds[s], cfg.d), stopping,
                      seeds[s], cfg.projected);
    };

    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(cfg.samplings)));
    if (workers == 1) {
        for (std::size_t s = 0; s < cfg.samplings; ++s) do_run(s);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t s; (s = next.fetch_add(1)) < cfg.samplings;) {
                    try {
                        do_run(s);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    }

    EnsembleReport rep = aggregate(cfg, runs);
    rep.problem_seed = cfg.master_seed;
    rep.run_seeds = std::move(seeds);
    switch (cfg.sampler) {
    case SamplerKind::markov: rep.f_distribution = "stationary"; break;
    case SamplerKind::greedy: rep.f_distribution = "uniform_fallback"; break;
    default: rep.f_distribution = "uniform"; break;
    }
    return rep;
}

} // namespace fixopt
