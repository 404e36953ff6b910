#pragma once

#include "functions.hpp"
#include "operators.hpp"
#include "samplers.hpp"
#include "schedules.hpp"

#include <chrono>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <tuple>
#include <stdexcept>
#include <utility>
#include <vector>

namespace fixopt {

/// One (f_i, T_i) pair of the problem.
struct Component
{
    ConvexFunction objective;
    Operator mapping;
};

/// minimize E[f_w(x)] subject to x in the intersection of Fix(T_i).
///
/// `bounding_ball` is the set the projected engines clip y_n into.
class ProblemInstance
{
public:
    ProblemInstance(std::vector<Component> components, Ball bounding_ball)
        : components_(std::move(components)), bounding_(std::move(bounding_ball))
    {
        if (components_.empty()) throw std::invalid_argument("ProblemInstance: no components");
        const Eigen::Index d = bounding_.dim();
        const bool smooth = components_.front().objective.is_smooth();
        for (const auto& c : components_) {
            detail::require_dim("ProblemInstance", d, c.objective.dim());
            if (auto od = c.mapping.dim()) detail::require_dim("ProblemInstance", d, *od);
            if (c.objective.is_smooth() != smooth)
                throw std::invalid_argument("ProblemInstance: mixed objective families");
        }
    }

    Eigen::Index dim() const noexcept { return bounding_.dim(); }
    std::size_t size() const noexcept { return components_.size(); }
    const std::vector<Component>& components() const noexcept { return components_; }
    const Component& operator[](std::size_t i) const { return components_.at(i); }
    const Ball& bounding_ball() const noexcept { return bounding_; }
    bool smooth() const noexcept { return components_.front().objective.is_smooth(); }

private:
    std::vector<Component> components_;
    Ball bounding_;
};

struct SolverState
{
    std::size_t n = 0;
    Point anchor; ///< x_0, never modified
    Point x;      ///< x_n
    std::optional<double> last_F;

    static SolverState start(Point x0)
    {
        detail::require_finite("SolverState", x0);
        SolverState s;
        s.x = x0;
        s.anchor = std::move(x0);
        return s;
    }
};

/// What one iteration did.
struct StepInfo
{
    std::size_t index; ///< sampled w_n
    Point y;           ///< y_n
    StepSizes steps;   ///< (alpha_n, inner_n)
};

/// ||x - T_i(x)|| for every component.
inline std::vector<double> component_residuals(const Point& x, const ProblemInstance& problem)
{
    detail::require_dim("component_residuals", problem.dim(), x.size());
    std::vector<double> r;
    r.reserve(problem.size());
    for (const auto& c : problem.components()) r.push_back(c.mapping.residual(x));
    return r;
}

/// Sum of fixed-point residuals over all components.
inline double metric_D(const Point& x, const ProblemInstance& problem)
{
    double s = 0.0;
    for (double r : component_residuals(x, problem)) s += r;
    return s;
}

/// sum_i dist_i f_i(x)
inline double metric_F(const Point& x, const ProblemInstance& problem, const Eigen::VectorXd& dist)
{
    if (static_cast<std::size_t>(dist.size()) != problem.size())
        throw std::invalid_argument("metric_F: distribution length does not match component count");
    if ((dist.array() < 0.0).any() || !dist.allFinite() || std::abs(dist.sum() - 1.0) > 1e-9)
        throw std::invalid_argument("metric_F: malformed probability vector");
    double s = 0.0;
    for (std::size_t i = 0; i < problem.size(); ++i)
        s += dist[static_cast<Eigen::Index>(i)] * problem[i].objective.value(x);
    return s;
}

namespace detail {

inline std::size_t draw_index(Sampler& sampler, const ProblemInstance& problem, const Point& x,
                              std::span<const double> residuals)
{
    if (sampler.spec().count() != problem.size())
        throw std::invalid_argument("sampler index count does not match component count");
    if (!sampler.spec().needs_residuals()) return sampler.next();
    if (!residuals.empty()) return sampler.next(residuals);
    const auto r = component_residuals(x, problem);
    return sampler.next(r);
}

// x_{n+1} = alpha_n x_0 + (1 - alpha_n) y_n
inline StepInfo finish_step(SolverState& state, const ProblemInstance& problem, std::size_t w,
                            Point y, StepSizes steps, bool projected)
{
    if (projected) y = project_ball(y, problem.bounding_ball());
    state.x = steps.alpha * state.anchor + (1.0 - steps.alpha) * y;
    ++state.n;
    return {w, std::move(y), steps};
}

inline StepInfo gradient_step(SolverState& state, const ProblemInstance& problem, Sampler& sampler,
                              const StepSchedule& schedule, bool projected,
                              std::span<const double> residuals)
{
    if (!problem.smooth())
        throw NonsmoothError("gradient engine requires smooth (quadratic) objectives");
    detail::require_dim("step_gradient", problem.dim(), state.x.size());
    const StepSizes steps = schedule.value(state.n);
    const std::size_t w = draw_index(sampler, problem, state.x, residuals);
    const auto& c = problem[w];
    Point y = c.mapping.apply(state.x - steps.inner * c.objective.subgradient(state.x));
    return finish_step(state, problem, w, std::move(y), steps, projected);
}

inline StepInfo proximal_step(SolverState& state, const ProblemInstance& problem, Sampler& sampler,
                              const StepSchedule& schedule, bool projected,
                              std::span<const double> residuals)
{
    detail::require_dim("step_proximal", problem.dim(), state.x.size());
    const StepSizes steps = schedule.value(state.n);
    const std::size_t w = draw_index(sampler, problem, state.x, residuals);
    const auto& c = problem[w];
    Point y = c.mapping.apply(c.objective.prox(steps.inner, state.x));
    return finish_step(state, problem, w, std::move(y), steps, projected);
}

} // namespace detail

/// One iteration of the stochastic gradient engine:
///   y_n     = T_w(x_n - lambda_n g_w(x_n))      (optionally clipped to the bounding ball)
///   x_{n+1} = alpha_n x_0 + (1 - alpha_n) y_n
inline StepInfo step_gradient(SolverState& state, const ProblemInstance& problem, Sampler& sampler,
                              const StepSchedule& schedule, bool projected)
{
    schedule.require_admissible(Algorithm::gradient);
    return detail::gradient_step(state, problem, sampler, schedule, projected, {});
}

/// One iteration of the stochastic proximal engine:
///   y_n     = T_w(prox_{gamma_n f_w}(x_n))      (optionally clipped to the bounding ball)
///   x_{n+1} = alpha_n x_0 + (1 - alpha_n) y_n
inline StepInfo step_proximal(SolverState& state, const ProblemInstance& problem, Sampler& sampler,
                              const StepSchedule& schedule, bool projected)
{
    schedule.require_admissible(Algorithm::proximal);
    return detail::proximal_step(state, problem, sampler, schedule, projected, {});
}

struct StoppingRule
{
    double d_threshold = 1e-3;
    double f_delta_threshold = 1e-5;
    std::size_t n_max = 1000;
};

struct TraceRecord
{
    std::size_t n;
    double D;
    double F;
    double alpha;
    double inner;
    double elapsed_s;               ///< cumulative wall time since the run started
    std::vector<double> residuals;  ///< ||x_n - T_i(x_n)|| per component
};

struct RunTrace
{
    std::vector<TraceRecord> records; ///< dense, n = 0 .. terminal
    std::optional<std::size_t> d_crossing;       ///< first n with D_n <= d_threshold
    std::optional<std::size_t> f_delta_crossing; ///< first n >= 1 with |F_n - F_{n-1}| <= f_delta_threshold
    std::size_t terminal = 0;
    bool uniform_fallback = false; ///< F_n used the uniform law (greedy sampler)
    Point final_x;
};

/// First crossings over a dense (D_n, F_n) series.
inline std::pair<std::optional<std::size_t>, std::optional<std::size_t>>
find_crossings(std::span<const TraceRecord> records, const StoppingRule& rule)
{
    std::optional<std::size_t> d, f;
    for (std::size_t k = 0; k < records.size(); ++k) {
        if (!d && records[k].D <= rule.d_threshold) d = records[k].n;
        if (!f && k > 0 && std::abs(records[k].F - records[k - 1].F) <= rule.f_delta_threshold)
            f = records[k].n;
    }
    return {d, f};
}

/// Law used for F_n: the sampler's marginal, uniform when it has none.
inline std::pair<Eigen::VectorXd, bool> objective_distribution(const SamplerSpec& spec)
{
    if (auto m = marginal_distribution(spec)) return {std::move(*m), false};
    const auto I = static_cast<Eigen::Index>(spec.count());
    return {Eigen::VectorXd::Constant(I, 1.0 / static_cast<double>(I)), true};
}

/// Runs one engine from x0 for stopping.n_max iterations, recording D_n and
/// F_n at every n. Threshold crossings are recorded but do not end the run.
inline RunTrace run(const ProblemInstance& problem, Algorithm algorithm, const StepSchedule& schedule,
                    const SamplerSpec& sampler_spec, const Point& x0, const StoppingRule& stopping,
                    std::uint64_t seed, bool projected)
{
    schedule.require_admissible(algorithm);
    detail::require_dim("run", problem.dim(), x0.size());
    if (sampler_spec.count() != problem.size())
        throw std::invalid_argument("run: sampler index count does not match component count");
    if (algorithm == Algorithm::gradient && !problem.smooth())
        throw NonsmoothError("run: gradient engine requires smooth (quadratic) objectives");

    const auto [dist, fallback] = objective_distribution(sampler_spec);
    Sampler sampler(sampler_spec, seed);
    SolverState state = SolverState::start(x0);

    RunTrace trace;
    trace.uniform_fallback = fallback;
    trace.records.reserve(stopping.n_max + 1);

    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();

    for (;;) {
        std::vector<double> res = component_residuals(state.x, problem);
        double D = 0.0;
        for (double r : res) D += r;
        const double F = metric_F(state.x, problem, dist);
        const StepSizes steps = schedule.value(state.n);
        const double elapsed = std::chrono::duration<double>(clock::now() - t0).count();
        trace.records.push_back({state.n, D, F, steps.alpha, steps.inner, elapsed, res});
        state.last_F = F;

        if (state.n >= stopping.n_max) break;
        if (algorithm == Algorithm::gradient)
            detail::gradient_step(state, problem, sampler, schedule, projected, res);
        else
            detail::proximal_step(state, problem, sampler, schedule, projected, res);
    }

    std::tie(trace.d_crossing, trace.f_delta_crossing) = find_crossings(trace.records, stopping);
    trace.terminal = state.n;
    trace.final_x = std::move(state.x);
    return trace;
}

} // namespace fixopt
