#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fixopt {

enum class Algorithm { gradient, proximal };

inline std::string_view to_string(Algorithm a)
{
    return a == Algorithm::gradient ? "gradient" : "proximal";
}

inline Algorithm parse_algorithm(std::string_view s)
{
    if (s == "gradient") return Algorithm::gradient;
    if (s == "proximal") return Algorithm::proximal;
    throw std::invalid_argument("unknown algorithm '" + std::string(s) + "'");
}

struct StepSizes
{
    double alpha; ///< anchor weight alpha_n
    double inner; ///< gradient step lambda_n or prox parameter gamma_n
};

enum class ScheduleCondition {
    inner_exponent,  ///< a in (0, 1/2)
    alpha_exponent,  ///< b in (a, 1 - a)
    exponent_sum,    ///< a + b < 1 (proximal only)
    alpha_scale,     ///< scale_alpha in (0, 1]
    inner_scale,     ///< scale_inner in (0, 1]
};

struct ScheduleViolation
{
    ScheduleCondition condition;
    std::string message;
};

/// Power-law step sizes alpha_n = scale_alpha / (n+1)^b and
/// inner_n = scale_inner / (n+1)^a.
///
/// For this family the step-size assumptions of both engines reduce to the
/// exponent tests in validate(): a in (0, 1/2) and b in (a, 1 - a), plus
/// a + b < 1 for the proximal engine. The ratio of consecutive terms is
/// ((n+2)/(n+1))^max(a,b) <= 2, so sigma = 2 bounds it for every admissible
/// schedule.
class StepSchedule
{
public:
    StepSchedule(double a, double b, double scale_alpha = 1.0, double scale_inner = 1.0)
        : a_(a), b_(b), scale_alpha_(scale_alpha), scale_inner_(scale_inner)
    {
        if (!std::isfinite(a) || !std::isfinite(b))
            throw std::invalid_argument("StepSchedule: exponents must be finite");
        if (!(scale_alpha > 0.0) || !(scale_inner > 0.0) || !std::isfinite(scale_alpha) ||
            !std::isfinite(scale_inner))
            throw std::invalid_argument("StepSchedule: scales must be positive and finite");
    }

    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    double scale_alpha() const noexcept { return scale_alpha_; }
    double scale_inner() const noexcept { return scale_inner_; }

    StepSizes value(std::size_t n) const
    {
        const double base = static_cast<double>(n) + 1.0;
        return {scale_alpha_ * std::pow(base, -b_), scale_inner_ * std::pow(base, -a_)};
    }

    std::vector<ScheduleViolation> validate(Algorithm algorithm) const
    {
        std::vector<ScheduleViolation> out;
        if (!(a_ > 0.0 && a_ < 0.5))
            out.push_back({ScheduleCondition::inner_exponent, "a must lie in (0, 1/2)"});
        if (!(b_ > a_ && b_ < 1.0 - a_))
            out.push_back({ScheduleCondition::alpha_exponent, "b must lie in (a, 1 - a)"});
        if (algorithm == Algorithm::proximal && !(a_ + b_ < 1.0))
            out.push_back({ScheduleCondition::exponent_sum, "a + b must be < 1"});
        if (!(scale_alpha_ <= 1.0))
            out.push_back({ScheduleCondition::alpha_scale, "scale_alpha must lie in (0, 1]"});
        if (!(scale_inner_ <= 1.0))
            out.push_back({ScheduleCondition::inner_scale, "scale_inner must lie in (0, 1]"});
        return out;
    }

    bool admissible(Algorithm algorithm) const { return validate(algorithm).empty(); }

    void require_admissible(Algorithm algorithm) const
    {
        const auto v = validate(algorithm);
        if (v.empty()) return;
        std::string msg = "step schedule not admissible for ";
        msg += to_string(algorithm);
        for (const auto& e : v) msg += "; " + e.message;
        throw std::invalid_argument(msg);
    }

private:
    double a_;
    double b_;
    double scale_alpha_;
    double scale_inner_;
};

} // namespace fixopt
