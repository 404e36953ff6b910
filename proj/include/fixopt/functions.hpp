#pragma once

#include "point.hpp"

#include <optional>
#include <stdexcept>
#include <utility>
#include <variant>

namespace fixopt {

class NonsmoothError : public std::logic_error
{
public:
    using std::logic_error::logic_error;
};

/// Convex objective component. Two families are supported:
///
///   DiagQuadratic:  f(x) = 1/2 sum_j diag_j x_j^2 + <linear, x>,   diag_j >= 0
///   WeightedL1:     f(x) = sum_j weights_j |x_j - anchor_j|,       weights_j > 0
///
/// Both have closed-form proximity operators.
class ConvexFunction
{
public:
    struct DiagQuadratic
    {
        Eigen::VectorXd diag;
        Point linear;
    };
    struct WeightedL1
    {
        Eigen::VectorXd weights;
        Point anchor;
    };
    using Form = std::variant<DiagQuadratic, WeightedL1>;

    static ConvexFunction diag_quadratic(Eigen::VectorXd diag, Point linear)
    {
        detail::require_dim("diag_quadratic", diag.size(), linear.size());
        if (diag.size() < 1) throw std::invalid_argument("diag_quadratic: empty");
        detail::require_finite("diag_quadratic", diag);
        detail::require_finite("diag_quadratic", linear);
        if ((diag.array() < 0.0).any())
            throw std::invalid_argument("diag_quadratic: negative diagonal entry");
        return ConvexFunction(DiagQuadratic{std::move(diag), std::move(linear)});
    }

    static ConvexFunction weighted_l1(Eigen::VectorXd weights, Point anchor)
    {
        detail::require_dim("weighted_l1", weights.size(), anchor.size());
        if (weights.size() < 1) throw std::invalid_argument("weighted_l1: empty");
        detail::require_finite("weighted_l1", weights);
        detail::require_finite("weighted_l1", anchor);
        if (!(weights.array() > 0.0).all())
            throw std::invalid_argument("weighted_l1: weights must be positive");
        return ConvexFunction(WeightedL1{std::move(weights), std::move(anchor)});
    }

    /// The constant-zero function on R^d.
    static ConvexFunction zero(Eigen::Index dim)
    {
        return diag_quadratic(Eigen::VectorXd::Zero(dim), Point::Zero(dim));
    }

    const Form& form() const noexcept { return form_; }
    bool is_smooth() const noexcept { return std::holds_alternative<DiagQuadratic>(form_); }

    Eigen::Index dim() const
    {
        if (const auto* q = std::get_if<DiagQuadratic>(&form_)) return q->diag.size();
        return std::get<WeightedL1>(form_).weights.size();
    }

    double value(const Point& x) const
    {
        detail::require_dim("ConvexFunction::value", dim(), x.size());
        if (const auto* q = std::get_if<DiagQuadratic>(&form_))
            return 0.5 * (q->diag.array() * x.array().square()).sum() + q->linear.dot(x);
        const auto& l = std::get<WeightedL1>(form_);
        return (l.weights.array() * (x - l.anchor).array().abs()).sum();
    }

    Point gradient(const Point& x) const
    {
        const auto* q = std::get_if<DiagQuadratic>(&form_);
        if (!q) throw NonsmoothError("gradient: weighted L1 objective is not differentiable");
        detail::require_dim("ConvexFunction::gradient", dim(), x.size());
        return (q->diag.array() * x.array()).matrix() + q->linear;
    }

    /// A subgradient; for WeightedL1 the zero element is chosen at kinks,
    /// which is the minimal-norm element of the subdifferential there.
    Point subgradient(const Point& x) const
    {
        if (is_smooth()) return gradient(x);
        detail::require_dim("ConvexFunction::subgradient", dim(), x.size());
        const auto& l = std::get<WeightedL1>(form_);
        Point g(x.size());
        for (Eigen::Index j = 0; j < x.size(); ++j) {
            const double t = x[j] - l.anchor[j];
            g[j] = t > 0.0 ? l.weights[j] : (t < 0.0 ? -l.weights[j] : 0.0);
        }
        return g;
    }

    /// argmin_y f(y) + ||z - y||^2 / (2 gamma)
    Point prox(double gamma, const Point& z) const
    {
        if (!(gamma > 0.0) || !std::isfinite(gamma))
            throw std::invalid_argument("prox: gamma must be positive and finite");
        detail::require_dim("ConvexFunction::prox", dim(), z.size());
        if (const auto* q = std::get_if<DiagQuadratic>(&form_))
            return ((z - gamma * q->linear).array() / (1.0 + gamma * q->diag.array())).matrix();
        const auto& l = std::get<WeightedL1>(form_);
        Point p(z.size());
        for (Eigen::Index j = 0; j < z.size(); ++j)
            p[j] = l.anchor[j] + soft_threshold(z[j] - l.anchor[j], gamma * l.weights[j]);
        return p;
    }

    /// Lipschitz constant of the gradient; none for affine or nonsmooth objectives.
    std::optional<double> lipschitz_gradient() const
    {
        const auto* q = std::get_if<DiagQuadratic>(&form_);
        if (!q) return std::nullopt;
        const double L = q->diag.maxCoeff();
        if (L <= 0.0) return std::nullopt;
        return L;
    }

    static double soft_threshold(double t, double tau)
    {
        if (t > tau) return t - tau;
        if (t < -tau) return t + tau;
        return 0.0;
    }

private:
    explicit ConvexFunction(Form f) : form_(std::move(f)) {}

    Form form_;
};

} // namespace fixopt
