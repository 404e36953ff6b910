#pragma once

#include "point.hpp"

#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

namespace fixopt {

/// Closed Euclidean ball { x : ||x - center|| <= radius }.
class Ball
{
public:
    Ball(Point center, double radius) : center_(std::move(center)), radius_(radius)
    {
        if (center_.size() < 1) throw std::invalid_argument("Ball: empty center");
        detail::require_finite("Ball", center_);
        if (!(radius_ > 0.0) || !std::isfinite(radius_))
            throw std::invalid_argument("Ball: radius must be positive and finite");
    }

    static Ball unit(Eigen::Index dim) { return Ball(Point::Zero(dim), 1.0); }

    const Point& center() const noexcept { return center_; }
    double radius() const noexcept { return radius_; }
    Eigen::Index dim() const noexcept { return center_.size(); }

    bool contains(const Point& x, double tol = 0.0) const
    {
        detail::require_dim("Ball::contains", dim(), x.size());
        return (x - center_).norm() <= radius_ + tol;
    }

private:
    Point center_;
    double radius_;
};

/// Metric projection onto a ball. The result is clamped so that it lies in
/// the ball in floating point, which makes the projection exactly idempotent.
inline Point project_ball(const Point& x, const Ball& b)
{
    detail::require_dim("project_ball", b.dim(), x.size());
    Point diff = x - b.center();
    double dist = diff.norm();
    if (dist <= b.radius()) return x;

    diff *= b.radius() / dist;
    Point p = b.center() + diff;
    // rounding can leave p a few ulps outside; shrink toward the center
    constexpr double shrink = 1.0 - 4.0 * std::numeric_limits<double>::epsilon();
    for (int k = 0; k < 8 && (p - b.center()).norm() > b.radius(); ++k) {
        diff *= shrink;
        p = b.center() + diff;
    }
    return p;
}

/// A firmly nonexpansive mapping built from a closed grammar:
///
///   Identity | BallProjection(ball) | GcfsComposite(outer, inner...) | HalfAveraged(op)
///
/// GcfsComposite evaluates x -> (x + P_outer(mean_k P_inner_k(x))) / 2, whose
/// fixed point set is the subset of the outer ball closest in mean square
/// distance to the inner balls. Every expressible operator is firmly
/// nonexpansive. Values are immutable and cheap to copy (subtrees are shared).
class Operator
{
public:
    struct Identity
    {};
    struct BallProjection
    {
        Ball ball;
    };
    struct GcfsComposite
    {
        Ball outer;
        std::vector<Ball> inner;
    };
    struct HalfAveraged
    {
        std::shared_ptr<const Operator> inner;
    };
    using Node = std::variant<Identity, BallProjection, GcfsComposite, HalfAveraged>;

    static Operator identity() { return Operator(Identity{}); }

    static Operator ball_projection(Ball b) { return Operator(BallProjection{std::move(b)}); }

    static Operator gcfs_composite(Ball outer, std::vector<Ball> inner)
    {
        if (inner.empty()) throw std::invalid_argument("gcfs_composite: empty inner ball list");
        for (const auto& b : inner) detail::require_dim("gcfs_composite", outer.dim(), b.dim());
        return Operator(GcfsComposite{std::move(outer), std::move(inner)});
    }

    static Operator half_averaged(Operator inner)
    {
        return Operator(HalfAveraged{std::make_shared<const Operator>(std::move(inner))});
    }

    const Node& node() const noexcept { return node_; }

    /// Dimension the operator acts on; Identity acts on any dimension.
    std::optional<Eigen::Index> dim() const
    {
        return std::visit(
            [](const auto& n) -> std::optional<Eigen::Index> {
                using N = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<N, Identity>) return std::nullopt;
                else if constexpr (std::is_same_v<N, BallProjection>) return n.ball.dim();
                else if constexpr (std::is_same_v<N, GcfsComposite>) return n.outer.dim();
                else return n.inner->dim();
            },
            node_);
    }

    Point apply(const Point& x) const
    {
        if (auto d = dim()) detail::require_dim("Operator::apply", *d, x.size());
        return eval(x);
    }

    /// ||x - T(x)||
    double residual(const Point& x) const { return (x - apply(x)).norm(); }

private:
    explicit Operator(Node n) : node_(std::move(n)) {}

    Point eval(const Point& x) const
    {
        return std::visit(
            [&x](const auto& n) -> Point {
                using N = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<N, Identity>) {
                    return x;
                } else if constexpr (std::is_same_v<N, BallProjection>) {
                    return project_ball(x, n.ball);
                } else if constexpr (std::is_same_v<N, GcfsComposite>) {
                    Point mean = Point::Zero(x.size());
                    for (const auto& b : n.inner) mean += project_ball(x, b);
                    mean /= static_cast<double>(n.inner.size());
                    return 0.5 * (x + project_ball(mean, n.outer));
                } else {
                    return 0.5 * (x + n.inner->eval(x));
                }
            },
            node_);
    }

    Node node_;
};

/// ||x-y||^2 - ||Tx-Ty||^2 - ||(x-Tx)-(y-Ty)||^2, nonnegative iff the firm
/// nonexpansivity inequality holds at (x, y).
inline double firm_nonexpansivity_slack(const Operator& op, const Point& x, const Point& y)
{
    detail::require_dim("firm_nonexpansivity_slack", x.size(), y.size());
    const Point tx = op.apply(x);
    const Point ty = op.apply(y);
    return (x - y).squaredNorm() - (tx - ty).squaredNorm() - ((x - tx) - (y - ty)).squaredNorm();
}

} // namespace fixopt
