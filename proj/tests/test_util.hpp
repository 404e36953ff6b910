#pragma once

#include <fixopt/functions.hpp>
#include <fixopt/operators.hpp>
#include <fixopt/rng.hpp>

#include <cmath>
#include <functional>

namespace fixopt::test {

inline Point random_point(Rng& rng, Eigen::Index d, double scale)
{
    Point x(d);
    for (Eigen::Index j = 0; j < d; ++j) x[j] = rng.uniform(-scale, scale);
    return x;
}

/// Random member of the operator grammar, up to `depth` nested half averages.
inline Operator random_operator(Rng& rng, Eigen::Index d, int depth)
{
    switch (rng.below(depth > 0 ? 4 : 3)) {
    case 0: return Operator::identity();
    case 1: return Operator::ball_projection(Ball(random_point(rng, d, 1.0), 0.05 + rng.uniform01()));
    case 2: {
        std::vector<Ball> inner;
        const auto K = 1 + rng.below(4);
        for (std::uint64_t k = 0; k < K; ++k)
            inner.emplace_back(random_point(rng, d, 1.0 / std::sqrt(static_cast<double>(d))),
                               rng.uniform_open_closed());
        return Operator::gcfs_composite(Ball::unit(d), std::move(inner));
    }
    default: return Operator::half_averaged(random_operator(rng, d, depth - 1));
    }
}

inline ConvexFunction random_function(Rng& rng, Eigen::Index d, bool smooth)
{
    Eigen::VectorXd c(d);
    Point v = random_point(rng, d, 1.0);
    if (smooth) {
        for (Eigen::Index j = 0; j < d; ++j) c[j] = rng.uniform(0.0, 5.0);
        return ConvexFunction::diag_quadratic(c, v);
    }
    for (Eigen::Index j = 0; j < d; ++j) c[j] = rng.uniform_open_closed();
    return ConvexFunction::weighted_l1(c, v);
}

/// Golden-section minimization of a unimodal scalar function on [lo, hi].
inline double golden_section_min(const std::function<double(double)>& phi, double lo, double hi,
                                  int iterations = 200)
{
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = phi(c), fd = phi(d);
    for (int k = 0; k < iterations && b - a > 1e-14; ++k) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = phi(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = phi(d);
        }
    }
    return 0.5 * (a + b);
}

/// Prox by brute force: coordinatewise golden-section minimization of
/// f(y) + ||z - y||^2 / (2 gamma), cycling coordinates until they settle.
/// Only evaluates f; never touches the closed-form prox.
inline Point prox_oracle(const ConvexFunction& f, double gamma, const Point& z)
{
    Point y = z;
    const double R = 2.0 * (z.cwiseAbs().maxCoeff() + 1.0) + 10.0 * gamma * 10.0;
    for (int sweep = 0; sweep < 4; ++sweep) {
        for (Eigen::Index j = 0; j < z.size(); ++j) {
            auto phi = [&](double t) {
                Point w = y;
                w[j] = t;
                return f.value(w) + (w - z).squaredNorm() / (2.0 * gamma);
            };
            y[j] = golden_section_min(phi, z[j] - R, z[j] + R);
        }
    }
    return y;
}

} // namespace fixopt::test
