#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace fixopt {

/// Iterate type. All operations work in R^d with the Euclidean inner product.
using Point = Eigen::VectorXd;

class DimensionError : public std::invalid_argument
{
public:
    DimensionError(const std::string& where, Eigen::Index expected, Eigen::Index got)
        : std::invalid_argument(where + ": dimension mismatch (expected " +
                                std::to_string(expected) + ", got " + std::to_string(got) + ")")
    {}
};

inline Point make_point(std::initializer_list<double> coords)
{
    Point p(static_cast<Eigen::Index>(coords.size()));
    Eigen::Index i = 0;
    for (double c : coords) p[i++] = c;
    return p;
}

namespace detail {

inline void require_dim(const char* where, Eigen::Index expected, Eigen::Index got)
{
    if (expected != got) throw DimensionError(where, expected, got);
}

inline void require_finite(const char* where, const Point& x)
{
    if (!x.allFinite()) throw std::invalid_argument(std::string(where) + ": non-finite coordinate");
}

} // namespace detail

} // namespace fixopt
