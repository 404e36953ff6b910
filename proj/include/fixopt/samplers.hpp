#pragma once

#include "rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace fixopt {

/// Stationary distribution of a positive row-stochastic matrix, obtained by
/// solving pi (P - Id) = 0 with the normalization sum(pi) = 1 substituted
/// for one balance equation.
inline Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& P)
{
    const Eigen::Index n = P.rows();
    if (n < 1 || P.cols() != n) throw std::invalid_argument("stationary_distribution: P must be square");
    if (!(P.array() > 0.0).all() || !P.allFinite())
        throw std::invalid_argument("stationary_distribution: entries must be positive");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(P.row(i).sum() - 1.0) > 1e-12)
            throw std::invalid_argument("stationary_distribution: row " + std::to_string(i) +
                                        " does not sum to 1");
    }

    Eigen::MatrixXd A = P.transpose() - Eigen::MatrixXd::Identity(n, n);
    A.row(n - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs[n - 1] = 1.0;
    Eigen::VectorXd pi = A.fullPivLu().solve(rhs);

    // one refinement sweep of pi <- pi P pulls the residual to rounding level
    pi = (P.transpose() * pi).eval();
    pi = pi.cwiseMax(0.0);
    pi /= pi.sum();
    return pi;
}

/// Positive Markov matrix with i.i.d. uniform(0,1) entries shifted by 0.1,
/// rows normalized.
inline Eigen::MatrixXd random_markov_matrix(std::size_t states, std::uint64_t seed)
{
    if (states < 1) throw std::invalid_argument("random_markov_matrix: need at least one state");
    const auto n = static_cast<Eigen::Index>(states);
    Rng rng(seed);
    Eigen::MatrixXd P(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) P(i, j) = rng.uniform01() + 0.1;
        P.row(i) /= P.row(i).sum();
    }
    return P;
}

enum class SamplerKind { iid, greedy, perm, markov };

inline std::string_view to_string(SamplerKind k)
{
    switch (k) {
    case SamplerKind::iid: return "iid";
    case SamplerKind::greedy: return "greedy";
    case SamplerKind::perm: return "perm";
    case SamplerKind::markov: return "markov";
    }
    return "?";
}

inline SamplerKind parse_sampler_kind(std::string_view s)
{
    if (s == "iid") return SamplerKind::iid;
    if (s == "greedy") return SamplerKind::greedy;
    if (s == "perm") return SamplerKind::perm;
    if (s == "markov") return SamplerKind::markov;
    throw std::invalid_argument("unknown sampler '" + std::string(s) + "'");
}

/// How the index sequence w_n is generated. Indices are 0-based.
///
///   iid     uniform i.i.d. draws
///   greedy  index of the largest residual ||x_n - T_i(x_n)|| (ties -> smallest)
///   perm    a fresh random permutation of all indices every I draws
///   markov  transitions of a positive Markov chain started in state 0
class SamplerSpec
{
public:
    struct UniformIid
    {
        std::size_t count;
    };
    struct GreedyMaxResidual
    {
        std::size_t count;
    };
    struct PermutationCycle
    {
        std::size_t count;
    };
    struct MarkovChain
    {
        Eigen::MatrixXd transition;
    };
    using Variant = std::variant<UniformIid, GreedyMaxResidual, PermutationCycle, MarkovChain>;

    static SamplerSpec uniform_iid(std::size_t count) { return SamplerSpec(UniformIid{check(count)}); }
    static SamplerSpec greedy(std::size_t count) { return SamplerSpec(GreedyMaxResidual{check(count)}); }
    static SamplerSpec permutation(std::size_t count) { return SamplerSpec(PermutationCycle{check(count)}); }

    static SamplerSpec markov(Eigen::MatrixXd P)
    {
        if (P.rows() < 1 || P.rows() != P.cols())
            throw std::invalid_argument("markov sampler: transition matrix must be square");
        if (!(P.array() > 0.0).all())
            throw std::invalid_argument("markov sampler: entries must be strictly positive");
        for (Eigen::Index i = 0; i < P.rows(); ++i)
            if (std::abs(P.row(i).sum() - 1.0) > 1e-12)
                throw std::invalid_argument("markov sampler: rows must sum to 1");
        return SamplerSpec(MarkovChain{std::move(P)});
    }

    /// Builds the spec for `kind`; markov draws its matrix from `markov_seed`.
    static SamplerSpec make(SamplerKind kind, std::size_t count, std::uint64_t markov_seed = 0)
    {
        switch (kind) {
        case SamplerKind::iid: return uniform_iid(count);
        case SamplerKind::greedy: return greedy(count);
        case SamplerKind::perm: return permutation(count);
        case SamplerKind::markov: return markov(random_markov_matrix(check(count), markov_seed));
        }
        throw std::invalid_argument("unknown sampler kind");
    }

    const Variant& variant() const noexcept { return v_; }

    SamplerKind kind() const noexcept { return static_cast<SamplerKind>(v_.index()); }

    std::size_t count() const
    {
        return std::visit(
            [](const auto& s) -> std::size_t {
                if constexpr (std::is_same_v<std::decay_t<decltype(s)>, MarkovChain>)
                    return static_cast<std::size_t>(s.transition.rows());
                else
                    return s.count;
            },
            v_);
    }

    bool needs_residuals() const noexcept { return kind() == SamplerKind::greedy; }

private:
    explicit SamplerSpec(Variant v) : v_(std::move(v)) {}

    static std::size_t check(std::size_t count)
    {
        if (count < 1) throw std::invalid_argument("sampler: index count must be >= 1");
        return count;
    }

    Variant v_;
};

/// Marginal law of w_n used for the expected objective: uniform for iid and
/// perm, the stationary law for markov, none for greedy (state dependent).
inline std::optional<Eigen::VectorXd> marginal_distribution(const SamplerSpec& spec)
{
    const auto n = static_cast<Eigen::Index>(spec.count());
    switch (spec.kind()) {
    case SamplerKind::iid:
    case SamplerKind::perm: return Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    case SamplerKind::markov:
        return stationary_distribution(std::get<SamplerSpec::MarkovChain>(spec.variant()).transition);
    case SamplerKind::greedy: return std::nullopt;
    }
    return std::nullopt;
}

/// Mutable sampling state; one per run.
class Sampler
{
public:
    Sampler(SamplerSpec spec, std::uint64_t seed) : spec_(std::move(spec)), rng_(seed)
    {
        if (spec_.kind() == SamplerKind::perm) {
            perm_.resize(spec_.count());
            std::iota(perm_.begin(), perm_.end(), std::size_t{0});
            cursor_ = perm_.size();
        }
    }

    const SamplerSpec& spec() const noexcept { return spec_; }

    /// Next index in [0, I). `residuals` is required by the greedy rule and
    /// ignored otherwise; when supplied it must have length I.
    std::size_t next(std::span<const double> residuals = {})
    {
        const std::size_t I = spec_.count();
        if (!residuals.empty() && residuals.size() != I)
            throw std::invalid_argument("Sampler::next: residual list length " +
                                        std::to_string(residuals.size()) + " != " + std::to_string(I));
        switch (spec_.kind()) {
        case SamplerKind::iid: return static_cast<std::size_t>(rng_.below(I));
        case SamplerKind::greedy: {
            if (residuals.empty()) throw std::invalid_argument("greedy sampler requires residuals");
            std::size_t best = 0;
            double best_sq = residuals[0] * residuals[0];
            for (std::size_t i = 1; i < I; ++i) {
                const double sq = residuals[i] * residuals[i];
                if (sq > best_sq) {
                    best = i;
                    best_sq = sq;
                }
            }
            return best;
        }
        case SamplerKind::perm: {
            if (cursor_ == perm_.size()) {
                reshuffle();
                cursor_ = 0;
            }
            return perm_[cursor_++];
        }
        case SamplerKind::markov: {
            const auto& P = std::get<SamplerSpec::MarkovChain>(spec_.variant()).transition;
            const double u = rng_.uniform01();
            const auto row = static_cast<Eigen::Index>(current_);
            double acc = 0.0;
            std::size_t nxt = I - 1;
            for (std::size_t j = 0; j < I; ++j) {
                acc += P(row, static_cast<Eigen::Index>(j));
                if (u < acc) {
                    nxt = j;
                    break;
                }
            }
            current_ = nxt;
            return nxt;
        }
        }
        throw std::logic_error("Sampler::next: unknown kind");
    }

private:
    void reshuffle()
    {
        for (std::size_t i = perm_.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(rng_.below(i));
            std::swap(perm_[i - 1], perm_[j]);
        }
    }

    SamplerSpec spec_;
    Rng rng_;
    std::vector<std::size_t> perm_;
    std::size_t cursor_ = 0;
    std::size_t current_ = 0;
};

} // namespace fixopt
