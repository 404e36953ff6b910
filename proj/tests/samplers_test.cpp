#include <fixopt/samplers.hpp>

#include <gtest/gtest.h>

#include <set>

using namespace fixopt;

namespace {

// power iteration on P^T until successive iterates agree to 1e-14
Eigen::VectorXd power_iteration_oracle(const Eigen::MatrixXd& P)
{
    Eigen::VectorXd pi = Eigen::VectorXd::Constant(P.rows(), 1.0 / static_cast<double>(P.rows()));
    for (int k = 0; k < 100000; ++k) {
        Eigen::VectorXd next = P.transpose() * pi;
        next /= next.sum();
        const double diff = (next - pi).lpNorm<Eigen::Infinity>();
        pi = next;
        if (diff < 1e-14) break;
    }
    return pi;
}

Eigen::MatrixXd mat2(double a, double b, double c, double d)
{
    Eigen::MatrixXd P(2, 2);
    P << a, b, c, d;
    return P;
}

} // namespace

TEST(StationaryDistribution, SymmetricChain)
{
    const auto pi = stationary_distribution(mat2(0.9, 0.1, 0.1, 0.9));
    EXPECT_NEAR(pi[0], 0.5, 1e-12);
    EXPECT_NEAR(pi[1], 0.5, 1e-12);
}

TEST(StationaryDistribution, TwoStateBalance)
{
    // pi_1 * 0.5 = pi_2 * 0.25, pi_1 + pi_2 = 1
    const auto pi = stationary_distribution(mat2(0.5, 0.5, 0.25, 0.75));
    EXPECT_NEAR(pi[0], 1.0 / 3.0, 1e-10);
    EXPECT_NEAR(pi[1], 2.0 / 3.0, 1e-10);
}

TEST(StationaryDistribution, MatchesPowerIteration)
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto n = 2 + seed % 9;
        const auto P = random_markov_matrix(n, seed);
        const auto pi = stationary_distribution(P);
        const auto oracle = power_iteration_oracle(P);
        EXPECT_LE((pi - oracle).lpNorm<Eigen::Infinity>(), 1e-12);
        EXPECT_LE((P.transpose() * pi - pi).lpNorm<Eigen::Infinity>(), 1e-10);
        EXPECT_NEAR(pi.sum(), 1.0, 1e-14);
        EXPECT_TRUE((pi.array() >= 0.0).all());
    }
}

TEST(StationaryDistribution, RejectsBadMatrices)
{
    EXPECT_THROW(stationary_distribution(mat2(1.0, 0.0, 0.5, 0.5)), std::invalid_argument);
    EXPECT_THROW(stationary_distribution(mat2(0.6, 0.6, 0.5, 0.5)), std::invalid_argument);
    EXPECT_THROW(stationary_distribution(Eigen::MatrixXd::Constant(2, 3, 1.0 / 3)), std::invalid_argument);
    EXPECT_THROW(SamplerSpec::markov(mat2(0.6, 0.6, 0.5, 0.5)), std::invalid_argument);
}

TEST(RandomMarkovMatrix, PositiveRowStochastic)
{
    const auto P = random_markov_matrix(6, 9);
    EXPECT_TRUE((P.array() > 0.0).all());
    for (Eigen::Index i = 0; i < 6; ++i) EXPECT_NEAR(P.row(i).sum(), 1.0, 1e-14);
    // entries lie in [0.1, 1.1) before normalization, so the ratio within a row is < 11
    for (Eigen::Index i = 0; i < 6; ++i) EXPECT_LT(P.row(i).maxCoeff() / P.row(i).minCoeff(), 11.0);
}

TEST(MarginalDistribution, PerKind)
{
    const auto u = marginal_distribution(SamplerSpec::uniform_iid(4));
    ASSERT_TRUE(u);
    for (int i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ((*u)[i], 0.25);
    EXPECT_TRUE(marginal_distribution(SamplerSpec::permutation(3)));
    EXPECT_FALSE(marginal_distribution(SamplerSpec::greedy(3)));
    const auto m = marginal_distribution(SamplerSpec::markov(mat2(0.5, 0.5, 0.5, 0.5)));
    ASSERT_TRUE(m);
    EXPECT_NEAR((*m)[0], 0.5, 1e-15);

    const auto P = random_markov_matrix(4, 77);
    const auto s = marginal_distribution(SamplerSpec::markov(P));
    EXPECT_LE((*s - power_iteration_oracle(P)).lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST(Sampler, GreedyPicksLargestResidual)
{
    Sampler s(SamplerSpec::greedy(3), 1);
    const std::vector<double> r{0.1, 0.9, 0.3};
    EXPECT_EQ(s.next(r), 1u);
    Sampler tie(SamplerSpec::greedy(2), 1);
    const std::vector<double> t{0.5, 0.5};
    EXPECT_EQ(tie.next(t), 0u);
}

TEST(Sampler, GreedyErrors)
{
    Sampler s(SamplerSpec::greedy(3), 1);
    EXPECT_THROW(s.next(), std::invalid_argument);
    const std::vector<double> r{0.1, 0.9};
    EXPECT_THROW(s.next(r), std::invalid_argument);
    Sampler iid(SamplerSpec::uniform_iid(3), 1);
    EXPECT_THROW(iid.next(r), std::invalid_argument);
}

TEST(Sampler, PermutationBlocks)
{
    for (std::size_t I : {1u, 3u, 7u}) {
        Sampler s(SamplerSpec::permutation(I), 42 + I);
        for (int block = 0; block < 50; ++block) {
            std::set<std::size_t> seen;
            for (std::size_t k = 0; k < I; ++k) seen.insert(s.next());
            EXPECT_EQ(seen.size(), I);
            EXPECT_EQ(*seen.rbegin(), I - 1);
        }
    }
}

TEST(Sampler, PermutationWindowsOfTwoICoverAll)
{
    const std::size_t I = 5;
    Sampler s(SamplerSpec::permutation(I), 3);
    std::vector<std::size_t> seq;
    for (int k = 0; k < 1000; ++k) seq.push_back(s.next());
    for (std::size_t start = 0; start + 2 * I <= seq.size(); ++start) {
        std::set<std::size_t> w(seq.begin() + static_cast<long>(start), seq.begin() + static_cast<long>(start + 2 * I));
        EXPECT_EQ(w.size(), I);
    }
}

TEST(Sampler, EmpiricalFrequenciesNearMarginal)
{
    const std::size_t I = 5;
    for (const auto& spec : {SamplerSpec::uniform_iid(I), SamplerSpec::markov(random_markov_matrix(I, 5))}) {
        Sampler s(spec, 17);
        std::vector<double> count(I, 0.0);
        const int N = 100000;
        for (int k = 0; k < N; ++k) count[s.next()] += 1.0;
        const auto m = *marginal_distribution(spec);
        for (std::size_t i = 0; i < I; ++i) {
            const double freq = count[i] / N;
            EXPECT_NEAR(freq, m[static_cast<Eigen::Index>(i)], 0.1 * m[static_cast<Eigen::Index>(i)]);
        }
    }
}

TEST(Sampler, Deterministic)
{
    for (auto kind : {SamplerKind::iid, SamplerKind::perm, SamplerKind::markov}) {
        const auto spec = SamplerSpec::make(kind, 6, 1234);
        Sampler a(spec, 99), b(spec, 99), c(spec, 100);
        bool differs = false;
        for (int k = 0; k < 200; ++k) {
            const auto x = a.next();
            EXPECT_EQ(x, b.next());
            differs |= x != c.next();
        }
        EXPECT_TRUE(differs);
    }
}

TEST(Sampler, ParseKinds)
{
    EXPECT_EQ(parse_sampler_kind("markov"), SamplerKind::markov);
    EXPECT_EQ(to_string(SamplerKind::perm), "perm");
    EXPECT_THROW(parse_sampler_kind("cyclic"), std::invalid_argument);
    EXPECT_THROW(SamplerSpec::uniform_iid(0), std::invalid_argument);
}
