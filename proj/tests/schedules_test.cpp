#include <fixopt/schedules.hpp>

#include <gtest/gtest.h>

#include <algorithm>

using namespace fixopt;

namespace {

bool names(const std::vector<ScheduleViolation>& v, ScheduleCondition c)
{
    return std::any_of(v.begin(), v.end(), [c](const auto& e) { return e.condition == c; });
}

} // namespace

TEST(StepSchedule, Values)
{
    auto v = StepSchedule(0.25, 0.5, 1e-3, 1e-3).value(0);
    EXPECT_DOUBLE_EQ(v.alpha, 1e-3);
    EXPECT_DOUBLE_EQ(v.inner, 1e-3);

    v = StepSchedule(0.5, 0.5, 1e-3, 1e-3).value(15);
    EXPECT_DOUBLE_EQ(v.alpha, 2.5e-4);
    EXPECT_DOUBLE_EQ(v.inner, 2.5e-4);

    v = StepSchedule(0.25, 0.5).value(0);
    EXPECT_EQ(v.alpha, 1.0);
    EXPECT_EQ(v.inner, 1.0);
}

TEST(StepSchedule, RejectsBadScales)
{
    EXPECT_THROW(StepSchedule(0.25, 0.5, 0.0, 1.0), std::invalid_argument);
    EXPECT_THROW(StepSchedule(0.25, 0.5, 1.0, -1.0), std::invalid_argument);
}

TEST(StepSchedule, Validate)
{
    EXPECT_TRUE(StepSchedule(0.25, 0.5).admissible(Algorithm::gradient));
    EXPECT_TRUE(StepSchedule(0.125, 0.75).admissible(Algorithm::proximal));

    const auto v = StepSchedule(0.5, 0.25).validate(Algorithm::gradient);
    EXPECT_EQ(v.size(), 2u);
    EXPECT_TRUE(names(v, ScheduleCondition::inner_exponent));
    EXPECT_TRUE(names(v, ScheduleCondition::alpha_exponent));
}

TEST(StepSchedule, BoundaryExponentsRejected)
{
    EXPECT_FALSE(StepSchedule(0.5, 0.45).admissible(Algorithm::gradient));
    EXPECT_FALSE(StepSchedule(0.0, 0.5).admissible(Algorithm::gradient));
    EXPECT_FALSE(StepSchedule(0.25, 0.25).admissible(Algorithm::gradient));
    EXPECT_FALSE(StepSchedule(0.25, 0.75).admissible(Algorithm::gradient));
}

TEST(StepSchedule, ExponentSumForProximal)
{
    EXPECT_TRUE(StepSchedule(0.3, 0.69).admissible(Algorithm::proximal));
    const auto v = StepSchedule(0.3, 0.75).validate(Algorithm::proximal);
    EXPECT_TRUE(names(v, ScheduleCondition::exponent_sum));
    EXPECT_FALSE(names(StepSchedule(0.3, 0.75).validate(Algorithm::gradient), ScheduleCondition::exponent_sum));
}

TEST(StepSchedule, ScaleAboveOneRejected)
{
    const auto v = StepSchedule(0.25, 0.5, 2.0, 1.0).validate(Algorithm::gradient);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].condition, ScheduleCondition::alpha_scale);
    EXPECT_THROW(StepSchedule(0.25, 0.5, 1.0, 1.5).require_admissible(Algorithm::proximal),
                 std::invalid_argument);
}

TEST(StepSchedule, MonotoneDecreasingInUnitInterval)
{
    for (const auto& s : {StepSchedule(0.25, 0.5, 1e-3, 1e-3), StepSchedule(0.125, 0.75, 1.0, 1.0),
                          StepSchedule(0.49, 0.5, 0.5, 0.9)}) {
        auto prev = s.value(0);
        for (std::size_t n = 1; n <= 1'000'000; n += 1 + n / 97) {
            const auto cur = s.value(n);
            EXPECT_LE(cur.alpha, prev.alpha);
            EXPECT_LE(cur.inner, prev.inner);
            EXPECT_GT(cur.alpha, 0.0);
            EXPECT_LE(cur.inner, 1.0);
            prev = cur;
        }
    }
}

TEST(StepSchedule, AlphaOverInnerDecreasesToZero)
{
    const StepSchedule s(0.25, 0.5);
    ASSERT_TRUE(s.admissible(Algorithm::gradient));
    double prev = 2.0;
    for (std::size_t n = 0; n <= 1'000'000; n = 2 * n + 1) {
        const auto v = s.value(n);
        const double r = v.alpha / v.inner;
        EXPECT_LT(r, prev);
        prev = r;
    }
    EXPECT_LT(prev, 0.05);
}

TEST(StepSchedule, ConsecutiveRatioBoundedByTwo)
{
    for (const auto& s : {StepSchedule(0.25, 0.5), StepSchedule(0.125, 0.75), StepSchedule(0.01, 0.98)}) {
        for (std::size_t n = 0; n < 10000; ++n) {
            const auto a = s.value(n), b = s.value(n + 1);
            EXPECT_LE(a.alpha / b.alpha, 2.0);
            EXPECT_LE(a.inner / b.inner, 2.0);
        }
    }
}
