#include "hjs/intensity.hpp"

#include "support/models.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace hjs;
using hjs::testing::ModelGenerator;

namespace {

KernelMatrix scalar_kernel(double c, double alpha) {
    return {Matrix{{c}}, Matrix{{alpha}}};
}

ModelSpec affine_pair() {
    auto m = hjs::testing::two_component_model();
    m.rates = {AffineClipped{0.1, 0.0, 1.0}, AffineClipped{0.1, 0.0, 1.0}};
    return m;
}

} // namespace

TEST(FlowY, IdentityAtZero) {
    ModelGenerator gen(1);
    const auto m = gen.model(3);
    const auto y = gen.memory(3);
    EXPECT_EQ(flow_y(m.kernel, y, 0.0), y);
}

TEST(FlowY, HalfLife) {
    const auto k = scalar_kernel(1.0, std::numbers::ln2);
    EXPECT_NEAR(flow_y(k, Matrix{{1.0}}, 1.0)(0, 0), 0.5, 1e-15);
    const auto two = flow_y(k, Matrix{{1.0}}, 2.0);
    EXPECT_NEAR(two(0, 0), 0.25, 1e-15);
    EXPECT_NEAR(flow_y(k, flow_y(k, Matrix{{1.0}}, 1.0), 1.0)(0, 0), two(0, 0), 1e-15);
}

TEST(FlowY, RejectsNegativeTime) {
    EXPECT_THROW(flow_y(scalar_kernel(1.0, 1.0), Matrix{{1.0}}, -1e-9), std::invalid_argument);
}

TEST(FlowY, SemigroupOnRandomInputs) {
    ModelGenerator gen(2);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t m = 1 + gen.index(4);
        const auto spec = gen.model(m);
        const auto y = gen.memory(m, 5.0);
        const double s = gen.uniform(0.0, 10.0);
        const double t = gen.uniform(0.0, 10.0);
        const auto lhs = flow_y(spec.kernel, flow_y(spec.kernel, y, s), t);
        const auto rhs = flow_y(spec.kernel, y, s + t);
        for (std::size_t k = 0; k < lhs.size(); ++k) {
            ASSERT_NEAR(lhs.values()[k], rhs.values()[k], 1e-12);
        }
    }
}

TEST(FlowY, L1NormDecays) {
    ModelGenerator gen(3);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t m = 1 + gen.index(4);
        const auto spec = gen.model(m);
        const auto y = gen.memory(m, 5.0);
        ASSERT_LE(l1_norm(flow_y(spec.kernel, y, gen.uniform(0.0, 100.0))), l1_norm(y));
    }
}

TEST(ApplyJump, AddsColumnFromZero) {
    const KernelMatrix k{Matrix{{0.1, 0.2}, {0.3, 0.4}}, Matrix(2, 2, 1.0)};
    const auto y = apply_jump(k, Matrix(2, 2, 0.0), 0);
    EXPECT_EQ(y, (Matrix{{0.1, 0.0}, {0.3, 0.0}}));
    const auto twice = apply_jump(k, y, 0);
    EXPECT_EQ(twice, (Matrix{{0.2, 0.0}, {0.6, 0.0}}));
}

TEST(ApplyJump, InhibitionSubtracts) {
    EXPECT_EQ(apply_jump(scalar_kernel(-1.0, 1.0), Matrix{{3.0}}, 0)(0, 0), 2.0);
}

TEST(ApplyJump, RejectsBadIndex) {
    EXPECT_THROW(apply_jump(scalar_kernel(1.0, 1.0), Matrix{{0.0}}, 1), std::out_of_range);
}

TEST(Intensities, ConstantRates) {
    auto m = hjs::testing::poisson_model({2.0, 2.0, 2.0});
    ModelGenerator gen(4);
    EXPECT_EQ(intensities(m, gen.memory(3)), (IntensityVector{2.0, 2.0, 2.0}));
    EXPECT_DOUBLE_EQ(total_rate(m, gen.memory(3)), 6.0);
}

TEST(Intensities, AffineScalar) {
    auto m = hjs::testing::reference_model();
    EXPECT_DOUBLE_EQ(intensities(m, Matrix{{0.5}})[0], 1.5);
}

TEST(Intensities, RowSums) {
    const auto m = affine_pair();
    const Matrix y{{1.0, 2.0}, {3.0, 4.0}};
    EXPECT_EQ(intensities(m, y), (IntensityVector{3.0, 7.0}));
    EXPECT_DOUBLE_EQ(total_rate(m, y), 10.0);
    EXPECT_DOUBLE_EQ(total_rate(m, y.scaled(0.0)), 0.2);
}

TEST(DominatingBound, Examples) {
    auto m = hjs::testing::reference_model();
    EXPECT_DOUBLE_EQ(dominating_bound(m, Matrix{{0.0}}), 1.0);
    EXPECT_DOUBLE_EQ(dominating_bound(m, Matrix{{-2.0}}), 3.0);
    EXPECT_DOUBLE_EQ(total_rate(m, Matrix{{-2.0}}), 0.1);
}

TEST(DominatingBound, DominatesAlongTheFlow) {
    ModelGenerator gen(5);
    for (int trial = 0; trial < 10'000; ++trial) {
        const std::size_t m = 1 + gen.index(4);
        const auto spec = gen.model(m);
        const auto y = gen.memory(m, 5.0);
        const double b = dominating_bound(spec, y);
        const auto flowed = flow_y(spec.kernel, y, gen.uniform(0.0, 100.0));
        ASSERT_LE(dominating_bound(spec, flowed), b * (1.0 + 1e-12));
        ASSERT_LE(total_rate(spec, flowed), b * (1.0 + 1e-12));
    }
}

TEST(DominatingBound, IntensitiesArePositive) {
    ModelGenerator gen(6);
    for (int trial = 0; trial < 10'000; ++trial) {
        const std::size_t m = 1 + gen.index(4);
        const auto spec = gen.model(m);
        for (double l : intensities(spec, gen.memory(m, 100.0))) {
            ASSERT_GT(l, 0.0);
        }
    }
}

TEST(RefinedBound, ExactForExcitatoryLinearModel) {
    auto m = hjs::testing::linear_hawkes_model();
    const Matrix y{{1.5}};
    ASSERT_TRUE(refined_bound(m, y));
    EXPECT_DOUBLE_EQ(*refined_bound(m, y), total_rate(m, y));
    EXPECT_LE(*refined_bound(m, y), dominating_bound(m, y));
}

TEST(RefinedBound, UnavailableForDecreasingRate) {
    auto m = hjs::testing::reference_model();
    m.rates[0] = AffineClipped{0.1, 1.0, -1.0};
    EXPECT_FALSE(refined_bound(m, Matrix{{1.0}}));
}

TEST(RefinedBound, DominatesAlongTheFlowForMonotoneRates) {
    ModelGenerator gen(7);
    for (int trial = 0; trial < 5000; ++trial) {
        const std::size_t m = 1 + gen.index(3);
        auto spec = gen.model(m);
        for (auto& f : spec.rates) {
            f = Sigmoid{gen.uniform(0.5, 2.0), gen.uniform(0.1, 2.0), gen.uniform(-1.0, 1.0)};
        }
        const auto y = gen.memory(m, 3.0);
        const auto bound = refined_bound(spec, y);
        ASSERT_TRUE(bound);
        const auto flowed = flow_y(spec.kernel, y, gen.uniform(0.0, 20.0));
        ASSERT_LE(total_rate(spec, flowed), *bound * (1.0 + 1e-12));
    }
}
