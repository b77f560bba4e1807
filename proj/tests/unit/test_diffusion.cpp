#include "hjs/diffusion.hpp"
#include "hjs/stats.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace hjs;

namespace {

CoefficientSpec ou(double beta, double offset, double s) {
    return {LinearDrift{beta, offset}, ConstantDiffusion{s}, ConstantJump{0.0}};
}

IntegratorConfig exact() {
    return {ExactOU{}, 0.01};
}

IntegratorConfig euler(double h) {
    return {EulerMaruyama{h}, 0.01};
}

struct Moments {
    double mean;
    double variance;
};

Moments sample_moments(const CoefficientSpec& c, const IntegratorConfig& cfg, double x0, double dt,
                       std::size_t n, std::uint64_t seed) {
    std::vector<double> xs(n);
    for (std::size_t k = 0; k < n; ++k) {
        RandomStream noise(mix_seed(seed, k), 1);
        xs[k] = advance_diffusion(x0, dt, c, cfg, noise);
    }
    return {stats::mean(xs), stats::variance(xs)};
}

} // namespace

TEST(AdvanceDiffusion, DeterministicOuDecay) {
    RandomStream noise(1);
    EXPECT_NEAR(advance_diffusion(1.0, 1.0, ou(1.0, 0.0, 0.0), exact(), noise), std::exp(-1.0),
                1e-15);
    EXPECT_EQ(noise.draws(), 0u);
}

TEST(AdvanceDiffusion, PureDriftWithZeroBeta) {
    RandomStream noise(1);
    EXPECT_DOUBLE_EQ(advance_diffusion(0.0, 2.5, ou(0.0, 1.0, 0.0), exact(), noise), 2.5);
}

TEST(AdvanceDiffusion, RejectsNonPositiveStep) {
    RandomStream noise(1);
    EXPECT_THROW(advance_diffusion(0.0, 0.0, ou(1.0, 0.0, 1.0), exact(), noise),
                 std::invalid_argument);
    EXPECT_THROW(advance_diffusion(0.0, -1.0, ou(1.0, 0.0, 1.0), euler(0.1), noise),
                 std::invalid_argument);
}

TEST(AdvanceDiffusion, ExactOuNeedsLinearCoefficients) {
    const CoefficientSpec nonlinear{BoundedSmoothDrift{1.0, 1.0, 0.0}, ConstantDiffusion{1.0},
                                    ConstantJump{0.0}};
    EXPECT_THROW(validate(exact(), nonlinear), ValidationError);
    EXPECT_NO_THROW(validate(euler(0.01), nonlinear));
    RandomStream noise(1);
    EXPECT_THROW(advance_diffusion(0.0, 1.0, nonlinear, exact(), noise), std::invalid_argument);
}

TEST(AdvanceDiffusion, PartialLastSubstepLandsOnTarget) {
    RandomStream noise(1);
    const double x = advance_diffusion(1.0, 1.0, ou(1.0, 0.0, 0.0), euler(0.3), noise);
    EXPECT_NEAR(x, 0.7 * 0.7 * 0.7 * 0.9, 1e-15);
}

TEST(AdvanceDiffusion, EulerDeterministicErrorIsFirstOrder) {
    std::vector<double> log_h;
    std::vector<double> log_err;
    for (double h : {1e-1, 1e-2, 1e-3}) {
        RandomStream noise(1);
        const double x = advance_diffusion(1.0, 1.0, ou(1.0, 0.0, 0.0), euler(h), noise);
        log_h.push_back(std::log(h));
        log_err.push_back(std::log(std::abs(x - std::exp(-1.0))));
    }
    EXPECT_NEAR(stats::least_squares(log_h, log_err).slope, 1.0, 0.05);
}

TEST(AdvanceDiffusion, ZeroSigmaIgnoresTheNoiseStream) {
    const CoefficientSpec c{BoundedSmoothDrift{1.0, 2.0, 0.3}, ConstantDiffusion{0.0},
                            ConstantJump{0.0}};
    RandomStream a(1);
    RandomStream b(999);
    EXPECT_EQ(advance_diffusion(2.0, 3.3, c, euler(0.01), a),
              advance_diffusion(2.0, 3.3, c, euler(0.01), b));
    EXPECT_EQ(a.draws(), 0u);
}

TEST(OuTransition, ClosedForm) {
    const auto t = ou_transition(LinearDrift{2.0, 1.0}, 0.5, 3.0, 0.7);
    const double centre = 0.5;
    EXPECT_NEAR(t.mean, centre + (3.0 - centre) * std::exp(-1.4), 1e-15);
    EXPECT_NEAR(t.variance, 0.25 * (1.0 - std::exp(-2.8)) / 4.0, 1e-15);
    const auto flat = ou_transition(LinearDrift{0.0, 1.0}, 2.0, 1.0, 0.5);
    EXPECT_DOUBLE_EQ(flat.mean, 1.5);
    EXPECT_DOUBLE_EQ(flat.variance, 2.0);
}

TEST(AdvanceDiffusion, ExactOuMatchesTransitionLaw) {
    const auto c = ou(1.5, 0.2, 0.8);
    const auto law = ou_transition(std::get<LinearDrift>(c.drift), 0.8, -1.0, 0.6);
    std::vector<double> xs(100'000);
    for (std::size_t k = 0; k < xs.size(); ++k) {
        RandomStream noise(mix_seed(5, k), 1);
        xs[k] = advance_diffusion(-1.0, 0.6, c, exact(), noise);
    }
    const double sd = std::sqrt(law.variance);
    const auto ks = stats::ks_one_sample(
        xs, [&](double x) { return 0.5 * std::erfc(-(x - law.mean) / (sd * std::sqrt(2.0))); });
    EXPECT_GT(ks.p_value, 0.01);
}

TEST(AdvanceDiffusion, ExactOuTwoStepsMatchOneStepInLaw) {
    const auto c = ou(1.0, 0.0, 1.0);
    std::vector<double> two(100'000);
    std::vector<double> one(100'000);
    for (std::size_t k = 0; k < two.size(); ++k) {
        RandomStream a(mix_seed(11, k), 1);
        two[k] = advance_diffusion(advance_diffusion(0.5, 0.3, c, exact(), a), 0.9, c, exact(), a);
        RandomStream b(mix_seed(12, k), 1);
        one[k] = advance_diffusion(0.5, 1.2, c, exact(), b);
    }
    EXPECT_GT(stats::ks_two_sample(two, one).p_value, 0.01);
}

TEST(AdvanceDiffusion, EulerWeakErrorDecaysLinearly) {
    const auto c = ou(1.0, 0.0, 1.0);
    const double x0 = 1.0;
    const double exact_mean = x0 * std::exp(-1.0);
    const double exact_var = 0.5 * (1.0 - std::exp(-2.0));
    std::vector<double> log_h;
    std::vector<double> log_mean_err;
    std::vector<double> log_var_err;
    for (double h : {0.2, 0.1, 0.05, 0.025}) {
        const auto m = sample_moments(c, euler(h), x0, 1.0, 1'000'000, 21);
        log_h.push_back(std::log(h));
        log_mean_err.push_back(std::log(std::abs(m.mean - exact_mean)));
        log_var_err.push_back(std::log(std::abs(m.variance - exact_var)));
    }
    EXPECT_NEAR(stats::least_squares(log_h, log_mean_err).slope, 1.0, 0.25);
    EXPECT_NEAR(stats::least_squares(log_h, log_var_err).slope, 1.0, 0.25);
}

TEST(ApplyXJump, Examples) {
    EXPECT_EQ(apply_x_jump(0.0, ConstantJump{1.0}), 1.0);
    EXPECT_EQ(apply_x_jump(4.0, LinearDamping{0.5}), 2.0);
    EXPECT_EQ(apply_x_jump(-3.25, ConstantJump{0.0}), -3.25);
}
