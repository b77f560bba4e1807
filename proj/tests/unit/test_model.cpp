#include "hjs/assumptions.hpp"
#include "hjs/matrix.hpp"
#include "hjs/model.hpp"
#include "hjs/model_io.hpp"

#include "support/models.hpp"

#include <gtest/gtest.h>

#include <cfloat>
#include <cmath>
#include <random>

using namespace hjs;
using hjs::testing::ModelGenerator;
using hjs::testing::reference_model;

TEST(Matrix, DeterminantMatchesCofactorExpansion) {
    const Matrix a{{2.0, -1.0, 0.5}, {1.0, 3.0, 2.0}, {0.0, 4.0, -2.0}};
    const double cofactor = 2.0 * (3.0 * -2.0 - 2.0 * 4.0) - (-1.0) * (1.0 * -2.0 - 2.0 * 0.0) +
                            0.5 * (1.0 * 4.0 - 3.0 * 0.0);
    EXPECT_NEAR(determinant(a), cofactor, 1e-12);
}

TEST(Matrix, SingularDeterminantIsExactlyZero) {
    const Matrix a{{1.0, 2.0}, {1.0, 2.0}};
    EXPECT_EQ(determinant(a), 0.0);
}

TEST(Matrix, RowSumsAndNorm) {
    const Matrix a{{1.0, -2.0}, {3.0, 4.0}};
    EXPECT_EQ(row_sums(a), (std::vector<double>{-1.0, 7.0}));
    EXPECT_EQ(l1_norm(a), 10.0);
}

TEST(RateEval, AffineClippedExamples) {
    const RateFunction f = AffineClipped{0.1, 1.0, 1.0};
    EXPECT_DOUBLE_EQ(rate_eval(f, 2.0), 3.0);
    EXPECT_DOUBLE_EQ(rate_eval(f, -10.0), 0.1);
}

TEST(RateEval, SigmoidMidpointIsHalfTheMaximum) {
    EXPECT_DOUBLE_EQ(rate_eval(Sigmoid{2.0, 1.0, 0.0}, 0.0), 1.0);
}

TEST(RateEval, SigmoidTailStaysPositive) {
    EXPECT_GT(rate_eval(Sigmoid{2.0, 5.0, 0.0}, -1e6), 0.0);
    EXPECT_GE(rate_eval(Sigmoid{2.0, 5.0, 0.0}, -1e6), DBL_MIN);
    EXPECT_DOUBLE_EQ(rate_eval(Sigmoid{2.0, 5.0, 0.0}, 1e6), 2.0);
}

TEST(LipschitzConstant, FamilyExamples) {
    EXPECT_DOUBLE_EQ(lipschitz_constant(AffineClipped{0.1, 1.0, 1.0}), 1.0);
    EXPECT_DOUBLE_EQ(lipschitz_constant(ConstantRate{3.0}), 0.0);
    EXPECT_DOUBLE_EQ(lipschitz_constant(Sigmoid{2.0, 1.0, 0.0}), 0.5);
    EXPECT_DOUBLE_EQ(lipschitz_constant(AffineClipped{0.1, 1.0, -2.0}), 2.0);
}

TEST(LipschitzConstant, SigmoidBoundIsAttainedAtTheCentre) {
    // Central difference of the sigmoid at its centre approaches L k / 4.
    const Sigmoid s{3.0, 2.0, 0.7};
    const double h = 1e-6;
    const double slope = (rate_eval(s, s.center + h) - rate_eval(s, s.center - h)) / (2.0 * h);
    EXPECT_NEAR(slope, lipschitz_constant(s), 1e-8);
}

TEST(RateProperty, LipschitzBoundHoldsOnRandomPairs) {
    ModelGenerator gen(11);
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int trial = 0; trial < 200; ++trial) {
        const RateFunction f = gen.rate();
        const double gamma = lipschitz_constant(f);
        for (int k = 0; k < 500; ++k) {
            const double a = u(rng);
            const double b = u(rng);
            ASSERT_LE(std::abs(rate_eval(f, a) - rate_eval(f, b)), gamma * std::abs(a - b) + 1e-12);
        }
    }
}

TEST(RateProperty, OutputIsPositiveOnAMillionInputs) {
    const std::vector<RateFunction> families = {AffineClipped{0.1, 1.0, 1.0},
                                                AffineClipped{1e-3, -5.0, -2.0},
                                                Sigmoid{2.0, 3.0, 1.0}, ConstantRate{0.5}};
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int k = 0; k < 1'000'000; ++k) {
        const auto& f = families[static_cast<std::size_t>(k) % families.size()];
        ASSERT_GT(rate_eval(f, u(rng)), 0.0);
    }
}

TEST(Coefficients, EvaluatorsMatchFormulas) {
    EXPECT_DOUBLE_EQ(drift_eval(LinearDrift{2.0, 1.0}, 3.0), -5.0);
    EXPECT_NEAR(drift_eval(BoundedSmoothDrift{1.5, 2.0, 0.25}, 1.0), 0.25 - 1.5 * std::tanh(0.5),
                1e-15);
    EXPECT_DOUBLE_EQ(sigma_eval(SmoothBoundedDiffusion{1.0, 2.0}, 1.0), 1.5);
    EXPECT_DOUBLE_EQ(jump_eval(LinearDamping{0.5}, 4.0), -2.0);
    EXPECT_DOUBLE_EQ(jump_eval(ConstantJump{1.0}, 0.0), 1.0);
    EXPECT_NEAR(jump_eval(PowerBounded{2.0, 0.5}, 3.0), 2.0 * 3.0 / 2.0, 1e-15);
}

TEST(Coefficients, PowerBoundedRespectsItsEnvelope) {
    const PowerBounded a{1.7, 0.3};
    for (double x = -100.0; x <= 100.0; x += 0.37) {
        EXPECT_LE(std::abs(jump_eval(a, x)), 1.7 * std::pow(std::abs(x), 0.3) + 1e-12);
    }
}

TEST(Validate, AcceptsReferenceModel) {
    EXPECT_NO_THROW(validate(reference_model()));
}

TEST(Validate, NamesTheOffendingField) {
    auto m = reference_model();
    m.kernel.alpha(0, 0) = 0.0;
    try {
        validate(m);
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.field(), "kernel.alpha[0][0]");
    }
}

TEST(Validate, RejectsBadParameters) {
    auto bad_eta = reference_model();
    bad_eta.coefficients.jump = LinearDamping{2.5};
    EXPECT_THROW(validate(bad_eta), ValidationError);

    auto bad_floor = reference_model();
    bad_floor.rates[0] = AffineClipped{0.0, 1.0, 1.0};
    EXPECT_THROW(validate(bad_floor), ValidationError);

    auto bad_sigma = reference_model();
    bad_sigma.coefficients.diffusion = SmoothBoundedDiffusion{2.0, 1.0};
    EXPECT_THROW(validate(bad_sigma), ValidationError);

    auto bad_power = reference_model();
    bad_power.coefficients.jump = PowerBounded{1.0, 1.0};
    EXPECT_THROW(validate(bad_power), ValidationError);

    auto bad_state = reference_model();
    bad_state.initial.y(0, 0) = std::nan("");
    EXPECT_THROW(validate(bad_state), ValidationError);
}

TEST(Validate, DimensionMismatch) {
    auto m = hjs::testing::two_component_model();
    m.rates.pop_back();
    EXPECT_THROW(validate(m), ValidationError);
}

TEST(DegenerateColumns, RepeatedAlphaOrZeroC) {
    KernelMatrix k{Matrix{{0.1, 0.0}, {0.2, 0.3}}, Matrix{{1.0, 2.0}, {1.0, 3.0}}};
    EXPECT_EQ(degenerate_columns(k), (std::vector<std::size_t>{0, 1}));
    k.c(0, 1) = 0.5;
    k.alpha(1, 0) = 1.5;
    EXPECT_TRUE(degenerate_columns(k).empty());
}

TEST(CheckAssumptions, LinearDampingIsExponentialFrame) {
    const auto r = check_assumptions(reference_model(), 10.0, 201);
    EXPECT_EQ(r.frame, Frame::Exponential);
    ASSERT_TRUE(r.exponential);
    EXPECT_EQ(r.exponential->condition, 1);
    EXPECT_NEAR(r.exponential->d, 1.0, 1e-12);
    EXPECT_TRUE(r.sigma_bounds_ok);
    EXPECT_TRUE(r.stability_ok);
    EXPECT_NEAR(r.rho, 0.5, 1e-12);
}

TEST(CheckAssumptions, ConstantJumpUsesPowerCondition) {
    auto m = reference_model();
    m.coefficients.jump = ConstantJump{1.0};
    const auto r = check_assumptions(m, 10.0, 201);
    EXPECT_EQ(r.frame, Frame::Exponential);
    ASSERT_TRUE(r.exponential);
    EXPECT_EQ(r.exponential->condition, 2);
    EXPECT_DOUBLE_EQ(r.exponential->C, 1.0);
    EXPECT_DOUBLE_EQ(r.exponential->eta, 0.0);
}

TEST(CheckAssumptions, RepellingDriftIsNeither) {
    auto m = reference_model();
    m.coefficients.drift = LinearDrift{-1.0, 0.0};
    const auto r = check_assumptions(m, 10.0, 201);
    EXPECT_EQ(r.frame, Frame::Neither);
    ASSERT_TRUE(r.violating_point);
    EXPECT_DOUBLE_EQ(*r.violating_point, 10.0);
}

TEST(CheckAssumptions, BoundedDriftWitnessShrinksWithRadius) {
    // -x b(x) grows only linearly: every finite grid finds some d > 0, but it
    // shrinks with the radius, while the polynomial witness is radius-free.
    auto m = reference_model();
    m.coefficients.drift = BoundedSmoothDrift{2.0, 1.0, 0.0};
    m.coefficients.jump = ConstantJump{0.0};
    const auto r = check_assumptions(m, 50.0, 2001);
    EXPECT_EQ(r.frame, Frame::Exponential);
    const auto wide = check_assumptions(m, 500.0, 2001);
    ASSERT_TRUE(wide.exponential && r.exponential);
    EXPECT_LT(wide.exponential->d, r.exponential->d);
    ASSERT_TRUE(r.polynomial);
    EXPECT_GT(r.polynomial->m, 2.0);
    EXPECT_LT(r.polynomial->m, 1.0 + 2.0 * r.polynomial->gamma / (r.sigma1 * r.sigma1));
}

TEST(CheckAssumptions, RejectsBadGrid) {
    EXPECT_THROW(check_assumptions(reference_model(), 0.0, 10), std::invalid_argument);
    EXPECT_THROW(check_assumptions(reference_model(), -1.0, 10), std::invalid_argument);
    EXPECT_THROW(check_assumptions(reference_model(), 1.0, 1), std::invalid_argument);
}

TEST(CheckAssumptions, NeitherPersistsAsRadiusGrows) {
    ModelGenerator gen(3);
    for (int trial = 0; trial < 20; ++trial) {
        auto m = gen.model(1);
        m.coefficients.drift = LinearDrift{-gen.uniform(0.1, 2.0), gen.uniform(-1.0, 1.0)};
        const auto small = check_assumptions(m, 5.0, 101);
        ASSERT_EQ(small.frame, Frame::Neither);
        for (double radius : {10.0, 40.0, 200.0}) {
            EXPECT_EQ(check_assumptions(m, radius, 101).frame, Frame::Neither);
        }
    }
}

TEST(CheckAssumptions, SupercriticalKernelFailsStability) {
    auto m = reference_model();
    m.kernel.c(0, 0) = 2.0;
    const auto r = check_assumptions(m, 10.0, 101);
    EXPECT_FALSE(r.stability_ok);
    EXPECT_NEAR(r.rho, 2.0, 1e-12);
}

TEST(CheckAssumptions, ZeroSigmaFailsEllipticity) {
    auto m = reference_model();
    m.coefficients.diffusion = ConstantDiffusion{0.0};
    const auto r = check_assumptions(m, 10.0, 101);
    EXPECT_FALSE(r.sigma_bounds_ok);
}

TEST(ModelJson, RoundTrip) {
    ModelGenerator gen(17);
    for (std::size_t m = 0; m < 4; ++m) {
        const auto spec = gen.model(m);
        EXPECT_EQ(model_from_json(model_to_json(spec)), spec);
    }
}

TEST(ModelJson, FlatRowMajorMatrices) {
    const auto j = Json::parse(R"({
        "M": 2,
        "rates": [{"type": "constant", "level": 1}, {"type": "sigmoid", "max": 2, "steepness": 1}],
        "kernel": {"c": [0.1, 0.2, 0.3, 0.4], "alpha": [1, 2, 3, 4]},
        "coefficients": {"drift": {"type": "linear", "beta": 1},
                         "diffusion": {"type": "constant", "s": 1}},
        "initial": {"x": 0.5, "y": [1, 0, 0, 1]}})");
    const auto m = model_from_json(j);
    EXPECT_EQ(m.kernel.c(0, 1), 0.2);
    EXPECT_EQ(m.kernel.alpha(1, 0), 3.0);
    EXPECT_EQ(m.initial.y(1, 1), 1.0);
    EXPECT_EQ(m.coefficients.jump, JumpMap{ConstantJump{0.0}});
}

TEST(ModelJson, DimensionMismatchNamesRates) {
    auto j = model_to_json(hjs::testing::two_component_model());
    j["rates"].erase(1);
    try {
        model_from_json(j);
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.field(), "rates");
    }
}

TEST(ModelJson, UnknownTypeAndMissingKey) {
    auto j = model_to_json(reference_model());
    j["rates"][0]["type"] = "cubic";
    EXPECT_THROW(model_from_json(j), ValidationError);
    auto k = model_to_json(reference_model());
    k["coefficients"].erase("drift");
    try {
        model_from_json(k);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.field(), "coefficients.drift");
    }
}

TEST(ModelJson, DigestIsStableAndSensitive) {
    const auto a = reference_model();
    auto b = a;
    EXPECT_EQ(model_digest(a), model_digest(b));
    EXPECT_EQ(model_digest(a).size(), 64u);
    b.kernel.c(0, 0) = std::nextafter(0.5, 1.0);
    EXPECT_NE(model_digest(a), model_digest(b));
}

TEST(Sha256, KnownAnswer) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
