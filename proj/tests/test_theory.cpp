#include "support.hpp"

#include <gtest/gtest.h>

using namespace emlb;

TEST(Theory, RFactor) {
  EXPECT_DOUBLE_EQ(r_factor(0.5, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(r_factor(0.3, 0.7), 1.0);
  EXPECT_DOUBLE_EQ(r_factor(0.1, 0.6), 4.0);
  EXPECT_DOUBLE_EQ(r_factor(0.8, 0.8), 4.0);
  EXPECT_DOUBLE_EQ(r_factor(0.025, 0.6), 16.0);
  EXPECT_THROW(r_factor(0.0, 0.5), std::invalid_argument);
}

TEST(Theory, CStar) {
  EXPECT_NEAR(c_star(1.0), 0.02678, 1e-4);
  EXPECT_NEAR(c_star(1.0), 0.026784832628337842, 1e-15);
  EXPECT_NEAR(c_star(1e6), 0.5, 1e-5);
  EXPECT_LT(c_star(1e-6), 1e-12);
  EXPECT_THROW(c_star(0.0), std::invalid_argument);
  double prev = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double theta = std::pow(10.0, -3.0 + 6.0 * i / 999.0);
    const double c = c_star(theta);
    ASSERT_GT(c, prev);
    ASSERT_LT(c, 0.5);
    prev = c;
  }
}

TEST(Theory, DefaultTheta) {
  EXPECT_DOUBLE_EQ(default_theta(256, 0.5, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(default_theta(4, 0.1, 0.95), 0.4);
}

TEST(Theory, BoundFrozenValue) {
  // Evaluated independently at 50 significant digits:
  // scale = 8 ln(262144) / c*(1) = 3726.4819006198...
  BoundInputs in;
  in.n = 256;
  in.delta = 256;
  in.eps = 0.25;
  in.p = 0.5;
  in.q = 0.5;
  in.theta = 1.0;
  in.fairness = 0.125;
  const auto b = theorem_bound(in);
  EXPECT_NEAR(b.scale, 3726.4819006198183, 1e-8);
  EXPECT_EQ(b.phase1, 134154u);
  EXPECT_EQ(b.phase2, 201231u);
  EXPECT_EQ(b.total, 335387u);
}

TEST(Theory, BoundDecomposition) {
  Rng rng{1};
  std::uniform_real_distribution<double> unit(0.01, 0.99);
  for (int i = 0; i < 1000; ++i) {
    BoundInputs in;
    in.n = 2 + uniform_below<std::size_t>(rng, 1000);
    in.delta = 2 + static_cast<Load>(uniform_below<std::size_t>(rng, 100000));
    in.eps = 0.25 * unit(rng);
    in.p = unit(rng);
    in.q = unit(rng);
    in.fairness = unit(rng);
    const auto b = theorem_bound(in);
    ASSERT_EQ(b.total, b.phase1 + b.phase2 + 2);
    const double exact = 90.0 * b.scale + 2.0;
    // Rounding the phases separately costs at most one step.
    ASSERT_GE(static_cast<double>(b.total), exact - 1e-6);
    ASSERT_LE(static_cast<double>(b.total), exact + 2.0);
  }
}

TEST(Theory, BoundIsLinearInR) {
  BoundInputs a;
  a.n = 100;
  a.delta = 1000;
  a.p = 0.1;
  a.q = 0.6;  // r = 4
  a.fairness = 0.125;
  a.theta = 1.0;
  BoundInputs b = a;
  b.p = 0.05;  // r = 8
  const auto ba = theorem_bound(a);
  const auto bb = theorem_bound(b);
  EXPECT_NEAR(bb.scale, 2.0 * ba.scale, 1e-9 * ba.scale);
  EXPECT_NEAR(static_cast<double>(bb.total - 2), 2.0 * static_cast<double>(ba.total - 2), 2.0);
}

TEST(Theory, BoundMonotone) {
  Rng rng{2};
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  for (int i = 0; i < 500; ++i) {
    BoundInputs in;
    in.n = 2 + uniform_below<std::size_t>(rng, 500);
    in.delta = 2 + static_cast<Load>(uniform_below<std::size_t>(rng, 5000));
    in.eps = 0.2 * unit(rng);
    in.p = unit(rng);
    in.q = unit(rng);
    in.theta = 1.0;
    in.fairness = unit(rng);
    const auto base = theorem_bound(in).total;
    auto more = in;
    more.delta *= 2;
    ASSERT_GE(theorem_bound(more).total, base);
    more = in;
    more.n *= 2;
    ASSERT_GE(theorem_bound(more).total, base);
    more = in;
    more.eps /= 2;
    ASSERT_GE(theorem_bound(more).total, base);
    more = in;
    more.fairness /= 2;
    ASSERT_GE(theorem_bound(more).total, base);
    more = in;
    // Push r up by moving p away from 1-q.
    more.p = (in.p < 1 - in.q) ? in.p / 2 : std::min(1.0, in.p * 1.5);
    ASSERT_GE(theorem_bound(more).total, base);
  }
}

TEST(Theory, BoundRejectsInvalidInputs) {
  BoundInputs in;
  in.n = 10;
  in.delta = 1;
  EXPECT_THROW(theorem_bound(in), std::invalid_argument);
  in.delta = 10;
  in.eps = 0.3;
  EXPECT_THROW(theorem_bound(in), std::invalid_argument);
  in.eps = 0.25;
  in.fairness = 0.0;
  EXPECT_THROW(theorem_bound(in), std::invalid_argument);
  in.fairness = 1.0;
  in.theta = 20.0;  // exceeds n max{p, 1-q} = 5
  EXPECT_THROW(theorem_bound(in), std::invalid_argument);
  in.theta = 5.0;
  EXPECT_NO_THROW(theorem_bound(in));
}

TEST(Theory, LowSideExamples) {
  EXPECT_EQ(low_side_count_ok(TokenConfig({3, 3, 3})), LowSideCheck::holds);
  EXPECT_EQ(low_side_count_ok(TokenConfig({1, 1, 4})), LowSideCheck::holds);
  EXPECT_EQ(low_side_count_ok(TokenConfig({0, 0, 6})), LowSideCheck::hypothesis_not_met);
}

TEST(Theory, NearBalancedExamples) {
  for (std::size_t n = 1; n <= 7; ++n) {
    for (Load k = 0; k <= 30; ++k) {
      EXPECT_TRUE(near_balanced(nearest_int(k, static_cast<Load>(n)), k, n));
    }
  }
  for (std::size_t n = 3; n <= 8; ++n) {
    EXPECT_FALSE(near_balanced(0, 2 * static_cast<Load>(n), n));
  }
  EXPECT_THROW(near_balanced(5, 4, 2), std::invalid_argument);
}

TEST(Theory, ExhaustiveLemmaOracles) {
  for (const auto& report : {verify_low_side_lemma(), verify_logic_lemma()}) {
    EXPECT_TRUE(report.passed()) << report.name << ": " << report.first_failure;
    EXPECT_GT(report.cases, 1000u);
  }
}
