#include <gtest/gtest.h>

#include <cmath>

#include "conefix/cone.hpp"

using namespace conefix;

namespace {

ConeSpec orthant2() { return ConeSpec::orthant(2); }

}  // namespace

TEST(ConeMembership, OrthantBoundaryIsClosedMember) {
  EXPECT_TRUE(cone_membership(orthant2(), VectorE{1.0, 0.0}, Membership::closed));
}

TEST(ConeMembership, OrthantBoundaryIsNotInterior) {
  EXPECT_FALSE(cone_membership(orthant2(), VectorE{1.0, 0.0}, Membership::interior));
}

TEST(ConeMembership, NegativeCoordinateIsOutside) {
  EXPECT_FALSE(cone_membership(orthant2(), VectorE{-1.0, 2.0}, Membership::closed));
}

TEST(ConeMembership, ZeroIsClosedButNotInterior) {
  EXPECT_TRUE(cone_membership(orthant2(), VectorE{0.0, 0.0}));
  EXPECT_FALSE(cone_membership(orthant2(), VectorE{0.0, 0.0}, Membership::interior));
}

TEST(ConeMembership, OrthantSignTestHasNoSlack) {
  EXPECT_FALSE(cone_membership(orthant2(), VectorE{1.0, -1e-300}));
}

TEST(ConeMembership, InteriorMarginIsRelative) {
  auto cone = orthant2();
  cone.with_margin(1e-3);
  EXPECT_FALSE(cone_membership(cone, VectorE{1.0, 1e-4}, Membership::interior));
  EXPECT_TRUE(cone_membership(cone, VectorE{1.0, 1e-2}, Membership::interior));
}

TEST(ConeMembership, DimensionMismatchIsConfigError) {
  EXPECT_THROW(cone_membership(orthant2(), VectorE{1.0, 2.0, 3.0}), ConfigError);
}

TEST(ConeMembership, NonFiniteCoordinatesAreRejected) {
  EXPECT_THROW(VectorE({1.0, std::nan("")}), DomainError);
  EXPECT_THROW(VectorE({INFINITY, 0.0}), DomainError);
}

TEST(ConeMembership, PolyhedralToleratesRoundingOnly) {
  const auto cone = ConeSpec::from_rays_2d(VectorE{1.0, 0.0}, VectorE{1.0, 1.0});
  EXPECT_TRUE(cone_membership(cone, VectorE{1.0, 0.5}));
  EXPECT_TRUE(cone_membership(cone, VectorE{1.0, 1.0}));
  EXPECT_FALSE(cone_membership(cone, VectorE{1.0, 1.01}));
  EXPECT_FALSE(cone_membership(cone, VectorE{1.0, -0.01}));
}

TEST(ConeMembership, ScaledOrthantFollowsWeightSigns) {
  const auto cone = ConeSpec::scaled_orthant({2.0, 0.5});
  EXPECT_TRUE(cone_membership(cone, VectorE{3.0, 0.0}));
  EXPECT_FALSE(cone_membership(cone, VectorE{3.0, -1.0}));
}

TEST(OrderCompare, StrictlyPositiveDifferenceIsLL) {
  EXPECT_EQ(order_compare(orthant2(), VectorE{0.0, 0.0}, VectorE{1.0, 2.0}), Relation::ll);
}

TEST(OrderCompare, IdenticalVectorsAreEQ) {
  EXPECT_EQ(order_compare(orthant2(), VectorE{1.0, 1.0}, VectorE{1.0, 1.0}), Relation::eq);
}

TEST(OrderCompare, CrossedVectorsAreIncomparable) {
  EXPECT_EQ(order_compare(orthant2(), VectorE{1.0, 0.0}, VectorE{0.0, 1.0}), Relation::incomparable);
}

TEST(OrderCompare, FaceDifferenceIsLTNotLL) {
  EXPECT_EQ(order_compare(orthant2(), VectorE{0.0, 0.0}, VectorE{1.0, 0.0}), Relation::lt);
  EXPECT_EQ(order_compare(orthant2(), VectorE{1.0, 0.0}, VectorE{0.0, 0.0}), Relation::gt);
  EXPECT_EQ(order_compare(orthant2(), VectorE{3.0, 3.0}, VectorE{1.0, 2.0}), Relation::gg);
}

TEST(ConeAxioms, OrthantPasses) {
  const auto report = verify_cone_axioms(orthant2(), SamplingPlan{7, 100});
  EXPECT_TRUE(report.passed());
  EXPECT_EQ(report.violations.size(), 0u);
}

TEST(ConeAxioms, HalfPlaneIsNotPointed) {
  const auto cone = ConeSpec::polyhedral(2, {{1.0, 0.0}});
  const auto report = verify_cone_axioms(cone, SamplingPlan{1, 100});
  ASSERT_GT(report.count("P3"), 0u);
  bool found_axis = false;
  for (const auto& v : report.violations)
    if (v.axiom == "P3" && v.witness.front() == std::vector<double>{0.0, 1.0}) found_axis = true;
  EXPECT_TRUE(found_axis);
}

TEST(ConeAxioms, CollapsedWeightHasEmptyInterior) {
  const auto cone = ConeSpec::scaled_orthant({1.0, 0.0});
  const auto report = verify_cone_axioms(cone, SamplingPlan{1, 100});
  EXPECT_EQ(report.count("interior"), 1u);
  EXPECT_FALSE(report.passed());
}

TEST(ConeAxioms, PolyhedralAcuteConePasses) {
  const auto cone = ConeSpec::from_rays_2d(VectorE{1.0, 0.0}, VectorE{1.0, 1.0});
  EXPECT_TRUE(verify_cone_axioms(cone, SamplingPlan{3, 2000}).passed());
}

TEST(ConeConfig, PolyhedralRowOfWrongDimensionIsReported) {
  try {
    ConeSpec::polyhedral(2, {{1.0, 0.0}, {1.0, 2.0, 3.0}, {0.0}});
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.problems().size(), 2u);
  }
}

TEST(NormalConstant, OrthantMaxNormIsOne) {
  const auto est = estimate_normal_constant(ConeSpec::orthant(2, NormKind::max), SamplingPlan{1, 100000});
  EXPECT_FALSE(est.inconclusive);
  EXPECT_EQ(est.value, 1.0);
}

TEST(NormalConstant, OrthantEuclideanIsOne) {
  const auto est = estimate_normal_constant(ConeSpec::orthant(2, NormKind::euclidean), SamplingPlan{1, 100000});
  EXPECT_NEAR(est.value, 1.0, 1e-9);
}

TEST(NormalConstant, AcuteRayConeIsOne) {
  // Rays (1,0) and (1,1) meet at 45 degrees; both norms are monotone on it.
  for (NormKind k : {NormKind::euclidean, NormKind::max}) {
    const auto cone = ConeSpec::from_rays_2d(VectorE{1.0, 0.0}, VectorE{1.0, 1.0}, k);
    EXPECT_NEAR(estimate_normal_constant(cone, SamplingPlan{1, 100000}).value, 1.0, 1e-9);
  }
}

TEST(NormalConstant, ObtuseRayConeExceedsOne) {
  // Regression pin: the true constant for rays (1,0), (-1,1) is sqrt(2).
  const auto cone = ConeSpec::from_rays_2d(VectorE{1.0, 0.0}, VectorE{-1.0, 1.0});
  const double k = estimate_normal_constant(cone, SamplingPlan{1, 100000}).value;
  EXPECT_GT(k, 1.05);
  EXPECT_LE(k, std::sqrt(2.0) + 1e-12);
}

TEST(NormalConstant, NondecreasingInSampleCount) {
  const auto cone = ConeSpec::from_rays_2d(VectorE{1.0, 0.0}, VectorE{-1.0, 1.0});
  double prev = 0.0;
  for (std::size_t n : {1, 10, 100, 1000, 10000}) {
    const double k = estimate_normal_constant(cone, SamplingPlan{5, n}).value;
    EXPECT_GE(k, prev);
    prev = k;
  }
}

TEST(NormalConstant, ExactlyOneForEverySampleSizeOnMaxOrthant) {
  for (std::size_t n : {1, 2, 17, 500}) {
    EXPECT_EQ(estimate_normal_constant(ConeSpec::orthant(3), SamplingPlan{11, n}).value, 1.0);
  }
}
