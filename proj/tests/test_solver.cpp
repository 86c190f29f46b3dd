#include <gtest/gtest.h>

#include <cmath>

#include "conefix/instances.hpp"
#include "conefix/solver.hpp"

using namespace conefix;

namespace {

struct Setup {
  ConeMetricSpace space;
  MapPair maps;
};

Setup setup(const Instance& inst) { return {make_space(inst), make_maps(inst)}; }

StoppingRule rule(double eps = 1e-12, std::size_t max_iter = 1000000) { return {eps, max_iter, 50}; }

Instance two_cycle() {
  Instance inst = instances::d();
  inst.carrier = FiniteCarrier::labels(3);
  inst.metric = instances::line_table(3);
  inst.s_map = MapSpec::tabulated({1, 0, 2});
  return inst;
}

}  // namespace

TEST(Picard, InstanceAFirstRows) {
  const auto [space, maps] = setup(instances::a());
  const auto trace = picard_iterate(space, maps, Point{1.0}, rule(1e-12, 3));
  ASSERT_EQ(trace.rows(), 4u);
  const double xs[] = {1.0, 0.5, 0.25, 0.125};
  for (std::size_t n = 0; n < 4; ++n) {
    EXPECT_EQ(trace.x_sequence[n], Point{xs[n]});
    EXPECT_EQ(trace.t_image_gaps[n], (VectorE{xs[n] / 2, xs[n]}));
    EXPECT_EQ(trace.gap_norms[n], xs[n]);
  }
  EXPECT_EQ(trace.stop_reason, StopReason::max_iter);
  EXPECT_EQ(trace.final_image, Point{0.0625});
}

TEST(Picard, InstanceAConvergesIn41Rows) {
  const auto [space, maps] = setup(instances::a());
  const auto trace = picard_iterate(space, maps, Point{1.0}, rule());
  EXPECT_TRUE(trace.converged());
  EXPECT_EQ(trace.rows(), 41u);
  EXPECT_EQ(trace.iterations, 41u);
  for (std::size_t n = 0; n < trace.rows(); ++n) EXPECT_EQ(trace.gap_norms[n], std::ldexp(1.0, -static_cast<int>(n)));
}

TEST(Picard, IdentityStopsAfterOneApplication) {
  const auto [space, maps] = setup(instances::c());
  const auto trace = picard_iterate(space, maps, Point{0.7}, rule());
  EXPECT_TRUE(trace.converged());
  EXPECT_EQ(trace.iterations, 1u);
  EXPECT_EQ(trace.x_sequence.back(), Point{0.7});
  EXPECT_EQ(trace.gap_norms.front(), 0.0);
}

TEST(Picard, InstanceBClosedForm) {
  const auto [space, maps] = setup(instances::b());
  const auto trace = picard_iterate(space, maps, Point{1.0}, rule());
  ASSERT_TRUE(trace.converged());
  for (std::size_t n = 0; n < trace.rows(); ++n) {
    EXPECT_EQ(trace.x_sequence[n][0], std::ldexp(1.0, -2 * static_cast<int>(n)));
    EXPECT_EQ(trace.t_images[n][0], std::ldexp(1.0, -6 * static_cast<int>(n)));
  }
  for (std::size_t n = 0; n + 1 < trace.rows(); ++n)
    EXPECT_NEAR(trace.gap_norms[n + 1] / trace.gap_norms[n], 1.0 / 64.0, 1e-12);
  EXPECT_NEAR(measured_rate(trace), 1.0 / 64.0, 1e-12);
}

TEST(Picard, CycleIsDetected) {
  const auto [space, maps] = setup(two_cycle());
  const auto trace = picard_iterate(space, maps, Point{0.0}, rule());
  EXPECT_EQ(trace.stop_reason, StopReason::cycle_detected);
  EXPECT_EQ(trace.rows(), 2u);
}

TEST(Picard, LeavingTheCarrierIsDomainError) {
  auto inst = instances::a();
  inst.s_map = MapSpec::affine(2.0);
  const auto [space, maps] = setup(inst);
  EXPECT_THROW(picard_iterate(space, maps, Point{1.0}, rule()), DomainError);
  EXPECT_THROW(picard_iterate(space, maps, Point{1.5}, rule()), DomainError);
}

TEST(Picard, InvalidRuleIsConfigError) {
  const auto [space, maps] = setup(instances::a());
  EXPECT_THROW(picard_iterate(space, maps, Point{1.0}, rule(0.0)), ConfigError);
  EXPECT_THROW(picard_iterate(space, maps, Point{1.0}, rule(1e-12, 0)), ConfigError);
}

TEST(Picard, FiniteViewAgreesWithContinuousSpace) {
  const auto inst = instances::d();
  const auto [space, maps] = setup(inst);
  const auto fin = make_finite(inst);
  const auto a = picard_iterate(space, maps, Point{9.0}, rule());
  const auto b = picard_iterate(fin.approx_view(), fin.maps(), std::size_t{9}, rule());
  ASSERT_EQ(a.rows(), b.rows());
  for (std::size_t n = 0; n < a.rows(); ++n) {
    EXPECT_EQ(a.x_sequence[n], fin.labels()[b.x_sequence[n]]);
    EXPECT_EQ(a.gap_norms[n], b.gap_norms[n]);
  }
}

TEST(Decay, InstanceAPassesAtHalf) {
  const auto [space, maps] = setup(instances::a());
  const auto trace = picard_iterate(space, maps, Point{1.0}, rule());
  const auto report = geometric_decay_check(space, trace, 0.5, 1.0);
  EXPECT_TRUE(report.passed());
  EXPECT_EQ(report.cauchy_pairs_checked, 41u * 40u / 2u);
}

TEST(Decay, InstanceAFailsBelowItsRate) {
  const auto [space, maps] = setup(instances::a());
  const auto trace = picard_iterate(space, maps, Point{1.0}, rule());
  const auto report = geometric_decay_check(space, trace, 0.4, 1.0);
  EXPECT_FALSE(report.per_step_ok);
  EXPECT_EQ(report.first_step_failure, 1u);
}

TEST(Decay, ZeroGapsPassTrivially) {
  const auto [space, maps] = setup(instances::c());
  const auto trace = picard_iterate(space, maps, Point{0.7}, rule());
  EXPECT_TRUE(geometric_decay_check(space, trace, 0.5, 1.0).passed());
  EXPECT_TRUE(geometric_decay_check(space, trace, 0.0, 1.0).passed());
}

TEST(Decay, ArgumentsAreValidated) {
  const auto [space, maps] = setup(instances::a());
  const auto trace = picard_iterate(space, maps, Point{1.0}, rule());
  EXPECT_THROW(geometric_decay_check(space, trace, 1.0, 1.0), ConfigError);
  EXPECT_THROW(geometric_decay_check(space, trace, -0.1, 1.0), ConfigError);
  EXPECT_THROW(geometric_decay_check(space, trace, 0.5, 0.5), ConfigError);
  EXPECT_THROW(geometric_decay_check(space, IterationTrace<Point>{}, 0.5, 1.0), ConfigError);
}

TEST(Decay, SampledPairsAreReproducible) {
  const auto [space, maps] = setup(instances::a());
  const auto trace = picard_iterate(space, maps, Point{1.0}, rule());
  const auto r1 = geometric_decay_check(space, trace, 0.5, 1.0, 1e-9, 100, 3);
  const auto r2 = geometric_decay_check(space, trace, 0.5, 1.0, 1e-9, 100, 3);
  EXPECT_EQ(r1.cauchy_pairs_checked, r2.cauchy_pairs_checked);
  EXPECT_LE(r1.cauchy_pairs_checked, 100u);
  EXPECT_TRUE(r1.passed());
}

TEST(Certify, OriginIsTheFixedPointOfA) {
  const auto [space, maps] = setup(instances::a());
  EXPECT_TRUE(certify_fixed_point(space, maps, Point{0.0}, 1e-12).certified);
  const auto off = certify_fixed_point(space, maps, Point{0.01}, 1e-12);
  EXPECT_FALSE(off.certified);
  EXPECT_DOUBLE_EQ(off.residual_norm, 0.01);
  EXPECT_THROW(certify_fixed_point(space, maps, Point{2.0}, 1e-12), DomainError);
}

TEST(Certify, EveryPointIsFixedUnderIdentity) {
  const auto [space, maps] = setup(instances::c());
  for (double z : {0.0, 0.123, 0.5, 1.0}) EXPECT_TRUE(certify_fixed_point(space, maps, Point{z}, 1e-12).certified);
}

TEST(Uniqueness, InstanceAIsUnique) {
  const auto inst = instances::a();
  const auto [space, maps] = setup(inst);
  const auto r = uniqueness_probe(space, maps, inst.run.starts, rule());
  EXPECT_EQ(r.verdict, Uniqueness::unique);
  ASSERT_TRUE(r.fixed_point.has_value());
  EXPECT_EQ(*r.fixed_point, Point{0.0});
  EXPECT_EQ(r.runs.size(), 3u);
}

TEST(Uniqueness, IdentityIsNotUnique) {
  const auto inst = instances::c();
  const auto [space, maps] = setup(inst);
  const auto r = uniqueness_probe(space, maps, inst.run.starts, rule());
  EXPECT_EQ(r.verdict, Uniqueness::non_unique);
  ASSERT_EQ(r.witnesses.size(), 2u);
  EXPECT_EQ(r.witnesses[0], Point{0.2});
  EXPECT_EQ(r.witnesses[1], Point{0.8});
}

TEST(Uniqueness, SingleStartCannotRefute) {
  const auto [space, maps] = setup(instances::c());
  EXPECT_EQ(uniqueness_probe(space, maps, std::vector<Point>{{0.4}}, rule()).verdict, Uniqueness::unique);
  EXPECT_THROW(uniqueness_probe(space, maps, std::vector<Point>{}, rule()), ConfigError);
}

TEST(Uniqueness, CycleLeavesVerdictUnknown) {
  const auto [space, maps] = setup(two_cycle());
  const auto r = uniqueness_probe(space, maps, std::vector<Point>{{0.0}, {2.0}}, rule());
  EXPECT_EQ(r.verdict, Uniqueness::unknown);
  EXPECT_EQ(r.runs[0].stop_reason, StopReason::cycle_detected);
}

TEST(Diagnostics, CubeIsInjectiveOnTheGrid) {
  const auto [space, maps] = setup(instances::b());
  const auto d = diagnose_T(space, maps);
  EXPECT_TRUE(d.injective);
  EXPECT_EQ(d.points_checked, 1001u);
  EXPECT_TRUE(d.declaration_conflicts.empty());
}

TEST(Diagnostics, SquareOnSymmetricIntervalIsNotInjective) {
  auto inst = instances::a();
  inst.carrier = IntervalCarrier{-1.0, 1.0, 100};
  inst.t_map = MapSpec::power(2.0);
  inst.s_map = MapSpec::affine(0.5);
  const auto [space, maps] = setup(inst);
  const auto d = diagnose_T(space, maps);
  EXPECT_FALSE(d.injective);
  bool found = false;
  for (const auto& [x, y] : d.injectivity_violations)
    if (x == Point{-0.5} && y == Point{0.5}) found = true;
  EXPECT_TRUE(found);
  EXPECT_FALSE(d.declaration_conflicts.empty());
}

TEST(Diagnostics, IdentityAlternatingSequenceIsNotApplicable) {
  const auto [space, maps] = setup(instances::c());
  const auto d = diagnose_T(space, maps);
  for (const auto& s : d.sequences) {
    if (s.name == "alternating") {
      EXPECT_FALSE(s.t_image_converges);
      EXPECT_EQ(s.sequential, Evidence::not_applicable);
    }
    if (s.name == "convergent") {
      EXPECT_EQ(s.sequential, Evidence::consistent);
    }
  }
}

TEST(Diagnostics, ConstantTRefutesSequentialConvergence) {
  auto inst = instances::a();
  inst.t_map = MapSpec::affine(0.0, 0.5);
  inst.declared.t_injective = false;
  inst.declared.t_sequentially_convergent = true;
  const auto [space, maps] = setup(inst);
  const auto d = diagnose_T(space, maps);
  bool alternating_inconsistent = false;
  for (const auto& s : d.sequences)
    if (s.name == "alternating") alternating_inconsistent = s.sequential == Evidence::inconsistent;
  EXPECT_TRUE(alternating_inconsistent);
  EXPECT_FALSE(d.declaration_conflicts.empty());
}
