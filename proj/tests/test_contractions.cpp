#include <gtest/gtest.h>

#include "conefix/contractions.hpp"
#include "conefix/finite.hpp"
#include "conefix/instances.hpp"

using namespace conefix;

namespace {

PairSet<Point> grid_pairs(const ConeMetricSpace& space) { return sample_pairs(space, SamplingPlan{1, 20000}); }

Rational q(long n, long d = 1) { return Rational(n, d); }

}  // namespace

TEST(Condition, BanachTooSmallOnInstanceA) {
  const auto inst = instances::a();
  const auto report = check_condition(make_space(inst), make_maps(inst), ClassSpec{Banach<double>{0.4}},
                                      PairSet<Point>{{{0.0}, {1.0}}});
  ASSERT_EQ(report.violations.size(), 1u);
  const auto& v = report.violations.front();
  EXPECT_EQ(v.lhs, (VectorE{0.5, 1.0}));
  EXPECT_NEAR(v.rhs[0], 0.4, 1e-15);
  EXPECT_NEAR(v.rhs[1], 0.8, 1e-15);
  EXPECT_NEAR(v.residual[0], -0.1, 1e-15);
  EXPECT_NEAR(v.residual[1], -0.2, 1e-15);
}

TEST(Condition, BanachHalfHoldsOnInstanceA) {
  const auto inst = instances::a();
  const auto space = make_space(inst);
  const auto report = check_condition(space, make_maps(inst), ClassSpec{Banach<double>{0.5}}, grid_pairs(space));
  EXPECT_TRUE(report.holds());
  EXPECT_EQ(report.pairs_checked, 101u * 101u);
}

TEST(Condition, InstanceBHoldsAtOneOver64) {
  const auto inst = instances::b();
  const auto space = make_space(inst);
  EXPECT_TRUE(check_condition(space, make_maps(inst), *inst.contraction, grid_pairs(space)).holds());
}

TEST(Condition, IdentityPairSatisfiesWeakButNotBanach) {
  const auto inst = instances::c();
  const auto space = make_space(inst);
  const auto maps = make_maps(inst);
  const auto pairs = grid_pairs(space);
  EXPECT_TRUE(check_condition(space, maps, ClassSpec{Weak<double>{0.5, 0.5}}, pairs).holds());
  EXPECT_FALSE(check_condition(space, maps, ClassSpec{Banach<double>{0.99}}, pairs).holds());
}

TEST(Condition, EmptyPairSetIsInconclusive) {
  const auto inst = instances::a();
  const auto report = check_condition(make_space(inst), make_maps(inst), ClassSpec{Banach<double>{0.5}}, PairSet<Point>{});
  EXPECT_TRUE(report.inconclusive());
  EXPECT_FALSE(report.holds());
}

TEST(Condition, OutOfRangeSpecIsRejected) {
  const auto inst = instances::a();
  EXPECT_THROW(check_condition(make_space(inst), make_maps(inst), ClassSpec{Banach<double>{1.0}}, PairSet<Point>{}),
               ConfigError);
}

TEST(Ranges, MessagesNameTheConstant) {
  EXPECT_EQ(range_errors(ClassSpec{Banach<double>{1.0}}), std::vector<std::string>{"a must be in [0,1)"});
  EXPECT_EQ(range_errors(ClassSpec{Kannan<double>{0.5}}), std::vector<std::string>{"b must be in [0,1/2)"});
  EXPECT_EQ(range_errors(ClassSpec{Chatterjea<double>{-0.1}}), std::vector<std::string>{"c must be in [0,1/2)"});
  EXPECT_EQ(range_errors(ClassSpec{Zamfirescu<double>{1.0, 0.5, 0.6}}).size(), 3u);
  EXPECT_EQ(range_errors(ClassSpec{Weak<double>{0.5, -1.0}}), std::vector<std::string>{"L must be >= 0"});
  EXPECT_TRUE(range_errors(ClassSpec{Weak<double>{0.0, 0.0}}).empty());
  EXPECT_EQ(range_errors(ClassSpec{WeakUnique<double>{0.5, INFINITY}}),
            std::vector<std::string>{"constants must be finite"});
}

TEST(Ranges, ParseClassKindRoundTrips) {
  for (auto k : {ClassKind::tb, ClassKind::tk, ClassKind::tc, ClassKind::tz, ClassKind::tw, ClassKind::tw_dual,
                 ClassKind::twu})
    EXPECT_EQ(parse_class_kind(to_string(k)), k);
  EXPECT_FALSE(parse_class_kind("tb").has_value());
}

TEST(Delta, WorkedValues) {
  EXPECT_EQ(zamfirescu_delta(q(1, 2), q(0), q(0)), q(1, 2));
  EXPECT_EQ(zamfirescu_delta(q(0), q(1, 4), q(0)), q(1, 3));
  EXPECT_EQ(zamfirescu_delta(q(0), q(0), q(1, 3)), q(1, 2));
  EXPECT_EQ(zamfirescu_delta(q(1, 2), q(1, 4), q(1, 3)), q(1, 2));
  EXPECT_EQ(zamfirescu_delta(q(1, 10), q(2, 5), q(1, 4)), q(2, 3));
  EXPECT_THROW(zamfirescu_delta(q(1), q(0), q(0)), ConfigError);
}

TEST(Delta, QuotedRateIsReportedOnly) {
  EXPECT_DOUBLE_EQ(quoted_zamfirescu_rate(0.25), 0.5);
  EXPECT_DOUBLE_EQ(quoted_zamfirescu_rate(1.0 / 3.0), 1.0 / 3.0 / (1.0 - 2.0 / 3.0));
  EXPECT_TRUE(std::isinf(quoted_zamfirescu_rate(0.5)));
}

TEST(Reduction, InstanceABanachBranch) {
  const auto inst = instances::a();
  const auto space = make_space(inst);
  const auto r = verify_zamfirescu_reduction(space, make_maps(inst), 0.5, 0.0, 0.0, grid_pairs(space));
  EXPECT_TRUE(r.applicable);
  EXPECT_EQ(r.delta, 0.5);
  EXPECT_TRUE(r.primary.holds());
  EXPECT_TRUE(r.dual.holds());
  EXPECT_EQ(r.precondition.branch_hits[0], r.precondition.pairs_checked);
}

TEST(Reduction, KannanOnlyPairStillReduces) {
  const auto fin = make_finite(instances::d_kannan());
  const auto r = verify_zamfirescu_reduction(fin.exact_view(), fin.maps(), 0.25, 0.25, 0.0, fin.all_pairs());
  ASSERT_TRUE(r.applicable);
  EXPECT_DOUBLE_EQ(r.delta, 1.0 / 3.0);
  EXPECT_TRUE(r.holds());
  EXPECT_GT(r.precondition.sole_branch_hits[1], 0u);
  // (4,5): S sends them to 0 and 1, so only the Kannan bound covers the pair.
  const auto b_only = check_condition(fin.exact_view(), fin.maps(), ClassSpec{Banach<double>{0.25}},
                                      PairSet<std::size_t>{{4, 5}});
  EXPECT_FALSE(b_only.holds());
}

TEST(Reduction, NotApplicableWhenPreconditionFails) {
  const auto fin = make_finite(instances::d());
  const auto r = verify_zamfirescu_reduction(fin.exact_view(), fin.maps(), 0.25, 0.0, 0.0, fin.all_pairs());
  EXPECT_FALSE(r.applicable);
  EXPECT_FALSE(r.holds());
  EXPECT_FALSE(r.precondition.holds());
}

TEST(Promotion, WorkedValues) {
  EXPECT_EQ(promote_to_weak(ExactClassSpec{Banach<Rational>{q(1, 2)}}), (ExactClassSpec{Weak<Rational>{q(1, 2), q(0)}}));
  EXPECT_EQ(promote_to_weak(ExactClassSpec{Kannan<Rational>{q(1, 4)}}),
            (ExactClassSpec{Weak<Rational>{q(1, 3), q(2, 3)}}));
  EXPECT_EQ(promote_to_weak(ExactClassSpec{Chatterjea<Rational>{q(1, 3)}}),
            (ExactClassSpec{Weak<Rational>{q(1, 2), q(1)}}));
  EXPECT_EQ(promote_to_weak(ExactClassSpec{Zamfirescu<Rational>{q(1, 2), q(1, 4), q(1, 3)}}),
            (ExactClassSpec{Weak<Rational>{q(1, 2), q(1)}}));
  EXPECT_EQ(promote_to_weak(ExactClassSpec{WeakDual<Rational>{q(1, 2), q(3)}}),
            (ExactClassSpec{WeakDual<Rational>{q(1, 2), q(3)}}));
  EXPECT_THROW(promote_to_weak(ExactClassSpec{WeakUnique<Rational>{q(1, 2), q(1)}}), ConfigError);
}

TEST(Promotion, ImpliedRateIsDelta) {
  EXPECT_EQ(implied_rate(Banach<double>{0.5}), 0.5);
  EXPECT_DOUBLE_EQ(*implied_rate(Kannan<double>{0.25}), 1.0 / 3.0);
  EXPECT_GE(*implied_rate(Kannan<double>{0.25}), 1.0 / 3.0);
  EXPECT_EQ(implied_rate(Weak<double>{0.5, 0.5}), 0.5);
  EXPECT_FALSE(implied_rate(WeakUnique<double>{0.5, 0.5}).has_value());
}

TEST(Fit, InstanceABanachConstant) {
  const auto inst = instances::a();
  const auto space = make_space(inst);
  const auto fit = fit_constants(space, make_maps(inst), ClassKind::tb, grid_pairs(space));
  ASSERT_EQ(fit.status, FitStatus::fitted);
  EXPECT_NEAR(std::get<Banach<double>>(*fit.spec).a, 0.5, 1e-6);
  EXPECT_EQ(fit.degenerate_pairs, 101u);
}

TEST(Fit, IdentityWithPinnedLeadingConstant) {
  const auto inst = instances::c();
  const auto space = make_space(inst);
  FitOptions opts;
  opts.pinned_leading = 0.9;
  const auto fit = fit_constants(space, make_maps(inst), ClassKind::tw, grid_pairs(space), opts);
  ASSERT_EQ(fit.status, FitStatus::fitted);
  const auto& w = std::get<Weak<double>>(*fit.spec);
  EXPECT_EQ(w.delta, 0.9);
  EXPECT_NEAR(w.L, 0.1, 1e-6);
}

TEST(Fit, ExpandingMapIsInfeasible) {
  Instance inst = instances::a();
  inst.carrier = IntervalCarrier{0.0, 0.5, 50};
  inst.s_map = MapSpec::affine(2.0);
  const auto space = make_space(inst);
  const auto maps = make_maps(inst);
  const auto pairs = PairSet<Point>{{{0.0}, {0.25}}, {{0.1}, {0.2}}};
  const auto fit = fit_constants(space, maps, ClassKind::tb, pairs);
  EXPECT_EQ(fit.status, FitStatus::infeasible);
  EXPECT_FALSE(fit.spec.has_value());
  EXPECT_FALSE(fit.witnesses.empty());
}

TEST(Fit, EmptyPairsAreInconclusive) {
  const auto inst = instances::a();
  const auto fit = fit_constants(make_space(inst), make_maps(inst), ClassKind::tk, PairSet<Point>{});
  EXPECT_EQ(fit.status, FitStatus::inconclusive);
}

TEST(Fit, ZamfirescuHasNoSingleSearch) {
  const auto inst = instances::a();
  EXPECT_THROW(fit_constants(make_space(inst), make_maps(inst), ClassKind::tz, PairSet<Point>{}), ConfigError);
}

TEST(Fit, FittedSpecPassesTheCheck) {
  const auto inst = instances::b();
  const auto space = make_space(inst);
  const auto maps = make_maps(inst);
  const auto pairs = grid_pairs(space);
  for (auto k : {ClassKind::tb, ClassKind::tk, ClassKind::tc, ClassKind::tw, ClassKind::tw_dual, ClassKind::twu}) {
    const auto fit = fit_constants(space, maps, k, pairs);
    if (fit.status != FitStatus::fitted) continue;
    EXPECT_TRUE(check_condition(space, maps, *fit.spec, pairs).holds()) << to_string(k);
  }
}
