#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "conefix/cone.hpp"
#include "conefix/contractions.hpp"
#include "conefix/finite.hpp"
#include "conefix/maps.hpp"
#include "conefix/metric_space.hpp"
#include "conefix/solver.hpp"

namespace conefix {

/// Defaults for the commands run against an instance.
struct RunConfig {
  std::uint64_t seed = 1;
  std::size_t samples = 10000;
  std::optional<Point> x0;
  double epsilon = 1e-12;
  std::size_t max_iter = 1000000;
  std::size_t stall_window = 50;
  std::vector<Point> starts;
  std::optional<ClassKind> fit_class;
  std::optional<double> fit_pinned;

  StoppingRule stopping_rule() const { return {epsilon, max_iter, stall_window}; }
  SamplingPlan sampling_plan() const { return {seed, samples}; }
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Everything an instance file describes.
struct Instance {
  std::string name;
  ConeSpec cone;
  CarrierSpec carrier;
  MetricSpec metric;
  MapSpec t_map;
  MapSpec s_map;
  DeclaredProperties declared;
  std::optional<ClassSpec> contraction;
  RunConfig run;

  friend bool operator==(const Instance&, const Instance&) = default;
};

inline ConeMetricSpace make_space(const Instance& inst) { return ConeMetricSpace(inst.cone, inst.carrier, inst.metric); }

inline MapPair make_maps(const Instance& inst) {
  return MapPair::from_specs(inst.t_map, inst.s_map, inst.carrier, inst.declared);
}

/// Oracle form of an instance with a finite carrier.
inline FiniteInstance make_finite(const Instance& inst) {
  if (!std::holds_alternative<FiniteCarrier>(inst.carrier))
    throw ConfigError("the oracle needs a finite carrier");
  return FiniteInstance::tabulate(make_space(inst), make_maps(inst));
}

/// Contraction rate of the T-image gaps implied by a class: delta for the
/// weak forms and for everything promoted to one. TWU alone implies none.
inline std::optional<double> implied_rate(const ClassSpec& spec) {
  if (std::holds_alternative<WeakUnique<double>>(spec)) return std::nullopt;
  const auto weak = promote_to_weak(convert_spec<Rational>(spec));
  if (const auto* w = std::get_if<Weak<Rational>>(&weak)) return to_double_upper(w->delta);
  return to_double_upper(std::get<WeakDual<Rational>>(weak).delta);
}

namespace instances {

inline ConeSpec plane_orthant() { return ConeSpec::orthant(2, NormKind::max); }
inline ScaledMetric line_metric() { return ScaledMetric{{1.0, 2.0}, ScalarMetric::abs}; }

/// M = [0,1], T = identity, S(x) = x/2.
inline Instance a() {
  Instance inst{"A", plane_orthant(), IntervalCarrier{}, line_metric(), MapSpec::identity(), MapSpec::affine(0.5),
                {}, ClassSpec{Banach<double>{0.5}}, {}};
  inst.run.x0 = Point{1.0};
  inst.run.starts = {{0.0}, {0.3}, {1.0}};
  inst.run.fit_class = ClassKind::tb;
  return inst;
}

/// M = [0,1], T(x) = x^3, S(x) = x/4.
inline Instance b() {
  Instance inst{"B", plane_orthant(), IntervalCarrier{}, line_metric(), MapSpec::power(3.0), MapSpec::affine(0.25),
                {}, ClassSpec{Banach<double>{1.0 / 64.0}}, {}};
  inst.run.x0 = Point{1.0};
  inst.run.starts = {{0.0}, {0.5}, {1.0}};
  inst.run.fit_class = ClassKind::tb;
  return inst;
}

/// M = [0,1], T = S = identity: every point is fixed.
inline Instance c() {
  Instance inst{"C", plane_orthant(), IntervalCarrier{}, line_metric(), MapSpec::identity(), MapSpec::identity(),
                {}, ClassSpec{Weak<double>{0.5, 0.5}}, {}};
  inst.run.x0 = Point{0.7};
  inst.run.starts = {{0.2}, {0.8}};
  inst.run.fit_class = ClassKind::tw;
  inst.run.fit_pinned = 0.9;
  return inst;
}

/// d(i,j) = (|i-j|, 2|i-j|) tabulated on {0,...,n-1}.
inline TabulatedMetric line_table(std::size_t n) {
  TabulatedMetric m;
  m.table.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double d = std::abs(static_cast<double>(i) - static_cast<double>(j));
      m.table[i].push_back({d, 2.0 * d});
    }
  return m;
}

inline std::vector<std::size_t> table_of(std::size_t n, std::size_t (*f)(std::size_t)) {
  std::vector<std::size_t> t(n);
  for (std::size_t k = 0; k < n; ++k) t[k] = f(k);
  return t;
}

/// {0,...,9}, T = identity, S(k) = floor(k/2).
inline Instance d() {
  Instance inst{"D", plane_orthant(), FiniteCarrier::labels(10), line_table(10), MapSpec::identity(),
                MapSpec::tabulated(table_of(10, [](std::size_t k) { return k / 2; })), {}, std::nullopt, {}};
  inst.run.x0 = Point{9.0};
  for (std::size_t k = 0; k < 10; ++k) inst.run.starts.push_back({static_cast<double>(k)});
  inst.run.fit_class = ClassKind::tb;
  return inst;
}

/// {0,...,9}, T = identity, S sends 0..4 to 0 and 5..9 to 1. It is a
/// Zamfirescu map with (a,b,c) = (1/4, 1/4, 0) where the pair (4,5) is
/// covered only by the Kannan branch.
inline Instance d_kannan() {
  Instance inst{"D_kannan", plane_orthant(), FiniteCarrier::labels(10), line_table(10), MapSpec::identity(),
                MapSpec::tabulated(table_of(10, [](std::size_t k) -> std::size_t { return k <= 4 ? 0 : 1; })),
                {}, ClassSpec{Zamfirescu<double>{0.25, 0.25, 0.0}}, {}};
  inst.run.x0 = Point{9.0};
  for (std::size_t k = 0; k < 10; ++k) inst.run.starts.push_back({static_cast<double>(k)});
  return inst;
}

inline std::vector<Instance> all() { return {a(), b(), c(), d(), d_kannan()}; }

}  // namespace instances
}  // namespace conefix
