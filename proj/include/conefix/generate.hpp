#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "conefix/contractions.hpp"
#include "conefix/finite.hpp"
#include "conefix/instances.hpp"
#include "conefix/numeric.hpp"

namespace conefix {

struct GeneratorOptions {
  std::size_t min_points = 5;
  std::size_t max_points = 20;
  std::size_t spec_draws = 4;  // constant draws tried per generated map
};

/// A random finite instance with a dyadic metric:
///  - on a line, d(p,q) = |p - q| u with u in the open orthant, or
///  - on an integer grid in the plane, d(p,q) = (|p1 - q1|, |p2 - q2|),
/// always over the orthant in R^2. T is a random permutation. S is
/// S = T^-1 g T where g pulls points toward a chosen target, so the class
/// conditions, which only see T-images, are conditions on g.
inline FiniteInstance random_finite_instance(Rng& rng, const GeneratorOptions& options = {}) {
  const std::size_t n = options.min_points + rng.below(options.max_points - options.min_points + 1);
  const bool plane = rng.bernoulli(0.5);
  const NormKind norm = rng.bernoulli(0.5) ? NormKind::max : NormKind::euclidean;
  std::vector<Point> labels;
  std::vector<std::vector<RationalVector>> table(n);
  if (plane) {
    std::vector<Point> cells;
    for (int x = 0; x < 8; ++x)
      for (int y = 0; y < 8; ++y) cells.push_back({x / 4.0, y / 4.0});
    rng.shuffle(cells);
    labels.assign(cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        table[i].push_back(RationalVector({abs(Rational(labels[i][0]) - Rational(labels[j][0])),
                                           abs(Rational(labels[i][1]) - Rational(labels[j][1]))}));
  } else {
    std::vector<Point> cells;
    for (std::size_t k = 0; k < 4 * n; ++k) cells.push_back({static_cast<double>(k) / 8.0});
    rng.shuffle(cells);
    labels.assign(cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(n));
    static const double weights[] = {0.5, 1.0, 2.0, 4.0};
    const Rational u1(weights[rng.below(4)]);
    const Rational u2(weights[rng.below(4)]);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const Rational d = abs(Rational(labels[i][0]) - Rational(labels[j][0]));
        table[i].push_back(RationalVector({d * u1, d * u2}));
      }
  }

  std::vector<std::size_t> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = i;
  rng.shuffle(t);
  std::vector<std::size_t> t_inv(n);
  for (std::size_t i = 0; i < n; ++i) t_inv[t[i]] = i;

  auto dist = [&](std::size_t i, std::size_t j) {
    double s = 0.0;
    for (std::size_t k = 0; k < labels[i].size(); ++k) s = std::max(s, std::abs(labels[i][k] - labels[j][k]));
    return s;
  };
  const std::size_t target = rng.below(n);
  std::vector<std::size_t> g(n);
  if (rng.bernoulli(0.5)) {
    // Shrink toward the target by lambda and snap to the nearest point.
    static const double lambdas[] = {0.0, 0.25, 0.5, 0.5, 0.75};
    const double lambda = lambdas[rng.below(5)];
    for (std::size_t u = 0; u < n; ++u) {
      Point want(labels[u].size());
      for (std::size_t k = 0; k < want.size(); ++k)
        want[k] = labels[target][k] + lambda * (labels[u][k] - labels[target][k]);
      std::size_t best = target;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t v = 0; v < n; ++v) {
        double d = 0.0;
        for (std::size_t k = 0; k < want.size(); ++k) d = std::max(d, std::abs(labels[v][k] - want[k]));
        if (d < best_d || (d == best_d && dist(v, target) < dist(best, target))) {
          best = v;
          best_d = d;
        }
      }
      g[u] = best;
    }
  } else {
    // Jump to a random point at most half as far from the target.
    for (std::size_t u = 0; u < n; ++u) {
      std::vector<std::size_t> closer;
      for (std::size_t v = 0; v < n; ++v)
        if (2.0 * dist(v, target) <= dist(u, target)) closer.push_back(v);
      g[u] = closer[rng.below(closer.size())];
    }
  }
  std::vector<std::size_t> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = t_inv[g[t[i]]];
  return FiniteInstance(ConeSpec::orthant(2, norm), std::move(labels), std::move(table), std::move(t), std::move(s));
}

/// Dyadic constants drawn toward the top of each class range.
inline ClassSpec random_class_spec(ClassKind kind, Rng& rng) {
  auto high = [&](std::size_t lo, std::size_t hi) { return lo + std::max(rng.below(hi - lo + 1), rng.below(hi - lo + 1)); };
  switch (kind) {
    case ClassKind::tb: return Banach<double>{high(4, 15) / 16.0};
    case ClassKind::tk: return Kannan<double>{high(2, 15) / 32.0};
    case ClassKind::tc: return Chatterjea<double>{high(2, 15) / 32.0};
    case ClassKind::tz: return Zamfirescu<double>{high(4, 15) / 16.0, high(2, 15) / 32.0, high(2, 15) / 32.0};
    case ClassKind::tw: return Weak<double>{high(4, 15) / 16.0, high(0, 16) / 8.0};
    case ClassKind::tw_dual: return WeakDual<double>{high(4, 15) / 16.0, high(0, 16) / 8.0};
    case ClassKind::twu: return WeakUnique<double>{high(4, 15) / 16.0, high(0, 16) / 8.0};
  }
  throw ConfigError("unknown class");
}

struct GeneratedInstance {
  FiniteInstance fin;
  ClassSpec spec;
  std::size_t attempts = 0;
};

/// Rejection sampling: draws instances and constants until the class holds
/// on every pair in exact arithmetic (after a cheap double prefilter, which
/// is exact anyway on these dyadic tables). TWU draws must also make S a
/// T-weak contraction.
inline std::optional<GeneratedInstance> generate_certified(ClassKind kind, Rng& rng,
                                                           const GeneratorOptions& options = {},
                                                           std::size_t max_attempts = 100000) {
  for (std::size_t attempt = 1; attempt <= max_attempts; ++attempt) {
    FiniteInstance fin = random_finite_instance(rng, options);
    const auto pairs = fin.all_pairs();
    for (std::size_t k = 0; k < options.spec_draws; ++k) {
      const ClassSpec spec = random_class_spec(kind, rng);
      if (!check_condition(fin.approx_view(), fin.maps(), spec, pairs).holds()) continue;
      if (!exhaustive_condition_check(fin, spec).holds()) continue;
      if (kind == ClassKind::twu && !tightest_constants(fin, ClassKind::tw).feasible) continue;
      return GeneratedInstance{std::move(fin), spec, attempt};
    }
  }
  return std::nullopt;
}

/// The instance-file form of a finite instance.
inline Instance to_instance(const FiniteInstance& fin, std::string name, std::optional<ClassSpec> spec = std::nullopt) {
  Instance inst{std::move(name),
                fin.cone(),
                fin.carrier(),
                fin.metric_spec(),
                MapSpec::tabulated(fin.t_table()),
                MapSpec::tabulated(fin.s_table()),
                {},
                std::move(spec),
                {}};
  inst.run.starts = fin.labels();
  inst.run.x0 = fin.labels().front();
  return inst;
}

}  // namespace conefix
