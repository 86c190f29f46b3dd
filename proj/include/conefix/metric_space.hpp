#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "conefix/axioms.hpp"
#include "conefix/cone.hpp"
#include "conefix/errors.hpp"
#include "conefix/numeric.hpp"
#include "conefix/vector.hpp"

namespace conefix {

/// A point of the carrier M: one coordinate for intervals, k for boxes, and
/// whatever the explicit list holds for finite carriers.
using Point = std::vector<double>;

struct IntervalCarrier {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t grid = 100;
  friend bool operator==(const IntervalCarrier&, const IntervalCarrier&) = default;
};

struct BoxCarrier {
  std::vector<double> lo;
  std::vector<double> hi;
  std::size_t grid = 10;
  friend bool operator==(const BoxCarrier&, const BoxCarrier&) = default;
};

struct FiniteCarrier {
  std::vector<Point> points;
  friend bool operator==(const FiniteCarrier&, const FiniteCarrier&) = default;

  /// The labels {0}, {1}, ..., {n-1}.
  static FiniteCarrier labels(std::size_t n) {
    FiniteCarrier c;
    for (std::size_t i = 0; i < n; ++i) c.points.push_back({static_cast<double>(i)});
    return c;
  }
};

using CarrierSpec = std::variant<IntervalCarrier, BoxCarrier, FiniteCarrier>;

enum class ScalarMetric { abs, euclidean, max };

/// d(x, y) = rho(x, y) * u for a scalar metric rho and a direction u in Int P.
struct ScaledMetric {
  std::vector<double> direction;
  ScalarMetric rho = ScalarMetric::abs;
  friend bool operator==(const ScaledMetric&, const ScaledMetric&) = default;
};

/// n x n table of vectors of E, indexed by position in a finite carrier.
struct TabulatedMetric {
  std::vector<std::vector<std::vector<double>>> table;
  friend bool operator==(const TabulatedMetric&, const TabulatedMetric&) = default;
};

using MetricSpec = std::variant<ScaledMetric, TabulatedMetric>;

namespace detail {

inline std::vector<std::string> carrier_problems(const CarrierSpec& carrier) {
  std::vector<std::string> out;
  if (const auto* iv = std::get_if<IntervalCarrier>(&carrier)) {
    if (!std::isfinite(iv->lo) || !std::isfinite(iv->hi) || !(iv->lo < iv->hi))
      out.push_back("interval carrier needs finite lo < hi");
    if (iv->grid == 0) out.push_back("interval grid must be >= 1");
  } else if (const auto* box = std::get_if<BoxCarrier>(&carrier)) {
    if (box->lo.empty() || box->lo.size() != box->hi.size())
      out.push_back("box carrier needs lo and hi of equal nonzero length");
    for (std::size_t i = 0; i < std::min(box->lo.size(), box->hi.size()); ++i)
      if (!std::isfinite(box->lo[i]) || !std::isfinite(box->hi[i]) || !(box->lo[i] < box->hi[i]))
        out.push_back("box coordinate " + std::to_string(i) + " needs finite lo < hi");
    if (box->grid == 0) out.push_back("box grid must be >= 1");
  } else {
    const auto& fin = std::get<FiniteCarrier>(carrier);
    if (fin.points.empty()) out.push_back("finite carrier must be nonempty");
    for (const auto& p : fin.points) {
      if (p.size() != fin.points.front().size()) {
        out.push_back("finite carrier points must share one dimension");
        break;
      }
    }
    for (std::size_t i = 0; i < fin.points.size(); ++i)
      for (std::size_t j = i + 1; j < fin.points.size(); ++j)
        if (fin.points[i] == fin.points[j]) out.push_back("finite carrier repeats point " + std::to_string(j));
  }
  return out;
}

inline double scalar_distance(ScalarMetric rho, const Point& x, const Point& y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = std::abs(x[i] - y[i]);
    acc = rho == ScalarMetric::max || rho == ScalarMetric::abs ? std::max(acc, d) : std::hypot(acc, d);
  }
  return acc;
}

}  // namespace detail

/// Carrier set, vector-valued metric and the cone ordering the values.
class ConeMetricSpace {
 public:
  using point_type = Point;
  using scalar_type = double;
  using MetricFn = std::function<VectorE(const Point&, const Point&)>;

  ConeMetricSpace(ConeSpec cone, CarrierSpec carrier, MetricSpec metric)
      : cone_(std::move(cone)), carrier_(std::move(carrier)), metric_(std::move(metric)) {
    auto problems = detail::carrier_problems(carrier_);
    if (const auto* scaled = std::get_if<ScaledMetric>(&metric_)) {
      if (scaled->direction.size() != cone_.dimension()) {
        problems.push_back("metric direction has dimension " + std::to_string(scaled->direction.size()) +
                           ", cone has " + std::to_string(cone_.dimension()));
      } else if (!cone_membership(cone_, VectorE(scaled->direction), Membership::interior)) {
        problems.push_back("metric direction must lie in the interior of the cone");
      }
      if (std::holds_alternative<IntervalCarrier>(carrier_) && scaled->rho != ScalarMetric::abs)
        problems.push_back("interval carriers use rho = abs");
    } else {
      const auto& tab = std::get<TabulatedMetric>(metric_);
      const auto* fin = std::get_if<FiniteCarrier>(&carrier_);
      if (fin == nullptr) {
        problems.push_back("tabulated metric requires a finite carrier");
      } else if (tab.table.size() != fin->points.size()) {
        problems.push_back("metric table has " + std::to_string(tab.table.size()) + " rows for " +
                           std::to_string(fin->points.size()) + " points");
      } else {
        for (std::size_t i = 0; i < tab.table.size(); ++i) {
          if (tab.table[i].size() != tab.table.size()) {
            problems.push_back("metric table row " + std::to_string(i) + " has wrong length");
            continue;
          }
          for (const auto& v : tab.table[i]) {
            if (v.size() != cone_.dimension()) {
              problems.push_back("metric table row " + std::to_string(i) + " has entries of wrong dimension");
              break;
            }
          }
        }
      }
    }
    if (!problems.empty()) throw ConfigError(std::move(problems));
  }

  /// Arbitrary metric callable; used for deliberately broken metrics in tests.
  ConeMetricSpace(ConeSpec cone, CarrierSpec carrier, MetricFn metric)
      : cone_(std::move(cone)), carrier_(std::move(carrier)), custom_(std::move(metric)) {
    auto problems = detail::carrier_problems(carrier_);
    if (!problems.empty()) throw ConfigError(std::move(problems));
  }

  const ConeSpec& cone() const noexcept { return cone_; }
  const CarrierSpec& carrier() const noexcept { return carrier_; }
  const MetricSpec& metric() const noexcept { return metric_; }
  bool is_finite() const noexcept { return std::holds_alternative<FiniteCarrier>(carrier_); }

  std::size_t point_dimension() const {
    if (std::holds_alternative<IntervalCarrier>(carrier_)) return 1;
    if (const auto* box = std::get_if<BoxCarrier>(&carrier_)) return box->lo.size();
    return std::get<FiniteCarrier>(carrier_).points.front().size();
  }

  bool contains(const Point& p) const {
    if (const auto* iv = std::get_if<IntervalCarrier>(&carrier_))
      return p.size() == 1 && std::isfinite(p[0]) && p[0] >= iv->lo && p[0] <= iv->hi;
    if (const auto* box = std::get_if<BoxCarrier>(&carrier_)) {
      if (p.size() != box->lo.size()) return false;
      for (std::size_t i = 0; i < p.size(); ++i)
        if (!std::isfinite(p[i]) || p[i] < box->lo[i] || p[i] > box->hi[i]) return false;
      return true;
    }
    return index_of(p).has_value();
  }

  std::optional<std::size_t> index_of(const Point& p) const {
    const auto* fin = std::get_if<FiniteCarrier>(&carrier_);
    if (fin == nullptr) return std::nullopt;
    const auto it = std::find(fin->points.begin(), fin->points.end(), p);
    if (it == fin->points.end()) return std::nullopt;
    return static_cast<std::size_t>(it - fin->points.begin());
  }

  /// d(x, y) without a carrier check.
  VectorE distance(const Point& x, const Point& y) const {
    if (custom_) return custom_(x, y);
    if (const auto* scaled = std::get_if<ScaledMetric>(&metric_)) {
      const double r = detail::scalar_distance(scaled->rho, x, y);
      std::vector<double> out(scaled->direction.size());
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = r * scaled->direction[i];
      return VectorE(std::move(out));
    }
    const auto& tab = std::get<TabulatedMetric>(metric_).table;
    const auto i = index_of(x);
    const auto j = index_of(y);
    if (!i || !j) throw DomainError("point is not in the finite carrier");
    return VectorE(tab[*i][*j]);
  }

  /// Grid points used for sampling: grid+1 per axis, or the explicit list.
  std::vector<Point> grid_points() const {
    if (const auto* iv = std::get_if<IntervalCarrier>(&carrier_)) {
      std::vector<Point> out;
      out.reserve(iv->grid + 1);
      for (std::size_t i = 0; i <= iv->grid; ++i) out.push_back({grid_value(iv->lo, iv->hi, i, iv->grid)});
      return out;
    }
    if (const auto* box = std::get_if<BoxCarrier>(&carrier_)) {
      const std::size_t k = box->lo.size();
      std::size_t total = 1;
      for (std::size_t i = 0; i < k; ++i) {
        total *= box->grid + 1;
        if (total > 1000000) throw ConfigError("box grid too fine to enumerate");
      }
      std::vector<Point> out;
      out.reserve(total);
      for (std::size_t flat = 0; flat < total; ++flat) {
        Point p(k);
        std::size_t rest = flat;
        for (std::size_t i = 0; i < k; ++i) {
          p[i] = grid_value(box->lo[i], box->hi[i], rest % (box->grid + 1), box->grid);
          rest /= box->grid + 1;
        }
        out.push_back(std::move(p));
      }
      return out;
    }
    return std::get<FiniteCarrier>(carrier_).points;
  }

  /// Number of grid points, without materializing them.
  double grid_size() const {
    if (const auto* iv = std::get_if<IntervalCarrier>(&carrier_)) return static_cast<double>(iv->grid + 1);
    if (const auto* box = std::get_if<BoxCarrier>(&carrier_))
      return std::pow(static_cast<double>(box->grid + 1), static_cast<double>(box->lo.size()));
    return static_cast<double>(std::get<FiniteCarrier>(carrier_).points.size());
  }

  Point random_point(Rng& rng) const {
    if (const auto* iv = std::get_if<IntervalCarrier>(&carrier_))
      return {grid_value(iv->lo, iv->hi, rng.below(iv->grid + 1), iv->grid)};
    if (const auto* box = std::get_if<BoxCarrier>(&carrier_)) {
      Point p(box->lo.size());
      for (std::size_t i = 0; i < p.size(); ++i)
        p[i] = grid_value(box->lo[i], box->hi[i], rng.below(box->grid + 1), box->grid);
      return p;
    }
    const auto& pts = std::get<FiniteCarrier>(carrier_).points;
    return pts[rng.below(pts.size())];
  }

  /// Endpoints / corners / first and last listed point.
  std::vector<Point> extreme_points() const {
    if (const auto* iv = std::get_if<IntervalCarrier>(&carrier_)) return {{iv->lo}, {iv->hi}};
    if (const auto* box = std::get_if<BoxCarrier>(&carrier_)) {
      std::vector<Point> out;
      const std::size_t k = std::min<std::size_t>(box->lo.size(), 10);
      for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
        Point p = box->lo;
        for (std::size_t i = 0; i < k; ++i)
          if (mask & (std::size_t{1} << i)) p[i] = box->hi[i];
        out.push_back(std::move(p));
      }
      return out;
    }
    const auto& pts = std::get<FiniteCarrier>(carrier_).points;
    if (pts.size() == 1) return {pts.front()};
    return {pts.front(), pts.back()};
  }

 private:
  static double grid_value(double lo, double hi, std::size_t i, std::size_t grid) {
    if (i == grid) return hi;
    return lo + (hi - lo) * (static_cast<double>(i) / static_cast<double>(grid));
  }

  ConeSpec cone_;
  CarrierSpec carrier_;
  MetricSpec metric_;
  MetricFn custom_;
};

/// d(x, y) for carrier points; DomainError when either point is outside M.
inline VectorE eval_metric(const ConeMetricSpace& space, const Point& x, const Point& y) {
  if (!space.contains(x) || !space.contains(y)) throw DomainError("point outside the carrier");
  return space.distance(x, y);
}

template <class P>
using PairSet = std::vector<std::pair<P, P>>;

template <class P>
using TripleSet = std::vector<std::array<P, 3>>;

/// Ordered pairs for sampled checks: exhaustive over the grid when it fits the
/// budget (always for finite carriers), else extreme-point pairs followed by
/// seeded random grid pairs.
inline PairSet<Point> sample_pairs(const ConeMetricSpace& space, const SamplingPlan& plan) {
  PairSet<Point> out;
  const double g = space.grid_size();
  if (space.is_finite() || g * g <= static_cast<double>(plan.count)) {
    const auto pts = space.grid_points();
    out.reserve(pts.size() * pts.size());
    for (const auto& x : pts)
      for (const auto& y : pts) out.emplace_back(x, y);
    return out;
  }
  const auto ext = space.extreme_points();
  for (const auto& x : ext)
    for (const auto& y : ext) out.emplace_back(x, y);
  Rng rng(plan.seed);
  while (out.size() < plan.count) {
    auto x = space.random_point(rng);
    auto y = space.random_point(rng);
    out.emplace_back(std::move(x), std::move(y));
  }
  return out;
}

inline TripleSet<Point> sample_triples(const ConeMetricSpace& space, const SamplingPlan& plan) {
  TripleSet<Point> out;
  const double g = space.grid_size();
  if (space.is_finite() || g * g * g <= static_cast<double>(plan.count)) {
    const auto pts = space.grid_points();
    for (const auto& x : pts)
      for (const auto& y : pts)
        for (const auto& z : pts) out.push_back({x, y, z});
    return out;
  }
  const auto ext = space.extreme_points();
  for (const auto& x : ext)
    for (const auto& y : ext)
      for (const auto& z : ext) out.push_back({x, y, z});
  Rng rng = Rng::substream(plan.seed, 3);
  while (out.size() < plan.count) out.push_back({space.random_point(rng), space.random_point(rng), space.random_point(rng)});
  return out;
}

inline std::vector<double> witness_coords(const Point& p) { return p; }
inline std::vector<double> witness_coords(std::size_t i) { return {static_cast<double>(i)}; }

/// d1-d3 on explicit diagonal points, pairs and triples. Works for any space
/// exposing cone() and distance(); exact spaces are checked exactly.
template <class Space, class P>
AxiomReport check_metric_axioms(const Space& space, const std::vector<P>& diagonal, const PairSet<P>& pairs,
                                const TripleSet<P>& triples) {
  const ConeSpec& cone = space.cone();
  AxiomReport report;
  report.axioms_checked = {"d1", "d2", "d3"};
  for (const auto& x : diagonal) {
    const auto d = space.distance(x, x);
    ++report.sample_count;
    if (!d.is_zero()) report.violations.push_back({"d1", {witness_coords(x), witness_coords(x)}, to_double(d).coords()});
  }
  for (const auto& [x, y] : pairs) {
    const auto dxy = space.distance(x, y);
    const auto dyx = space.distance(y, x);
    ++report.sample_count;
    const bool same = x == y;
    if (!cone_membership(cone, dxy) || (same ? !dxy.is_zero() : dxy.is_zero()))
      report.violations.push_back({"d1", {witness_coords(x), witness_coords(y)}, to_double(dxy).coords()});
    if (!cone_equal(cone, dxy, dyx))
      report.violations.push_back({"d2", {witness_coords(x), witness_coords(y)}, to_double(dxy - dyx).coords()});
  }
  for (const auto& [x, y, z] : triples) {
    const auto dxy = space.distance(x, y);
    const auto via = space.distance(x, z) + space.distance(z, y);
    ++report.sample_count;
    if (!cone_leq(cone, dxy, via))
      report.violations.push_back(
          {"d3", {witness_coords(x), witness_coords(y), witness_coords(z)}, to_double(via - dxy).coords()});
  }
  return report;
}

/// Sampled d1-d3 check; exhaustive on finite carriers.
inline AxiomReport verify_metric_axioms(const ConeMetricSpace& space, const SamplingPlan& plan) {
  const auto pairs = sample_pairs(space, plan);
  const auto triples = sample_triples(space, plan);
  std::vector<Point> diagonal;
  if (space.grid_size() <= static_cast<double>(plan.count)) {
    diagonal = space.grid_points();
  } else {
    Rng rng = Rng::substream(plan.seed, 1);
    for (std::size_t i = 0; i < plan.count; ++i) diagonal.push_back(space.random_point(rng));
  }
  return check_metric_axioms(space, diagonal, pairs, triples);
}

}  // namespace conefix
