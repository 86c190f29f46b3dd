#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "conefix/axioms.hpp"
#include "conefix/errors.hpp"
#include "conefix/metric_space.hpp"

namespace conefix {

enum class MapFamily { identity, affine, power, tabulated };

/// Built-in self-map families. Affine and power act coordinatewise; tabulated
/// maps send the i-th point of a finite carrier to the table[i]-th.
struct MapSpec {
  MapFamily family = MapFamily::identity;
  double alpha = 1.0;
  double beta = 0.0;
  double exponent = 1.0;
  std::vector<std::size_t> table;

  static MapSpec identity() { return {}; }
  static MapSpec affine(double alpha, double beta = 0.0) { return {MapFamily::affine, alpha, beta, 1.0, {}}; }
  static MapSpec power(double exponent) { return {MapFamily::power, 1.0, 0.0, exponent, {}}; }
  static MapSpec tabulated(std::vector<std::size_t> table) {
    return {MapFamily::tabulated, 1.0, 0.0, 1.0, std::move(table)};
  }

  friend bool operator==(const MapSpec&, const MapSpec&) = default;
};

struct DeclaredProperties {
  bool t_continuous = true;
  bool t_injective = true;
  bool t_sequentially_convergent = false;
  bool t_subsequentially_convergent = false;
  bool s_continuous = true;
  friend bool operator==(const DeclaredProperties&, const DeclaredProperties&) = default;
};

namespace detail {

inline std::function<Point(const Point&)> make_map(const MapSpec& spec, const CarrierSpec& carrier) {
  switch (spec.family) {
    case MapFamily::identity:
      return [](const Point& x) { return x; };
    case MapFamily::affine:
      return [a = spec.alpha, b = spec.beta](const Point& x) {
        Point y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = a * x[i] + b;
        return y;
      };
    case MapFamily::power:
      return [p = spec.exponent](const Point& x) {
        Point y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
          y[i] = std::pow(x[i], p);
          if (!std::isfinite(y[i])) throw DomainError("power map undefined at " + format_double(x[i]));
        }
        return y;
      };
    case MapFamily::tabulated: {
      const auto* fin = std::get_if<FiniteCarrier>(&carrier);
      if (fin == nullptr) throw ConfigError("tabulated map requires a finite carrier");
      if (spec.table.size() != fin->points.size())
        throw ConfigError("map table has " + std::to_string(spec.table.size()) + " entries for " +
                          std::to_string(fin->points.size()) + " points");
      for (std::size_t v : spec.table)
        if (v >= fin->points.size()) throw ConfigError("map table entry " + std::to_string(v) + " out of range");
      return [points = fin->points, table = spec.table](const Point& x) {
        for (std::size_t i = 0; i < points.size(); ++i)
          if (points[i] == x) return points[table[i]];
        throw DomainError("point is not in the finite carrier");
      };
    }
  }
  throw ConfigError("unknown map family");
}

}  // namespace detail

/// The operators T and S on the carrier, plus their declared regularity.
class MapPair {
 public:
  using Fn = std::function<Point(const Point&)>;

  MapPair(Fn t, Fn s, DeclaredProperties declared = {})
      : t_(std::move(t)), s_(std::move(s)), declared_(declared) {}

  static MapPair from_specs(const MapSpec& t, const MapSpec& s, const CarrierSpec& carrier,
                            DeclaredProperties declared = {}) {
    return MapPair(detail::make_map(t, carrier), detail::make_map(s, carrier), declared);
  }

  Point T(const Point& x) const { return t_(x); }
  Point S(const Point& x) const { return s_(x); }
  const DeclaredProperties& declared() const noexcept { return declared_; }

 private:
  Fn t_;
  Fn s_;
  DeclaredProperties declared_;
};

/// Checks that T and S send sampled (finite: all) carrier points into M.
inline AxiomReport verify_maps_into_carrier(const ConeMetricSpace& space, const MapPair& maps,
                                            const SamplingPlan& plan) {
  AxiomReport report;
  report.axioms_checked = {"T-into-carrier", "S-into-carrier"};
  std::vector<Point> pts;
  if (space.grid_size() <= static_cast<double>(plan.count)) {
    pts = space.grid_points();
  } else {
    Rng rng = Rng::substream(plan.seed, 2);
    for (std::size_t i = 0; i < plan.count; ++i) pts.push_back(space.random_point(rng));
  }
  for (const auto& x : pts) {
    ++report.sample_count;
    for (const char* which : {"T", "S"}) {
      const bool is_t = which[0] == 'T';
      try {
        const Point y = is_t ? maps.T(x) : maps.S(x);
        if (!space.contains(y)) report.violations.push_back({std::string(which) + "-into-carrier", {x, y}, {}});
      } catch (const DomainError&) {
        report.violations.push_back({std::string(which) + "-into-carrier", {x}, {}});
      }
    }
  }
  return report;
}

}  // namespace conefix
