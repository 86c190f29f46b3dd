#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "conefix/axioms.hpp"
#include "conefix/cone.hpp"
#include "conefix/contractions.hpp"
#include "conefix/errors.hpp"
#include "conefix/maps.hpp"
#include "conefix/metric_space.hpp"
#include "conefix/numeric.hpp"

namespace conefix {

class FiniteInstance;

/// Index-based view of a finite instance; exact when Scalar is Rational.
template <class Scalar>
class FiniteView {
 public:
  using point_type = std::size_t;
  using scalar_type = Scalar;

  explicit FiniteView(const FiniteInstance& fin) : fin_(&fin) {}

  const ConeSpec& cone() const noexcept;
  bool contains(std::size_t i) const noexcept;
  const BasicVector<Scalar>& distance(std::size_t i, std::size_t j) const;

 private:
  const FiniteInstance* fin_;
};

/// T and S as index tables.
class FiniteMaps {
 public:
  FiniteMaps(const std::vector<std::size_t>& t, const std::vector<std::size_t>& s) : t_(&t), s_(&s) {}
  std::size_t T(std::size_t i) const { return (*t_)[i]; }
  std::size_t S(std::size_t i) const { return (*s_)[i]; }

 private:
  const std::vector<std::size_t>* t_;
  const std::vector<std::size_t>* s_;
};

namespace detail {

inline constexpr std::size_t max_violations_per_axiom = 64;

// Tables whose entries share a binary scale small enough for 128-bit
// integers can be checked exactly without rationals. Only the orthant
// families qualify, since their membership test is a per-coordinate sign.
__extension__ typedef __int128 Int128;
__extension__ typedef unsigned __int128 UInt128;

struct ScaledTable {
  std::vector<Int128> values;  // n * n * m
  bool ok = false;
};

inline ScaledTable scale_to_integers(const std::vector<RationalVector>& table) {
  using boost::multiprecision::cpp_int;
  ScaledTable out;
  // Every entry must be num / 2^k; bring all to the largest k.
  std::size_t k_max = 0;
  std::size_t bits_max = 0;
  for (const auto& v : table)
    for (const auto& c : v) {
      if (c == 0) continue;
      const cpp_int den = boost::multiprecision::denominator(c);
      const std::size_t k = boost::multiprecision::msb(den);
      if (boost::multiprecision::lsb(den) != k) return out;
      k_max = std::max(k_max, k);
    }
  for (const auto& v : table)
    for (const auto& c : v) {
      if (c == 0) continue;
      const cpp_int num = abs(boost::multiprecision::numerator(c));
      const std::size_t k = boost::multiprecision::msb(boost::multiprecision::denominator(c));
      bits_max = std::max(bits_max, boost::multiprecision::msb(num) + 1 + (k_max - k));
    }
  if (bits_max > 120) return out;
  for (const auto& v : table)
    for (const auto& c : v) {
      if (c == 0) {
        out.values.push_back(0);
        continue;
      }
      const cpp_int num = boost::multiprecision::numerator(c);
      const std::size_t k = boost::multiprecision::msb(boost::multiprecision::denominator(c));
      const cpp_int scaled = abs(num) << (k_max - k);
      auto x = static_cast<Int128>(static_cast<UInt128>(scaled & cpp_int(0xFFFFFFFFFFFFFFFFull)) |
                                     (static_cast<UInt128>(static_cast<std::uint64_t>(scaled >> 64)) << 64));
      out.values.push_back(num < 0 ? -x : x);
    }
  out.ok = true;
  return out;
}

inline std::vector<int> orthant_signs(const ConeSpec& cone) {
  std::vector<int> signs(cone.dimension(), 1);
  if (cone.family() == ConeFamily::scaled_orthant)
    for (std::size_t i = 0; i < signs.size(); ++i) {
      const double w = cone.weights()[i];
      signs[i] = w > 0 ? 1 : (w < 0 ? -1 : 0);
    }
  return signs;
}

}  // namespace detail

/// A finite cone metric space with T and S given as index tables. The
/// metric table is checked for d1-d3 exactly over all n^3 triples when the
/// instance is built, so downstream code may rely on it.
class FiniteInstance {
 public:
  static constexpr std::size_t max_points = 200;

  FiniteInstance(ConeSpec cone, std::vector<Point> labels, const std::vector<std::vector<VectorE>>& table,
                 std::vector<std::size_t> t_table, std::vector<std::size_t> s_table,
                 bool t_injective_declared = true)
      : FiniteInstance(std::move(cone), std::move(labels), to_exact_table(table), std::move(t_table),
                       std::move(s_table), t_injective_declared) {}

  /// Exact table; the double table is derived from it.
  FiniteInstance(ConeSpec cone, std::vector<Point> labels, std::vector<std::vector<RationalVector>> table,
                 std::vector<std::size_t> t_table, std::vector<std::size_t> s_table,
                 bool t_injective_declared = true)
      : cone_(std::move(cone)),
        labels_(std::move(labels)),
        t_(std::move(t_table)),
        s_(std::move(s_table)),
        t_injective_declared_(t_injective_declared) {
    const std::size_t n = labels_.size();
    std::vector<std::string> problems;
    if (n == 0) problems.push_back("finite instance needs at least one point");
    if (n > max_points) problems.push_back("finite instance has more than " + std::to_string(max_points) + " points");
    if (table.size() != n) problems.push_back("metric table has " + std::to_string(table.size()) + " rows for " +
                                              std::to_string(n) + " points");
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (table[i].size() != n) problems.push_back("metric table row " + std::to_string(i) + " has wrong length");
      for (const auto& v : table[i])
        if (v.size() != cone_.dimension()) {
          problems.push_back("metric table row " + std::to_string(i) + " has entries of wrong dimension");
          break;
        }
    }
    for (const auto* tab : {&t_, &s_}) {
      const char* name = tab == &t_ ? "T" : "S";
      if (tab->size() != n) problems.push_back(std::string(name) + " table has wrong length");
      for (std::size_t v : *tab)
        if (v >= n) {
          problems.push_back(std::string(name) + " table entry " + std::to_string(v) + " out of range");
          break;
        }
    }
    if (!problems.empty()) throw ConfigError(std::move(problems));
    approx_.reserve(n * n);
    exact_.reserve(n * n);
    for (auto& row : table)
      for (auto& v : row) {
        approx_.push_back(to_double(v));
        exact_.push_back(std::move(v));
      }
    const auto report = axiom_report();
    if (!report.passed()) {
      for (std::size_t k = 0; k < std::min<std::size_t>(report.violations.size(), 8); ++k) {
        const auto& v = report.violations[k];
        std::string w;
        for (const auto& c : v.witness) w += (w.empty() ? "" : ",") + format_double(c.front());
        problems.push_back(axiom_description(v.axiom) + " fails at (" + w + ")");
      }
      throw ConfigError(std::move(problems));
    }
    if (t_injective_declared_ && !t_injective()) throw ConfigError("T declared injective but its table repeats a value");
  }

  /// Tabulates a space with a finite carrier, or the sampling grid of a
  /// continuous one. T and S must map the tabulated points onto themselves.
  static FiniteInstance tabulate(const ConeMetricSpace& space, const MapPair& maps) {
    std::vector<Point> pts = space.grid_points();
    if (pts.size() > max_points) throw ConfigError("carrier grid too large to tabulate");
    std::map<Point, std::size_t> index;
    for (std::size_t i = 0; i < pts.size(); ++i) index.emplace(pts[i], i);
    std::vector<std::vector<RationalVector>> table(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = 0; j < pts.size(); ++j) table[i].push_back(exact_distance(space, pts[i], pts[j]));
    auto lookup = [&](const Point& p, const char* name) {
      const auto it = index.find(p);
      if (it == index.end()) throw ConfigError(std::string(name) + " maps a grid point off the grid");
      return it->second;
    };
    std::vector<std::size_t> t, s;
    for (const auto& p : pts) {
      t.push_back(lookup(maps.T(p), "T"));
      s.push_back(lookup(maps.S(p), "S"));
    }
    return FiniteInstance(space.cone(), std::move(pts), std::move(table), std::move(t), std::move(s),
                          maps.declared().t_injective);
  }

  /// Scaled metrics with rho = abs or max are recomputed in rationals from
  /// the point coordinates; floating differences of grid points such as
  /// 0.01 k can break the triangle inequality by an ulp.
  static RationalVector exact_distance(const ConeMetricSpace& space, const Point& x, const Point& y) {
    const auto* scaled = std::get_if<ScaledMetric>(&space.metric());
    if (scaled == nullptr || scaled->rho == ScalarMetric::euclidean || x.size() != y.size())
      return to_exact(space.distance(x, y));
    Rational rho(0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      Rational diff = Rational(x[i]) - Rational(y[i]);
      if (diff < 0) diff = -diff;
      if (diff > rho) rho = diff;
    }
    std::vector<Rational> out;
    for (double u : scaled->direction) out.push_back(rho * Rational(u));
    return RationalVector(std::move(out));
  }

  static std::vector<std::vector<RationalVector>> to_exact_table(const std::vector<std::vector<VectorE>>& table) {
    std::vector<std::vector<RationalVector>> out(table.size());
    for (std::size_t i = 0; i < table.size(); ++i)
      for (const auto& v : table[i]) out[i].push_back(to_exact(v));
    return out;
  }

  std::size_t size() const noexcept { return labels_.size(); }
  const ConeSpec& cone() const noexcept { return cone_; }
  const std::vector<Point>& labels() const noexcept { return labels_; }
  const std::vector<std::size_t>& t_table() const noexcept { return t_; }
  const std::vector<std::size_t>& s_table() const noexcept { return s_; }
  bool t_injective_declared() const noexcept { return t_injective_declared_; }
  const VectorE& approx(std::size_t i, std::size_t j) const { return approx_[i * size() + j]; }
  const RationalVector& exact(std::size_t i, std::size_t j) const { return exact_[i * size() + j]; }

  bool t_injective() const {
    std::vector<bool> seen(size(), false);
    for (std::size_t v : t_) {
      if (seen[v]) return false;
      seen[v] = true;
    }
    return true;
  }

  FiniteView<Rational> exact_view() const { return FiniteView<Rational>(*this); }
  FiniteView<double> approx_view() const { return FiniteView<double>(*this); }
  FiniteMaps maps() const { return FiniteMaps(t_, s_); }

  PairSet<std::size_t> all_pairs() const {
    PairSet<std::size_t> out;
    out.reserve(size() * size());
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = 0; j < size(); ++j) out.emplace_back(i, j);
    return out;
  }

  FiniteCarrier carrier() const { return FiniteCarrier{labels_}; }

  TabulatedMetric metric_spec() const {
    TabulatedMetric m;
    m.table.resize(size());
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = 0; j < size(); ++j) m.table[i].push_back(approx(i, j).coords());
    return m;
  }

  /// d1-d3 over all pairs and triples, exactly.
  AxiomReport axiom_report() const {
    AxiomReport report;
    report.axioms_checked = {"d1", "d2", "d3"};
    const std::size_t n = size();
    const std::size_t m = cone_.dimension();
    auto add = [&](const char* axiom, std::vector<std::size_t> idx, const RationalVector& residual) {
      if (report.count(axiom) >= detail::max_violations_per_axiom) return;
      AxiomViolation v;
      v.axiom = axiom;
      for (std::size_t i : idx) v.witness.push_back(labels_[i]);
      v.residual = to_double(residual).coords();
      report.violations.push_back(std::move(v));
    };
    const FiniteView<Rational> view = exact_view();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const auto& d = exact(i, j);
        ++report.sample_count;
        if (!cone_membership(cone_, d) || (i == j) != d.is_zero()) add("d1", {i, j}, d);
        if (d != exact(j, i)) add("d2", {i, j}, d - exact(j, i));
      }
    report.sample_count += n * n * n;
    const bool sign_family = cone_.family() != ConeFamily::polyhedral;
    detail::ScaledTable scaled;
    if (sign_family) scaled = detail::scale_to_integers(exact_);
    if (scaled.ok) {
      const auto signs = detail::orthant_signs(cone_);
      auto at = [&](std::size_t i, std::size_t j, std::size_t k) { return scaled.values[(i * n + j) * m + k]; };
      for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y)
          for (std::size_t z = 0; z < n; ++z)
            for (std::size_t k = 0; k < m; ++k) {
              const detail::Int128 slack = at(x, z, k) + at(z, y, k) - at(x, y, k);
              if ((signs[k] > 0 && slack < 0) || (signs[k] < 0 && slack > 0)) {
                add("d3", {x, y, z}, exact(x, z) + exact(z, y) - exact(x, y));
                break;
              }
            }
      return report;
    }
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y)
        for (std::size_t z = 0; z < n; ++z) {
          const auto via = view.distance(x, z) + view.distance(z, y);
          if (!cone_leq(cone_, exact(x, y), via)) add("d3", {x, y, z}, via - exact(x, y));
        }
    return report;
  }

 private:
  ConeSpec cone_;
  std::vector<Point> labels_;
  std::vector<VectorE> approx_;
  std::vector<RationalVector> exact_;
  std::vector<std::size_t> t_;
  std::vector<std::size_t> s_;
  bool t_injective_declared_ = true;
};

template <class Scalar>
const ConeSpec& FiniteView<Scalar>::cone() const noexcept {
  return fin_->cone();
}

template <class Scalar>
bool FiniteView<Scalar>::contains(std::size_t i) const noexcept {
  return i < fin_->size();
}

template <class Scalar>
const BasicVector<Scalar>& FiniteView<Scalar>::distance(std::size_t i, std::size_t j) const {
  if constexpr (is_exact_v<Scalar>) {
    return fin_->exact(i, j);
  } else {
    return fin_->approx(i, j);
  }
}

/// Exhaustive exact d1-d3 report.
inline AxiomReport verify_metric_axioms(const FiniteInstance& fin) { return fin.axiom_report(); }

/// {p : S(p) = p} by full scan.
inline std::vector<std::size_t> enumerate_fixed_points(const FiniteInstance& fin) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fin.size(); ++i)
    if (fin.s_table()[i] == i) out.push_back(i);
  return out;
}

/// The class inequality on all n^2 ordered pairs, in exact arithmetic.
template <class SpecScalar>
ConditionReport<std::size_t> exhaustive_condition_check(const FiniteInstance& fin,
                                                        const BasicClassSpec<SpecScalar>& spec) {
  return check_condition(fin.exact_view(), fin.maps(), convert_spec<Rational>(spec), fin.all_pairs());
}

/// Exact minimal constants of one class. `first` is a, b, c, delta or theta;
/// `second` is L or L1 for the two-constant classes.
struct TightConstants {
  ClassKind kind = ClassKind::tb;
  bool feasible = false;
  std::optional<Rational> first;
  std::optional<Rational> second;
  std::optional<ExactClassSpec> exact_spec;
  std::optional<ClassSpec> spec;  // exact constants rounded up to doubles
  PairSet<std::size_t> witnesses;  // why infeasible, or the binding pairs when feasible
  std::string reason;
};

namespace detail {

inline ExactClassSpec make_exact_spec(ClassKind kind, const Rational& first, const Rational& second) {
  switch (kind) {
    case ClassKind::tb: return Banach<Rational>{first};
    case ClassKind::tk: return Kannan<Rational>{first};
    case ClassKind::tc: return Chatterjea<Rational>{first};
    case ClassKind::tw: return Weak<Rational>{first, second};
    case ClassKind::tw_dual: return WeakDual<Rational>{first, second};
    case ClassKind::twu: return WeakUnique<Rational>{first, second};
    case ClassKind::tz: break;
  }
  throw ConfigError("tightest constants are not defined for TZ");
}

// Running maximum with the pairs attaining it.
struct ArgMax {
  std::optional<Rational> value;
  PairSet<std::size_t> at;

  void offer(const Rational& v, std::size_t i, std::size_t j) {
    if (!value || v > *value) {
      value = v;
      at.clear();
    }
    if (v == *value && at.size() < 16) at.emplace_back(i, j);
  }
};

}  // namespace detail

/// Per pair and per cone row r, the inequality reads r.lhs <= c r.rhs with
/// r.rhs >= 0, so the least constant is a maximum of exact ratios. For the
/// weak classes delta is forced only by rows whose second term vanishes; L
/// is then the least value that works at that delta (or at `pinned`).
inline TightConstants tightest_constants(const FiniteInstance& fin, ClassKind kind,
                                         std::optional<Rational> pinned = std::nullopt) {
  if (kind == ClassKind::tz) throw ConfigError("tightest constants are not defined for TZ; use TB, TK and TC");
  TightConstants out;
  out.kind = kind;
  const auto view = fin.exact_view();
  const auto maps = fin.maps();
  const auto& rows = fin.cone().rows();
  const bool weak = kind == ClassKind::tw || kind == ClassKind::tw_dual || kind == ClassKind::twu;
  if (pinned && !weak) throw ConfigError("only the two-constant classes accept a pinned constant");
  if (pinned && (*pinned < 0 || *pinned >= 1)) throw ConfigError("pinned constant must be in [0,1)");

  struct RowTerm {
    std::size_t i, j;
    Rational lhs, a, b;  // r.lhs, r.first_term, r.second_term
  };
  std::vector<RowTerm> terms;
  for (std::size_t i = 0; i < fin.size(); ++i)
    for (std::size_t j = 0; j < fin.size(); ++j) {
      const auto t = pair_terms(view, maps, i, j);
      const auto rhs = detail::rhs_terms(kind, t);
      for (const auto& row : rows) {
        RowTerm rt{i, j, detail::row_dot(row, t.lhs), detail::row_dot(row, rhs[0]), Rational(0)};
        if (weak) rt.b = detail::row_dot(row, rhs[1]);
        terms.push_back(std::move(rt));
      }
    }

  detail::ArgMax lead;
  PairSet<std::size_t> hard;
  for (const auto& rt : terms) {
    if (rt.lhs <= 0 || rt.b > 0) continue;
    if (rt.a == 0) {
      if (hard.empty() || hard.back() != std::make_pair(rt.i, rt.j)) hard.emplace_back(rt.i, rt.j);
    } else {
      lead.offer(rt.lhs / rt.a, rt.i, rt.j);
    }
  }
  if (!hard.empty()) {
    out.witnesses = std::move(hard);
    out.reason = "pairs with nonzero left side and vanishing right side";
    return out;
  }
  const Rational lead_min = lead.value ? *lead.value : Rational(0);
  out.first = lead_min;
  const Rational upper = (kind == ClassKind::tk || kind == ClassKind::tc) ? Rational(1, 2) : Rational(1);
  if (lead_min >= upper) {
    out.witnesses = lead.at;
    out.reason = "least constant is outside the class range";
    return out;
  }
  if (!weak) {
    out.feasible = true;
    out.witnesses = lead.at;
    out.exact_spec = detail::make_exact_spec(kind, lead_min, Rational(0));
    out.spec = detail::make_spec(kind, to_double_upper(lead_min), 0.0);
    return out;
  }
  Rational delta = lead_min;
  if (pinned) {
    if (*pinned < lead_min) {
      out.witnesses = lead.at;
      out.reason = "pinned constant is below the least feasible value";
      return out;
    }
    delta = *pinned;
    out.first = delta;
  }
  detail::ArgMax second;
  for (const auto& rt : terms) {
    if (rt.b <= 0) continue;
    const Rational need = (rt.lhs - delta * rt.a) / rt.b;
    if (need > 0) second.offer(need, rt.i, rt.j);
  }
  out.second = second.value ? *second.value : Rational(0);
  out.feasible = true;
  out.witnesses = second.value ? second.at : lead.at;
  out.exact_spec = detail::make_exact_spec(kind, delta, *out.second);
  out.spec = detail::make_spec(kind, to_double_upper(delta), to_double_upper(*out.second));
  return out;
}

/// Orbit-level check of the fixed-point conclusions on a finite instance.
struct CrossValidation {
  bool applicable = false;
  std::string reason;  // why not applicable
  ClassKind kind = ClassKind::tb;
  ConditionReport<std::size_t> condition;
  std::vector<std::size_t> fixed_points;
  bool uniqueness_expected = false;
  std::vector<std::optional<std::size_t>> orbit_limits;  // fixed point reached from each start
  std::vector<std::size_t> orbit_steps;
  bool exists = false;
  bool unique_ok = false;
  bool orbits_ok = false;

  bool passed() const noexcept { return applicable && exists && unique_ok && orbits_ok; }
};

/// With the class verified exhaustively and T injective, checks that a fixed
/// point exists, that it is unique for every class except TW and TW_DUAL, and
/// that every orbit lands on a fixed point within n steps. The final
/// uniqueness result also needs S to be a T-weak contraction, so TWU
/// additionally requires TW to be feasible.
template <class SpecScalar>
CrossValidation cross_validate(const FiniteInstance& fin, const BasicClassSpec<SpecScalar>& spec) {
  CrossValidation out;
  out.kind = kind_of(spec);
  out.condition = exhaustive_condition_check(fin, spec);
  if (!out.condition.holds()) {
    out.reason = "class inequality does not hold on every pair";
    return out;
  }
  if (!fin.t_injective()) {
    out.reason = "T is not injective";
    return out;
  }
  if (out.kind == ClassKind::twu && !tightest_constants(fin, ClassKind::tw).feasible) {
    out.reason = "S is not a T-weak contraction";
    return out;
  }
  out.applicable = true;
  out.uniqueness_expected = out.kind != ClassKind::tw && out.kind != ClassKind::tw_dual;
  out.fixed_points = enumerate_fixed_points(fin);
  out.exists = !out.fixed_points.empty();
  out.unique_ok = !out.uniqueness_expected || out.fixed_points.size() == 1;
  out.orbits_ok = true;
  const auto& s = fin.s_table();
  for (std::size_t start = 0; start < fin.size(); ++start) {
    std::size_t x = start;
    std::size_t steps = 0;
    while (s[x] != x && steps < fin.size()) {
      x = s[x];
      ++steps;
    }
    if (s[x] == x) {
      out.orbit_limits.push_back(x);
    } else {
      out.orbit_limits.push_back(std::nullopt);
      out.orbits_ok = false;
    }
    out.orbit_steps.push_back(steps);
  }
  return out;
}

}  // namespace conefix
