#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "conefix/cone.hpp"
#include "conefix/errors.hpp"
#include "conefix/metric_space.hpp"
#include "conefix/numeric.hpp"
#include "conefix/vector.hpp"

namespace conefix {

// Contraction classes. Every condition bounds d(TSx, TSy) by a nonnegative
// combination of T-image distances; see evaluate() for the exact forms.

/// d(TSx,TSy) <= a d(Tx,Ty)
template <class S> struct Banach { S a; };
/// d(TSx,TSy) <= b [d(Tx,TSx) + d(Ty,TSy)]
template <class S> struct Kannan { S b; };
/// d(TSx,TSy) <= c [d(Tx,TSy) + d(Ty,TSx)]
template <class S> struct Chatterjea { S c; };
/// At least one of the Banach(a), Kannan(b), Chatterjea(c) bounds.
template <class S> struct Zamfirescu { S a, b, c; };
/// d(TSx,TSy) <= delta d(Tx,Ty) + L d(Ty,TSx)
template <class S> struct Weak { S delta, L; };
/// d(TSx,TSy) <= delta d(Tx,Ty) + L d(Tx,TSy)
template <class S> struct WeakDual { S delta, L; };
/// d(TSx,TSy) <= theta d(Tx,Ty) + L1 d(Tx,TSx)
template <class S> struct WeakUnique { S theta, L1; };

template <class S>
using BasicClassSpec = std::variant<Banach<S>, Kannan<S>, Chatterjea<S>, Zamfirescu<S>, Weak<S>, WeakDual<S>, WeakUnique<S>>;
using ClassSpec = BasicClassSpec<double>;
using ExactClassSpec = BasicClassSpec<Rational>;

enum class ClassKind { tb, tk, tc, tz, tw, tw_dual, twu };

template <class S>
ClassKind kind_of(const BasicClassSpec<S>& spec) {
  return static_cast<ClassKind>(spec.index());
}

inline const char* to_string(ClassKind k) {
  switch (k) {
    case ClassKind::tb: return "TB";
    case ClassKind::tk: return "TK";
    case ClassKind::tc: return "TC";
    case ClassKind::tz: return "TZ";
    case ClassKind::tw: return "TW";
    case ClassKind::tw_dual: return "TW_DUAL";
    case ClassKind::twu: return "TWU";
  }
  return "?";
}

inline std::optional<ClassKind> parse_class_kind(std::string_view name) {
  for (auto k : {ClassKind::tb, ClassKind::tk, ClassKind::tc, ClassKind::tz, ClassKind::tw, ClassKind::tw_dual,
                 ClassKind::twu})
    if (name == to_string(k)) return k;
  return std::nullopt;
}

template <class S> bool operator==(const Banach<S>& x, const Banach<S>& y) { return x.a == y.a; }
template <class S> bool operator==(const Kannan<S>& x, const Kannan<S>& y) { return x.b == y.b; }
template <class S> bool operator==(const Chatterjea<S>& x, const Chatterjea<S>& y) { return x.c == y.c; }
template <class S> bool operator==(const Zamfirescu<S>& x, const Zamfirescu<S>& y) {
  return x.a == y.a && x.b == y.b && x.c == y.c;
}
template <class S> bool operator==(const Weak<S>& x, const Weak<S>& y) { return x.delta == y.delta && x.L == y.L; }
template <class S> bool operator==(const WeakDual<S>& x, const WeakDual<S>& y) {
  return x.delta == y.delta && x.L == y.L;
}
template <class S> bool operator==(const WeakUnique<S>& x, const WeakUnique<S>& y) {
  return x.theta == y.theta && x.L1 == y.L1;
}

namespace detail {

template <class To, class From>
To convert_scalar(const From& v) {
  if constexpr (std::is_same_v<To, From>) {
    return v;
  } else if constexpr (is_exact_v<To>) {
    return Rational(v);
  } else {
    return to_double(v);
  }
}

template <class S>
void range_check(std::vector<std::string>& out, const char* name, const S& v, const S& hi, const char* range) {
  if (!(v >= 0) || !(v < hi)) out.push_back(std::string(name) + " must be in " + range);
}

template <class S>
void nonneg_check(std::vector<std::string>& out, const char* name, const S& v) {
  if (!(v >= 0)) out.push_back(std::string(name) + " must be >= 0");
}

}  // namespace detail

template <class To, class From>
BasicClassSpec<To> convert_spec(const BasicClassSpec<From>& spec) {
  using detail::convert_scalar;
  return std::visit(
      [](const auto& s) -> BasicClassSpec<To> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Banach<From>>) return Banach<To>{convert_scalar<To>(s.a)};
        else if constexpr (std::is_same_v<T, Kannan<From>>) return Kannan<To>{convert_scalar<To>(s.b)};
        else if constexpr (std::is_same_v<T, Chatterjea<From>>) return Chatterjea<To>{convert_scalar<To>(s.c)};
        else if constexpr (std::is_same_v<T, Zamfirescu<From>>)
          return Zamfirescu<To>{convert_scalar<To>(s.a), convert_scalar<To>(s.b), convert_scalar<To>(s.c)};
        else if constexpr (std::is_same_v<T, Weak<From>>)
          return Weak<To>{convert_scalar<To>(s.delta), convert_scalar<To>(s.L)};
        else if constexpr (std::is_same_v<T, WeakDual<From>>)
          return WeakDual<To>{convert_scalar<To>(s.delta), convert_scalar<To>(s.L)};
        else
          return WeakUnique<To>{convert_scalar<To>(s.theta), convert_scalar<To>(s.L1)};
      },
      spec);
}

/// Every constant outside its class's range, e.g. "a must be in [0,1)".
/// Weak-family leading constants accept 0 (a strictly stronger condition).
template <class S>
std::vector<std::string> range_errors(const BasicClassSpec<S>& spec) {
  std::vector<std::string> out;
  const S one(1);
  const S half = S(1) / S(2);
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        using detail::nonneg_check;
        using detail::range_check;
        if constexpr (std::is_same_v<T, Banach<S>>) {
          range_check(out, "a", s.a, one, "[0,1)");
        } else if constexpr (std::is_same_v<T, Kannan<S>>) {
          range_check(out, "b", s.b, half, "[0,1/2)");
        } else if constexpr (std::is_same_v<T, Chatterjea<S>>) {
          range_check(out, "c", s.c, half, "[0,1/2)");
        } else if constexpr (std::is_same_v<T, Zamfirescu<S>>) {
          range_check(out, "a", s.a, one, "[0,1)");
          range_check(out, "b", s.b, half, "[0,1/2)");
          range_check(out, "c", s.c, half, "[0,1/2)");
        } else if constexpr (std::is_same_v<T, WeakUnique<S>>) {
          range_check(out, "theta", s.theta, one, "[0,1)");
          nonneg_check(out, "L1", s.L1);
        } else {
          range_check(out, "delta", s.delta, one, "[0,1)");
          nonneg_check(out, "L", s.L);
        }
      },
      spec);
  if constexpr (std::is_floating_point_v<S>) {
    std::visit(
        [&](const auto& s) {
          bool finite = true;
          if constexpr (requires { s.a; }) finite = finite && std::isfinite(s.a);
          if constexpr (requires { s.b; }) finite = finite && std::isfinite(s.b);
          if constexpr (requires { s.c; }) finite = finite && std::isfinite(s.c);
          if constexpr (requires { s.L; }) finite = finite && std::isfinite(s.L);
          if constexpr (requires { s.L1; }) finite = finite && std::isfinite(s.L1);
          if (!finite) out.push_back("constants must be finite");
        },
        spec);
  }
  return out;
}

template <class S>
void require_in_range(const BasicClassSpec<S>& spec) {
  auto errors = range_errors(spec);
  if (!errors.empty()) throw ConfigError(std::move(errors));
}

/// max{a, b/(1-b), c/(1-c)}: the single rate that the three Zamfirescu
/// alternatives collapse to. Always in [0, 1).
template <class S>
S zamfirescu_delta(const S& a, const S& b, const S& c) {
  require_in_range(BasicClassSpec<S>{Zamfirescu<S>{a, b, c}});
  const S one(1);
  S delta = a;
  delta = std::max<S>(delta, b / (one - b));
  delta = std::max<S>(delta, c / (one - c));
  return delta;
}

/// The weak-contraction constants implied by a TB/TK/TC/TZ spec:
/// TB(a) -> (a, 0); TK(b) -> (b/(1-b), 2b/(1-b)); TC likewise with c;
/// TZ(a,b,c) -> (delta, 2 delta). TW and TW_DUAL pass through unchanged.
template <class S>
BasicClassSpec<S> promote_to_weak(const BasicClassSpec<S>& spec) {
  require_in_range(spec);
  const S one(1);
  const S two(2);
  return std::visit(
      [&](const auto& s) -> BasicClassSpec<S> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Banach<S>>) {
          return Weak<S>{s.a, S(0)};
        } else if constexpr (std::is_same_v<T, Kannan<S>>) {
          return Weak<S>{s.b / (one - s.b), two * s.b / (one - s.b)};
        } else if constexpr (std::is_same_v<T, Chatterjea<S>>) {
          return Weak<S>{s.c / (one - s.c), two * s.c / (one - s.c)};
        } else if constexpr (std::is_same_v<T, Zamfirescu<S>>) {
          const S delta = zamfirescu_delta(s.a, s.b, s.c);
          return Weak<S>{delta, two * delta};
        } else if constexpr (std::is_same_v<T, WeakUnique<S>>) {
          throw ConfigError("TWU is not part of the promotion hierarchy");
        } else {
          return s;
        }
      },
      spec);
}

/// The six T-image distances one pair contributes to any condition.
template <class S>
struct PairTerms {
  BasicVector<S> lhs;     // d(TSx, TSy)
  BasicVector<S> tx_ty;   // d(Tx, Ty)
  BasicVector<S> tx_tsx;  // d(Tx, TSx)
  BasicVector<S> ty_tsy;  // d(Ty, TSy)
  BasicVector<S> tx_tsy;  // d(Tx, TSy)
  BasicVector<S> ty_tsx;  // d(Ty, TSx)
};

template <class Space, class Maps, class P>
PairTerms<typename Space::scalar_type> pair_terms(const Space& space, const Maps& maps, const P& x, const P& y) {
  const P tx = maps.T(x);
  const P ty = maps.T(y);
  const P tsx = maps.T(maps.S(x));
  const P tsy = maps.T(maps.S(y));
  return {space.distance(tsx, tsy), space.distance(tx, ty), space.distance(tx, tsx),
          space.distance(ty, tsy),  space.distance(tx, tsy), space.distance(ty, tsx)};
}

template <class S>
struct Evaluation {
  bool holds = false;
  unsigned branches = 0;  // bit i set when Zamfirescu branch i+1 holds
  BasicVector<S> rhs;
};

namespace detail {

// Smallest slack across the cone rows; larger means closer to holding.
template <class S>
double row_margin(const ConeSpec& cone, const BasicVector<S>& v) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& row : cone.rows()) m = std::min(m, to_double(row_dot(row, v)));
  return m;
}

}  // namespace detail

/// Evaluates one class inequality on precomputed pair terms as a cone-order
/// test rhs - lhs in P.
template <class S>
Evaluation<S> evaluate(const ConeSpec& cone, const BasicClassSpec<S>& spec, const PairTerms<S>& t) {
  auto test = [&](BasicVector<S> rhs) {
    const bool ok = cone_leq(cone, t.lhs, rhs);
    return Evaluation<S>{ok, 0u, std::move(rhs)};
  };
  return std::visit(
      [&](const auto& s) -> Evaluation<S> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Banach<S>>) {
          return test(s.a * t.tx_ty);
        } else if constexpr (std::is_same_v<T, Kannan<S>>) {
          return test(s.b * (t.tx_tsx + t.ty_tsy));
        } else if constexpr (std::is_same_v<T, Chatterjea<S>>) {
          return test(s.c * (t.tx_tsy + t.ty_tsx));
        } else if constexpr (std::is_same_v<T, Zamfirescu<S>>) {
          std::array<Evaluation<S>, 3> br{test(s.a * t.tx_ty), test(s.b * (t.tx_tsx + t.ty_tsy)),
                                          test(s.c * (t.tx_tsy + t.ty_tsx))};
          Evaluation<S> out;
          double best = -std::numeric_limits<double>::infinity();
          for (unsigned i = 0; i < 3; ++i) {
            if (br[i].holds) out.branches |= 1u << i;
            const double margin = detail::row_margin(cone, br[i].rhs - t.lhs);
            if (margin > best || out.rhs.size() == 0) {
              best = margin;
              out.rhs = br[i].rhs;
            }
          }
          out.holds = out.branches != 0;
          return out;
        } else if constexpr (std::is_same_v<T, Weak<S>>) {
          return test(s.delta * t.tx_ty + s.L * t.ty_tsx);
        } else if constexpr (std::is_same_v<T, WeakDual<S>>) {
          return test(s.delta * t.tx_ty + s.L * t.tx_tsy);
        } else {
          return test(s.theta * t.tx_ty + s.L1 * t.tx_tsx);
        }
      },
      spec);
}

template <class P>
struct Violation {
  P x;
  P y;
  VectorE lhs;
  VectorE rhs;
  VectorE residual;  // rhs - lhs, outside P
};

template <class P>
struct ConditionReport {
  ClassSpec spec = Banach<double>{0.0};
  std::size_t pairs_checked = 0;
  std::vector<Violation<P>> violations;
  std::array<std::size_t, 3> branch_hits{};       // Zamfirescu only
  std::array<std::size_t, 3> sole_branch_hits{};  // pairs where exactly that branch holds

  bool holds() const noexcept { return pairs_checked > 0 && violations.empty(); }
  bool inconclusive() const noexcept { return pairs_checked == 0; }

  void merge(const ConditionReport& other) {
    pairs_checked += other.pairs_checked;
    violations.insert(violations.end(), other.violations.begin(), other.violations.end());
    for (std::size_t i = 0; i < 3; ++i) {
      branch_hits[i] += other.branch_hits[i];
      sole_branch_hits[i] += other.sole_branch_hits[i];
    }
  }
};

/// Checks the class inequality on every pair. The spec is converted to the
/// space's scalar type, so exact spaces check exactly. Pairs are split into
/// chunks across workers and merged in pair order.
template <class Space, class Maps, class P, class SpecScalar>
ConditionReport<P> check_condition(const Space& space, const Maps& maps, const BasicClassSpec<SpecScalar>& spec,
                                   const PairSet<P>& pairs) {
  using S = typename Space::scalar_type;
  require_in_range(spec);
  const auto local = convert_spec<S>(spec);
  const ConeSpec& cone = space.cone();
  constexpr std::size_t chunk = 256;
  const std::size_t chunks = (pairs.size() + chunk - 1) / chunk;
  auto parts = parallel_indexed(chunks, [&](std::size_t c) {
    ConditionReport<P> part;
    for (std::size_t k = c * chunk; k < std::min(pairs.size(), (c + 1) * chunk); ++k) {
      const auto& [x, y] = pairs[k];
      const auto terms = pair_terms(space, maps, x, y);
      const auto ev = evaluate(cone, local, terms);
      ++part.pairs_checked;
      for (unsigned i = 0; i < 3; ++i) {
        if (ev.branches & (1u << i)) {
          ++part.branch_hits[i];
          if (ev.branches == (1u << i)) ++part.sole_branch_hits[i];
        }
      }
      if (!ev.holds) {
        const VectorE lhs = to_double(terms.lhs);
        const VectorE rhs = to_double(ev.rhs);
        part.violations.push_back({x, y, lhs, rhs, to_double(ev.rhs - terms.lhs)});
      }
    }
    return part;
  });
  ConditionReport<P> report;
  report.spec = convert_spec<double>(spec);
  for (const auto& p : parts) report.merge(p);
  return report;
}

/// Outcome of checking that a Zamfirescu spec collapses to the single-rate
/// bound d(TSx,TSy) <= delta d(Tx,Ty) + 2 delta d(Tx,TSx) (primary) and its
/// dual with d(Tx,TSy).
template <class P>
struct ReductionReport {
  bool applicable = false;
  double delta = 0.0;
  ConditionReport<P> precondition;
  ConditionReport<P> primary;
  ConditionReport<P> dual;

  bool holds() const noexcept { return applicable && primary.holds() && dual.holds(); }
};

template <class Space, class Maps, class P>
ReductionReport<P> verify_zamfirescu_reduction(const Space& space, const Maps& maps, double a, double b, double c,
                                               const PairSet<P>& pairs) {
  using S = typename Space::scalar_type;
  ReductionReport<P> report;
  const S delta = zamfirescu_delta(scalar_from<S>(a), scalar_from<S>(b), scalar_from<S>(c));
  report.delta = to_double(delta);
  report.precondition = check_condition(space, maps, ClassSpec{Zamfirescu<double>{a, b, c}}, pairs);
  if (!report.precondition.holds()) return report;
  report.applicable = true;
  const S two_delta = S(2) * delta;
  report.primary = check_condition(space, maps, BasicClassSpec<S>{WeakUnique<S>{delta, two_delta}}, pairs);
  report.dual = check_condition(space, maps, BasicClassSpec<S>{WeakDual<S>{delta, two_delta}}, pairs);
  return report;
}

/// The rate h = delta/(1 - 2 delta) quoted for the Picard gap sequence; it is
/// only below 1 for delta < 1/3 and is reported next to the enforced h = delta.
inline double quoted_zamfirescu_rate(double delta) {
  if (delta >= 0.5) return std::numeric_limits<double>::infinity();
  return delta / (1.0 - 2.0 * delta);
}

enum class FitStatus { fitted, infeasible, inconclusive };

inline const char* to_string(FitStatus s) {
  switch (s) {
    case FitStatus::fitted: return "fitted";
    case FitStatus::infeasible: return "infeasible";
    case FitStatus::inconclusive: return "inconclusive";
  }
  return "?";
}

struct FitOptions {
  double tolerance = 1e-6;
  /// Fixes the leading constant (delta or theta) of the weak classes.
  std::optional<double> pinned_leading;
  /// Upper end of the search range for the weak classes' second constant.
  double second_cap = 1e6;
};

template <class P>
struct FitResult {
  FitStatus status = FitStatus::inconclusive;
  std::optional<ClassSpec> spec;
  PairSet<P> witnesses;
  std::size_t pairs_used = 0;
  std::size_t degenerate_pairs = 0;
};

namespace detail {

inline ClassSpec make_spec(ClassKind kind, double first, double second) {
  switch (kind) {
    case ClassKind::tb: return Banach<double>{first};
    case ClassKind::tk: return Kannan<double>{first};
    case ClassKind::tc: return Chatterjea<double>{first};
    case ClassKind::tw: return Weak<double>{first, second};
    case ClassKind::tw_dual: return WeakDual<double>{first, second};
    case ClassKind::twu: return WeakUnique<double>{first, second};
    case ClassKind::tz: break;
  }
  throw ConfigError("no single-parameter search is defined for TZ");
}

template <class S>
std::vector<BasicVector<S>> rhs_terms(ClassKind kind, const PairTerms<S>& t) {
  switch (kind) {
    case ClassKind::tb: return {t.tx_ty};
    case ClassKind::tk: return {t.tx_tsx + t.ty_tsy};
    case ClassKind::tc: return {t.tx_tsy + t.ty_tsx};
    case ClassKind::tw: return {t.tx_ty, t.ty_tsx};
    case ClassKind::tw_dual: return {t.tx_ty, t.tx_tsy};
    case ClassKind::twu: return {t.tx_ty, t.tx_tsx};
    case ClassKind::tz: break;
  }
  throw ConfigError("no single-parameter search is defined for TZ");
}

}  // namespace detail

/// Smallest constants (to options.tolerance, by bisection) for which the
/// class inequality holds on every pair. Weak classes minimize the leading
/// constant first, then the second one at that value.
///
/// Pairs whose right-hand terms all vanish carry no information when the
/// left side vanishes too (dropped as degenerate) and make every constant
/// fail otherwise (reported as infeasibility witnesses).
template <class Space, class Maps, class P>
FitResult<P> fit_constants(const Space& space, const Maps& maps, ClassKind kind, const PairSet<P>& pairs,
                           const FitOptions& options = {}) {
  using S = typename Space::scalar_type;
  if (kind == ClassKind::tz) throw ConfigError("fit_constants does not search TZ; fit TB, TK and TC separately");
  if (!(options.tolerance > 0) || !(options.tolerance < 0.25)) throw ConfigError("fit tolerance must be in (0, 1/4)");
  const ConeSpec& cone = space.cone();
  FitResult<P> result;
  std::vector<PairTerms<S>> active;
  std::vector<std::size_t> active_index;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    auto terms = pair_terms(space, maps, pairs[k].first, pairs[k].second);
    const auto rhs = detail::rhs_terms(kind, terms);
    const bool rhs_zero = std::all_of(rhs.begin(), rhs.end(), [](const auto& v) { return v.is_zero(); });
    if (rhs_zero) {
      if (terms.lhs.is_zero()) {
        ++result.degenerate_pairs;
      } else {
        result.witnesses.push_back(pairs[k]);
      }
      continue;
    }
    active.push_back(std::move(terms));
    active_index.push_back(k);
  }
  result.pairs_used = active.size();
  if (!result.witnesses.empty()) {
    result.status = FitStatus::infeasible;
    return result;
  }
  if (active.empty()) return result;

  auto failing = [&](const ClassSpec& spec) {
    const auto local = convert_spec<S>(spec);
    std::vector<std::size_t> bad;
    for (std::size_t i = 0; i < active.size(); ++i)
      if (!evaluate(cone, local, active[i]).holds) bad.push_back(active_index[i]);
    return bad;
  };
  auto passes = [&](const ClassSpec& spec) {
    const auto local = convert_spec<S>(spec);
    for (const auto& t : active)
      if (!evaluate(cone, local, t).holds) return false;
    return true;
  };
  auto bisect = [&](double lo, double hi, auto&& ok) {
    // Invariant: ok(hi), !ok(lo).
    while (hi - lo > options.tolerance) {
      const double mid = 0.5 * (lo + hi);
      (ok(mid) ? hi : lo) = mid;
    }
    return hi;
  };
  auto infeasible_at = [&](const ClassSpec& spec) {
    for (std::size_t k : failing(spec)) result.witnesses.push_back(pairs[k]);
    result.status = FitStatus::infeasible;
    return result;
  };

  const bool weak = kind == ClassKind::tw || kind == ClassKind::tw_dual || kind == ClassKind::twu;
  if (!weak) {
    // Within tolerance of the open upper end the slack cannot separate the
    // fitted value from the boundary, so that counts as infeasible.
    const double upper = kind == ClassKind::tb ? 1.0 : 0.5;
    const double top = upper - options.tolerance;
    auto ok = [&](double v) { return passes(detail::make_spec(kind, v, 0.0)); };
    if (!ok(top)) return infeasible_at(detail::make_spec(kind, top, 0.0));
    const double value = ok(0.0) ? 0.0 : bisect(0.0, top, ok);
    result.spec = detail::make_spec(kind, value, 0.0);
    result.status = FitStatus::fitted;
    return result;
  }

  const double cap = options.second_cap;
  double leading = 0.0;
  if (options.pinned_leading) {
    leading = *options.pinned_leading;
    if (!(leading >= 0.0 && leading < 1.0)) throw ConfigError("pinned constant must be in [0,1)");
    if (!passes(detail::make_spec(kind, leading, cap))) return infeasible_at(detail::make_spec(kind, leading, cap));
  } else {
    const double top = 1.0 - options.tolerance;
    auto ok = [&](double v) { return passes(detail::make_spec(kind, v, cap)); };
    if (!ok(top)) return infeasible_at(detail::make_spec(kind, top, cap));
    leading = ok(0.0) ? 0.0 : bisect(0.0, top, ok);
  }
  auto ok_second = [&](double v) { return passes(detail::make_spec(kind, leading, v)); };
  const double second = ok_second(0.0) ? 0.0 : bisect(0.0, cap, ok_second);
  result.spec = detail::make_spec(kind, leading, second);
  result.status = FitStatus::fitted;
  return result;
}

}  // namespace conefix
