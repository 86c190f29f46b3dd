#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "conefix/axioms.hpp"
#include "conefix/errors.hpp"
#include "conefix/numeric.hpp"
#include "conefix/vector.hpp"

namespace conefix {

enum class ConeFamily { orthant, scaled_orthant, polyhedral };
enum class Membership { closed, interior };
enum class Relation { eq, lt, ll, gt, gg, incomparable };

inline const char* to_string(Relation r) {
  switch (r) {
    case Relation::eq: return "EQ";
    case Relation::lt: return "LT";
    case Relation::ll: return "LL";
    case Relation::gt: return "GT";
    case Relation::gg: return "GG";
    case Relation::incomparable: return "INCOMPARABLE";
  }
  return "?";
}

/// A polyhedral cone P = {v : Av >= 0} in R^m together with the norm used on E.
///
/// The orthant and scaled-orthant families are special cases whose membership
/// test is a pure sign test, so it is exact in floating point. General
/// polyhedral cones accept v when every row satisfies a.v >= -slack * |v| * |a|.
class ConeSpec {
 public:
  static constexpr double default_margin = 1e-9;
  static constexpr double default_slack = 1e-12;

  static ConeSpec orthant(std::size_t m, NormKind norm = NormKind::max) {
    if (m == 0) throw ConfigError("cone dimension must be >= 1");
    ConeSpec c(ConeFamily::orthant, m, norm);
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<double> row(m, 0.0);
      row[i] = 1.0;
      c.rows_.push_back(std::move(row));
    }
    return c;
  }

  static ConeSpec scaled_orthant(std::vector<double> weights, NormKind norm = NormKind::max) {
    if (weights.empty()) throw ConfigError("cone dimension must be >= 1");
    for (double w : weights)
      if (!std::isfinite(w)) throw ConfigError("cone weights must be finite");
    ConeSpec c(ConeFamily::scaled_orthant, weights.size(), norm);
    for (std::size_t i = 0; i < weights.size(); ++i) {
      std::vector<double> row(weights.size(), 0.0);
      row[i] = weights[i];
      c.rows_.push_back(std::move(row));
    }
    c.weights_ = std::move(weights);
    return c;
  }

  static ConeSpec polyhedral(std::size_t m, std::vector<std::vector<double>> rows,
                             NormKind norm = NormKind::max) {
    std::vector<std::string> problems;
    if (m == 0) problems.push_back("cone dimension must be >= 1");
    if (rows.empty()) problems.push_back("polyhedral cone needs at least one inequality row");
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != m)
        problems.push_back("polyhedral row " + std::to_string(r) + " has " +
                           std::to_string(rows[r].size()) + " entries, expected " +
                           std::to_string(m));
      for (double a : rows[r])
        if (!std::isfinite(a)) problems.push_back("polyhedral row " + std::to_string(r) + " is not finite");
    }
    if (!problems.empty()) throw ConfigError(std::move(problems));
    ConeSpec c(ConeFamily::polyhedral, m, norm);
    c.rows_ = std::move(rows);
    return c;
  }

  /// Planar cone spanned by two rays, as the intersection of two half-planes.
  static ConeSpec from_rays_2d(const VectorE& r1, const VectorE& r2, NormKind norm = NormKind::euclidean) {
    if (r1.size() != 2 || r2.size() != 2) throw ConfigError("from_rays_2d needs planar rays");
    const double cross = r1[0] * r2[1] - r1[1] * r2[0];
    if (cross == 0.0) throw ConfigError("rays must not be collinear");
    const double s = cross > 0 ? 1.0 : -1.0;
    // Normal to r1 pointing towards r2, and normal to r2 pointing towards r1.
    return polyhedral(2, {{-s * r1[1], s * r1[0]}, {s * r2[1], -s * r2[0]}}, norm);
  }

  ConeSpec& with_margin(double tau) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("interior_margin must be > 0");
    margin_ = tau;
    return *this;
  }
  ConeSpec& with_slack(double eps) {
    if (!(eps >= 0.0) || !std::isfinite(eps)) throw ConfigError("slack must be >= 0");
    slack_ = eps;
    return *this;
  }
  ConeSpec& with_norm(NormKind norm) {
    norm_ = norm;
    return *this;
  }
  ConeSpec& with_interior_point(VectorE p) {
    if (p.size() != dimension_) throw ConfigError("interior_point has wrong dimension");
    interior_point_ = std::move(p);
    return *this;
  }

  std::size_t dimension() const noexcept { return dimension_; }
  ConeFamily family() const noexcept { return family_; }
  NormKind norm_kind() const noexcept { return norm_; }
  double interior_margin() const noexcept { return margin_; }
  double slack() const noexcept { return slack_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<std::vector<double>>& rows() const noexcept { return rows_; }
  const std::optional<VectorE>& declared_interior_point() const noexcept { return interior_point_; }

  template <class Scalar>
  double norm(const BasicVector<Scalar>& v) const {
    return conefix::norm(v, norm_);
  }

  template <class Scalar>
  void require_dimension(const BasicVector<Scalar>& v) const {
    if (v.size() != dimension_)
      throw ConfigError("vector of dimension " + std::to_string(v.size()) +
                        " used with a cone of dimension " + std::to_string(dimension_));
  }

  friend bool operator==(const ConeSpec&, const ConeSpec&) = default;

 private:
  ConeSpec(ConeFamily family, std::size_t m, NormKind norm)
      : dimension_(m), family_(family), norm_(norm) {}

  std::size_t dimension_ = 0;
  ConeFamily family_ = ConeFamily::orthant;
  NormKind norm_ = NormKind::max;
  double margin_ = default_margin;
  double slack_ = default_slack;
  std::vector<double> weights_;
  std::vector<std::vector<double>> rows_;
  std::optional<VectorE> interior_point_;
};

namespace detail {

template <class Scalar>
Scalar row_dot(const std::vector<double>& row, const BasicVector<Scalar>& v) {
  Scalar acc(0);
  for (std::size_t j = 0; j < row.size(); ++j)
    if (row[j] != 0.0) acc += scalar_from<Scalar>(row[j]) * v[j];
  return acc;
}

inline double row_scale(const std::vector<double>& row) {
  double s = 0.0;
  for (double a : row) s = std::max(s, std::abs(a));
  return s;
}

// Sign test for the orthant families: exact even in floating point.
template <class Scalar>
bool sign_member(const ConeSpec& cone, const BasicVector<Scalar>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double w = cone.family() == ConeFamily::orthant ? 1.0 : cone.weights()[i];
    if (w > 0 && v[i] < 0) return false;
    if (w < 0 && v[i] > 0) return false;
  }
  return true;
}

/// Closed membership with an absolute per-row tolerance `tol` (scaled by the
/// row magnitude). Exact scalars ignore the tolerance.
template <class Scalar>
bool member_with_tolerance(const ConeSpec& cone, const BasicVector<Scalar>& v, double tol) {
  if constexpr (is_exact_v<Scalar>) {
    if (cone.family() != ConeFamily::polyhedral) return sign_member(cone, v);
    for (const auto& row : cone.rows())
      if (row_dot(row, v) < 0) return false;
    return true;
  } else {
    if (cone.family() == ConeFamily::orthant) {
      for (double c : v)
        if (c < -tol) return false;
      return true;
    }
    for (const auto& row : cone.rows())
      if (row_dot(row, v) < -tol * row_scale(row)) return false;
    return true;
  }
}

}  // namespace detail

/// v in P (closed) or v in Int P with relative margin tau (interior).
template <class Scalar>
bool cone_membership(const ConeSpec& cone, const BasicVector<Scalar>& v,
                     Membership mode = Membership::closed) {
  cone.require_dimension(v);
  if (mode == Membership::closed) {
    if (cone.family() != ConeFamily::polyhedral) return detail::sign_member(cone, v);
    return detail::member_with_tolerance(cone, v, cone.slack() * cone.norm(v));
  }
  if (v.is_zero()) return false;
  const double threshold = cone.interior_margin() * cone.norm(v);
  for (const auto& row : cone.rows()) {
    const auto dot = detail::row_dot(row, v);
    if (!(dot > 0) || to_double(dot) < threshold) return false;
  }
  return true;
}

/// lo <= hi in the cone order. Floating comparisons grant a slack proportional
/// to the operand magnitudes; exact scalars are compared exactly.
template <class Scalar>
bool cone_leq(const ConeSpec& cone, const BasicVector<Scalar>& lo, const BasicVector<Scalar>& hi) {
  cone.require_dimension(lo);
  cone.require_dimension(hi);
  const auto diff = hi - lo;
  if constexpr (is_exact_v<Scalar>) {
    return detail::member_with_tolerance(cone, diff, 0.0);
  } else {
    const double scale = std::max(cone.norm(lo), cone.norm(hi));
    return detail::member_with_tolerance(cone, diff, cone.slack() * scale);
  }
}

/// Coordinatewise equality up to the cone slack (exact for Rational).
template <class Scalar>
bool cone_equal(const ConeSpec& cone, const BasicVector<Scalar>& a, const BasicVector<Scalar>& b) {
  if (a.size() != b.size()) return false;
  if constexpr (is_exact_v<Scalar>) {
    return a == b;
  } else {
    const double tol = cone.slack() * std::max(cone.norm(a), cone.norm(b));
    for (std::size_t i = 0; i < a.size(); ++i)
      if (std::abs(a[i] - b[i]) > tol) return false;
    return true;
  }
}

template <class Scalar>
Relation order_compare(const ConeSpec& cone, const BasicVector<Scalar>& x, const BasicVector<Scalar>& y) {
  cone.require_dimension(x);
  cone.require_dimension(y);
  if (x == y) return Relation::eq;
  const auto up = y - x;
  if (cone_membership(cone, up, Membership::interior)) return Relation::ll;
  if (cone_membership(cone, up, Membership::closed)) return Relation::lt;
  const auto down = -up;
  if (cone_membership(cone, down, Membership::interior)) return Relation::gg;
  if (cone_membership(cone, down, Membership::closed)) return Relation::gt;
  return Relation::incomparable;
}

/// Uniform draw from P intersected with [-1,1]^m, or nothing when rejection
/// sampling finds no member. Orthant draws zero out coordinates at random so
/// faces get sampled too.
inline std::optional<VectorE> sample_cone_point(const ConeSpec& cone, Rng& rng) {
  const std::size_t m = cone.dimension();
  std::vector<double> v(m);
  if (cone.family() != ConeFamily::polyhedral) {
    for (std::size_t i = 0; i < m; ++i) {
      const double w = cone.family() == ConeFamily::orthant ? 1.0 : cone.weights()[i];
      const double u = rng.uniform01();
      const bool on_face = rng.bernoulli(0.125);
      if (w > 0) v[i] = on_face ? 0.0 : u;
      else if (w < 0) v[i] = on_face ? 0.0 : -u;
      else v[i] = 2.0 * u - 1.0;
    }
    return VectorE(std::move(v));
  }
  for (int attempt = 0; attempt < 512; ++attempt) {
    for (auto& c : v) c = rng.uniform(-1.0, 1.0);
    VectorE cand(v);
    if (cone_membership(cone, cand, Membership::closed)) return cand;
  }
  return std::nullopt;
}

/// A point of Int P: the declared one if any, else a search over natural
/// candidates and seeded random directions.
inline std::optional<VectorE> find_interior_point(const ConeSpec& cone, std::uint64_t seed = 0) {
  if (const auto& p = cone.declared_interior_point()) {
    if (cone_membership(cone, *p, Membership::interior)) return p;
  }
  const std::size_t m = cone.dimension();
  std::vector<VectorE> candidates;
  candidates.emplace_back(std::vector<double>(m, 1.0));
  if (cone.family() == ConeFamily::scaled_orthant) {
    std::vector<double> signs(m);
    for (std::size_t i = 0; i < m; ++i) signs[i] = cone.weights()[i] >= 0 ? 1.0 : -1.0;
    candidates.emplace_back(std::move(signs));
  }
  std::vector<double> sum(m, 0.0);
  for (const auto& row : cone.rows()) {
    candidates.emplace_back(row);
    const double s = detail::row_scale(row);
    if (s > 0)
      for (std::size_t j = 0; j < m; ++j) sum[j] += row[j] / s;
  }
  candidates.emplace_back(sum);
  for (const auto& c : candidates)
    if (cone_membership(cone, c, Membership::interior)) return c;
  Rng rng(seed);
  std::vector<double> v(m);
  for (int attempt = 0; attempt < 4096; ++attempt) {
    for (auto& c : v) c = rng.uniform(-1.0, 1.0);
    VectorE cand(v);
    if (cone_membership(cone, cand, Membership::interior)) return cand;
  }
  return std::nullopt;
}

namespace detail {

// Orthonormal basis of the row space (modified Gram-Schmidt).
inline std::vector<std::vector<double>> row_space_basis(const ConeSpec& cone) {
  std::vector<std::vector<double>> basis;
  for (auto row : cone.rows()) {
    for (const auto& q : basis) {
      double d = 0;
      for (std::size_t j = 0; j < row.size(); ++j) d += q[j] * row[j];
      for (std::size_t j = 0; j < row.size(); ++j) row[j] -= d * q[j];
    }
    double n = 0;
    for (double a : row) n = std::hypot(n, a);
    if (n > 1e-12) {
      for (auto& a : row) a /= n;
      basis.push_back(std::move(row));
    }
  }
  return basis;
}

}  // namespace detail

/// Sampled check of P1-P3 plus nonempty interior. Degenerate cones yield
/// violation entries, never exceptions.
inline AxiomReport verify_cone_axioms(const ConeSpec& cone, const SamplingPlan& plan) {
  AxiomReport report;
  report.axioms_checked = {"P1", "interior", "P2", "P3"};
  const std::size_t m = cone.dimension();
  Rng rng(plan.seed);

  const VectorE zero(m);
  if (!cone_membership(cone, zero)) report.violations.push_back({"P1", {zero.coords()}, zero.coords()});
  const auto interior = find_interior_point(cone, plan.seed);
  if (!interior) {
    report.violations.push_back({"interior", {}, {}});
    bool nonzero_member = false;
    for (int i = 0; i < 64 && !nonzero_member; ++i) {
      const auto p = sample_cone_point(cone, rng);
      nonzero_member = p && !p->is_zero();
    }
    if (!nonzero_member) report.violations.push_back({"P1", {}, {}});
  } else if (!cone_membership(cone, *interior)) {
    report.violations.push_back({"P1", {interior->coords()}, interior->coords()});
  }
  report.sample_count += 2;

  for (std::size_t k = 0; k < plan.count; ++k) {
    const auto x = sample_cone_point(cone, rng);
    const auto y = sample_cone_point(cone, rng);
    if (!x || !y) continue;
    const double a = rng.uniform(0.0, 10.0);
    const double b = rng.uniform(0.0, 10.0);
    const VectorE v = a * *x + b * *y;
    ++report.sample_count;
    if (!cone_membership(cone, v))
      report.violations.push_back({"P2", {x->coords(), y->coords(), {a, b}}, v.coords()});
  }

  std::vector<VectorE> candidates;
  for (std::size_t i = 0; i < m; ++i) {
    VectorE e(m);
    e[i] = 1.0;
    candidates.push_back(e);
  }
  const auto basis = detail::row_space_basis(cone);
  for (int k = 0; k < 8; ++k) {
    std::vector<double> v(m);
    for (auto& c : v) c = rng.uniform(-1.0, 1.0);
    for (const auto& q : basis) {
      double d = 0;
      for (std::size_t j = 0; j < m; ++j) d += q[j] * v[j];
      for (std::size_t j = 0; j < m; ++j) v[j] -= d * q[j];
    }
    VectorE cand(v);
    if (norm(cand, NormKind::max) > 1e-9) candidates.push_back(cand);
  }
  for (std::size_t k = 0; k < plan.count; ++k) {
    std::vector<double> v(m);
    for (auto& c : v) c = rng.uniform(-1.0, 1.0);
    candidates.emplace_back(std::move(v));
  }
  for (const auto& v : candidates) {
    ++report.sample_count;
    if (v.is_zero()) continue;
    if (cone_membership(cone, v) && cone_membership(cone, -v))
      report.violations.push_back({"P3", {v.coords()}, v.coords()});
  }
  return report;
}

struct NormalConstantEstimate {
  double value = 0.0;
  std::size_t pairs = 0;
  bool inconclusive = true;
};

/// Lower bound on the normal constant: the sup of |x|/|y| over sampled
/// ordered pairs 0 <= x <= y, y != 0. The first pair is the reflexive one
/// (y = x), so the estimate is at least 1 for any cone with a nonzero sample.
inline NormalConstantEstimate estimate_normal_constant(const ConeSpec& cone, const SamplingPlan& plan) {
  NormalConstantEstimate est;
  Rng rng(plan.seed);
  for (std::size_t k = 0; k < plan.count; ++k) {
    const auto x = sample_cone_point(cone, rng);
    const auto z = sample_cone_point(cone, rng);
    if (!x || !z) continue;
    const double t = est.pairs == 0 ? 0.0 : rng.uniform(0.0, 2.0);
    const VectorE y = *x + t * *z;
    const double ny = cone.norm(y);
    if (ny == 0.0) continue;
    est.value = std::max(est.value, cone.norm(*x) / ny);
    ++est.pairs;
  }
  est.inconclusive = est.pairs == 0;
  return est;
}

}  // namespace conefix
