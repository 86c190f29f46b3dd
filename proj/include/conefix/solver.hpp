#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "conefix/contractions.hpp"
#include "conefix/errors.hpp"
#include "conefix/maps.hpp"
#include "conefix/metric_space.hpp"
#include "conefix/numeric.hpp"

namespace conefix {

struct StoppingRule {
  double epsilon = 1e-12;
  std::size_t max_iter = 1000000;
  std::size_t stall_window = 50;

  void validate() const {
    std::vector<std::string> problems;
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) problems.push_back("epsilon must be > 0");
    if (max_iter < 1) problems.push_back("max_iter must be >= 1");
    if (!problems.empty()) throw ConfigError(std::move(problems));
  }
};

enum class StopReason { converged, max_iter, cycle_detected };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::converged: return "converged";
    case StopReason::max_iter: return "max_iter";
    case StopReason::cycle_detected: return "cycle_detected";
  }
  return "?";
}

/// Picard orbit x_{n+1} = S x_n with the monitored T-image gaps.
///
/// Row n holds x_n, its T-image T S^n x_0, the gap d(T x_n, T x_{n+1}) and the
/// carrier step |d(x_n, x_{n+1})|. `iterations` counts applications of S,
/// which is one per row.
template <class P>
struct IterationTrace {
  std::vector<P> x_sequence;
  std::vector<P> t_images;
  std::vector<VectorE> t_image_gaps;
  std::vector<double> gap_norms;
  std::vector<double> step_norms;
  std::optional<P> final_image;  // S applied to the last row
  std::size_t iterations = 0;
  StopReason stop_reason = StopReason::max_iter;

  std::size_t rows() const noexcept { return x_sequence.size(); }
  bool converged() const noexcept { return stop_reason == StopReason::converged; }
};

/// Iterates until both the T-image gap and the carrier step fall to
/// rule.epsilon, the row index reaches rule.max_iter, or S revisits one of the
/// last rule.stall_window points exactly.
template <class Space, class Maps, class P>
IterationTrace<P> picard_iterate(const Space& space, const Maps& maps, const P& x0, const StoppingRule& rule) {
  rule.validate();
  if (!space.contains(x0)) throw DomainError("start point is outside the carrier");
  const ConeSpec& cone = space.cone();
  IterationTrace<P> trace;
  std::deque<P> recent;
  P x = x0;
  P tx = maps.T(x);
  for (std::size_t n = 0;; ++n) {
    P next = maps.S(x);
    ++trace.iterations;
    if (!space.contains(next)) throw DomainError("S leaves the carrier at iterate " + std::to_string(n + 1));
    P tnext = maps.T(next);
    if (!space.contains(tnext)) throw DomainError("T leaves the carrier at iterate " + std::to_string(n + 1));
    VectorE gap = to_double(space.distance(tx, tnext));
    const double gap_norm = cone.norm(gap);
    const double step = cone.norm(space.distance(x, next));
    trace.x_sequence.push_back(x);
    trace.t_images.push_back(tx);
    trace.t_image_gaps.push_back(std::move(gap));
    trace.gap_norms.push_back(gap_norm);
    trace.step_norms.push_back(step);
    if (gap_norm <= rule.epsilon && step <= rule.epsilon) {
      trace.stop_reason = StopReason::converged;
      trace.final_image = std::move(next);
      return trace;
    }
    if (n >= rule.max_iter) {
      trace.stop_reason = StopReason::max_iter;
      trace.final_image = std::move(next);
      return trace;
    }
    recent.push_back(x);
    if (recent.size() > rule.stall_window) recent.pop_front();
    if (std::find(recent.begin(), recent.end(), next) != recent.end()) {
      trace.stop_reason = StopReason::cycle_detected;
      trace.final_image = std::move(next);
      return trace;
    }
    x = std::move(next);
    tx = std::move(tnext);
  }
}

/// Largest observed ratio |d_{n+1}| / |d_n| over rows with |d_n| > 0.
template <class P>
double measured_rate(const IterationTrace<P>& trace) {
  double rate = 0.0;
  for (std::size_t n = 0; n + 1 < trace.gap_norms.size(); ++n)
    if (trace.gap_norms[n] > 0.0) rate = std::max(rate, trace.gap_norms[n + 1] / trace.gap_norms[n]);
  return rate;
}

struct DecayReport {
  double h = 0.0;
  double K = 1.0;
  bool per_step_ok = true;
  bool cauchy_ok = true;
  std::optional<std::size_t> first_step_failure;
  std::optional<std::pair<std::size_t, std::size_t>> first_cauchy_failure;  // (m, n)
  std::size_t cauchy_pairs_checked = 0;

  bool passed() const noexcept { return per_step_ok && cauchy_ok; }
};

/// Checks |d_n| <= K h^n |d_0| and the Cauchy tail
/// |d(TS^m x0, TS^n x0)| <= K h^n / (1 - h) |d_0| for m > n, both with a
/// relative allowance rel_tol. All (m, n) pairs are checked when there are at
/// most max_pairs of them, otherwise a seeded sample of that size.
template <class Space, class P>
DecayReport geometric_decay_check(const Space& space, const IterationTrace<P>& trace, double h, double K,
                                  double rel_tol = 1e-9, std::size_t max_pairs = 200000, std::uint64_t seed = 1) {
  if (!(h >= 0.0) || !(h < 1.0)) throw ConfigError("decay rate h must be in [0,1)");
  if (!(K >= 1.0) || !std::isfinite(K)) throw ConfigError("normal constant K must be >= 1");
  if (trace.rows() == 0) throw ConfigError("decay check needs a nonempty trace");
  DecayReport report;
  report.h = h;
  report.K = K;
  const double g0 = trace.gap_norms.front();
  const double allow = 1.0 + rel_tol;
  for (std::size_t n = 0; n < trace.rows(); ++n) {
    const double bound = K * std::pow(h, static_cast<double>(n)) * g0 * allow;
    if (trace.gap_norms[n] > bound) {
      report.per_step_ok = false;
      if (!report.first_step_failure) report.first_step_failure = n;
    }
  }
  const std::size_t rows = trace.rows();
  auto check_pair = [&](std::size_t m, std::size_t n) {
    const double d = space.cone().norm(space.distance(trace.t_images[m], trace.t_images[n]));
    const double bound = K * std::pow(h, static_cast<double>(n)) / (1.0 - h) * g0 * allow;
    ++report.cauchy_pairs_checked;
    if (d > bound) {
      report.cauchy_ok = false;
      if (!report.first_cauchy_failure) report.first_cauchy_failure = std::make_pair(m, n);
    }
  };
  const double total = 0.5 * static_cast<double>(rows) * static_cast<double>(rows - 1);
  if (total <= static_cast<double>(max_pairs)) {
    for (std::size_t n = 0; n < rows; ++n)
      for (std::size_t m = n + 1; m < rows; ++m) check_pair(m, n);
  } else {
    Rng rng(seed);
    for (std::size_t k = 0; k < max_pairs; ++k) {
      std::size_t a = rng.below(rows);
      std::size_t b = rng.below(rows);
      if (a == b) continue;
      if (a < b) std::swap(a, b);
      check_pair(a, b);
    }
  }
  return report;
}

struct FixedPointCheck {
  bool certified = false;
  double residual_norm = 0.0;
};

/// Certified iff |d(Sz, z)| <= epsilon.
template <class Space, class Maps, class P>
FixedPointCheck certify_fixed_point(const Space& space, const Maps& maps, const P& z, double epsilon) {
  if (!space.contains(z)) throw DomainError("candidate fixed point is outside the carrier");
  const double r = space.cone().norm(space.distance(maps.S(z), z));
  return {r <= epsilon, r};
}

enum class Uniqueness { unique, non_unique, unknown };

inline const char* to_string(Uniqueness u) {
  switch (u) {
    case Uniqueness::unique: return "unique";
    case Uniqueness::non_unique: return "non_unique";
    case Uniqueness::unknown: return "unknown";
  }
  return "?";
}

template <class P>
struct StartOutcome {
  P start;
  StopReason stop_reason = StopReason::max_iter;
  std::size_t iterations = 0;
  P limit;
  FixedPointCheck check;
};

template <class P>
struct UniquenessResult {
  Uniqueness verdict = Uniqueness::unknown;
  std::vector<StartOutcome<P>> runs;
  std::optional<P> fixed_point;  // set when unique
  std::vector<P> witnesses;      // two distinct certified fixed points when non_unique
};

/// Runs Picard iteration from every start (concurrently, merged by start
/// index) and compares the limits: unique when all coincide within
/// `tolerance` in the cone-metric norm.
template <class Space, class Maps, class P>
UniquenessResult<P> uniqueness_probe(const Space& space, const Maps& maps, const std::vector<P>& starts,
                                     const StoppingRule& rule, double tolerance = 1e-9) {
  if (starts.empty()) throw ConfigError("uniqueness probe needs at least one start");
  UniquenessResult<P> result;
  result.runs = parallel_indexed(starts.size(), [&](std::size_t i) {
    const auto trace = picard_iterate(space, maps, starts[i], rule);
    StartOutcome<P> out;
    out.start = starts[i];
    out.stop_reason = trace.stop_reason;
    out.iterations = trace.iterations;
    out.limit = trace.x_sequence.back();
    out.check = certify_fixed_point(space, maps, out.limit, rule.epsilon);
    return out;
  });
  for (const auto& r : result.runs)
    if (r.stop_reason != StopReason::converged) return result;
  const auto& first = result.runs.front();
  for (const auto& r : result.runs) {
    const double gap = space.cone().norm(space.distance(r.limit, first.limit));
    if (gap > tolerance) {
      if (first.check.certified && r.check.certified) {
        result.verdict = Uniqueness::non_unique;
        result.witnesses = {first.limit, r.limit};
      }
      return result;
    }
  }
  result.verdict = Uniqueness::unique;
  result.fixed_point = first.limit;
  return result;
}

/// Solve-level summary: the certified limit of one run plus rate bookkeeping.
template <class P>
struct Certificate {
  std::optional<P> fixed_point;
  double residual_norm = 0.0;
  double rate_h = 0.0;                      // rate enforced by the decay check
  std::optional<double> quoted_rate;        // delta / (1 - 2 delta), reported only
  double measured_rate = 0.0;
  bool cauchy_bound_ok = false;
  Uniqueness uniqueness = Uniqueness::unknown;
  std::vector<P> witnesses;
};

// ---------------------------------------------------------------------------
// Evidence about T's regularity. Sequential convergence quantifies over all
// sequences, so these probes can refute a declaration but never confirm it.

enum class Evidence { consistent, inconsistent, not_applicable };

inline const char* to_string(Evidence e) {
  switch (e) {
    case Evidence::consistent: return "consistent";
    case Evidence::inconsistent: return "inconsistent";
    case Evidence::not_applicable: return "not_applicable";
  }
  return "?";
}

struct NamedSequence {
  std::string name;
  std::vector<Point> terms;
};

struct DiagnosticProbes {
  std::size_t grid_points = 1000;  // injectivity grid on interval carriers
  double tolerance = 1e-12;        // T(x) = T(y) when |d(Tx,Ty)| <= tolerance
  std::size_t sequence_length = 64;
  std::size_t window = 8;
  double sequence_tolerance = 1e-9;
  bool builtin_sequences = true;
  std::vector<NamedSequence> sequences;
};

struct SequenceEvidence {
  std::string name;
  bool t_image_converges = false;
  bool sequence_converges = false;
  bool subsequence_converges = false;
  Evidence sequential = Evidence::not_applicable;
  Evidence subsequential = Evidence::not_applicable;
};

struct TDiagnostics {
  bool injective = true;
  std::size_t points_checked = 0;
  PairSet<Point> injectivity_violations;
  std::vector<SequenceEvidence> sequences;
  std::vector<std::string> declaration_conflicts;
};

/// Built-in probe sequences: one converging to an interior point, one
/// alternating between extremes, one running into the upper boundary.
inline std::vector<NamedSequence> builtin_probe_sequences(const ConeMetricSpace& space, std::size_t length) {
  const auto ext = space.extreme_points();
  const Point& lo = ext.front();
  const Point& hi = ext.back();
  NamedSequence convergent{"convergent", {}};
  NamedSequence alternating{"alternating", {}};
  NamedSequence boundary{"boundary", {}};
  if (space.is_finite()) {
    for (std::size_t n = 0; n < length; ++n) {
      convergent.terms.push_back(n < 3 ? (n % 2 ? hi : lo) : lo);
      alternating.terms.push_back(n % 2 ? hi : lo);
      boundary.terms.push_back(n < length / 2 ? (n % 2 ? lo : hi) : hi);
    }
    return {convergent, alternating, boundary};
  }
  for (std::size_t n = 0; n < length; ++n) {
    const double w = std::ldexp(1.0, -static_cast<int>(n));
    Point c(lo.size()), b(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) {
      const double mid = 0.5 * (lo[i] + hi[i]);
      c[i] = mid + (hi[i] - mid) * w;
      b[i] = hi[i] - (hi[i] - lo[i]) * w;
    }
    convergent.terms.push_back(std::move(c));
    alternating.terms.push_back(n % 2 ? hi : lo);
    boundary.terms.push_back(std::move(b));
  }
  return {convergent, alternating, boundary};
}

namespace detail {

inline bool tail_is_cauchy(const ConeMetricSpace& space, const std::vector<Point>& seq, std::size_t window,
                           double tol) {
  if (seq.size() < 2) return true;
  const std::size_t start = seq.size() > window ? seq.size() - window : 0;
  for (std::size_t i = start; i < seq.size(); ++i)
    for (std::size_t j = i + 1; j < seq.size(); ++j)
      if (space.cone().norm(space.distance(seq[i], seq[j])) > tol) return false;
  return true;
}

}  // namespace detail

inline TDiagnostics diagnose_T(const ConeMetricSpace& space, const MapPair& maps, const DiagnosticProbes& probes = {}) {
  TDiagnostics out;
  std::vector<Point> pts;
  if (const auto* iv = std::get_if<IntervalCarrier>(&space.carrier())) {
    const std::size_t g = std::max<std::size_t>(1, probes.grid_points);
    for (std::size_t i = 0; i <= g; ++i)
      pts.push_back({i == g ? iv->hi : iv->lo + (iv->hi - iv->lo) * (static_cast<double>(i) / static_cast<double>(g))});
  } else {
    pts = space.grid_points();
  }
  std::vector<Point> images;
  images.reserve(pts.size());
  for (const auto& p : pts) images.push_back(maps.T(p));
  out.points_checked = pts.size();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      if (space.cone().norm(space.distance(images[i], images[j])) <= probes.tolerance)
        out.injectivity_violations.emplace_back(pts[i], pts[j]);
  out.injective = out.injectivity_violations.empty();

  auto sequences = probes.sequences;
  if (probes.builtin_sequences) {
    auto builtin = builtin_probe_sequences(space, probes.sequence_length);
    sequences.insert(sequences.begin(), builtin.begin(), builtin.end());
  }
  for (const auto& seq : sequences) {
    SequenceEvidence ev;
    ev.name = seq.name;
    std::vector<Point> t_seq, even, odd;
    for (std::size_t n = 0; n < seq.terms.size(); ++n) {
      t_seq.push_back(maps.T(seq.terms[n]));
      (n % 2 ? odd : even).push_back(seq.terms[n]);
    }
    const std::size_t half_window = std::max<std::size_t>(2, probes.window / 2);
    ev.t_image_converges = detail::tail_is_cauchy(space, t_seq, probes.window, probes.sequence_tolerance);
    ev.sequence_converges = detail::tail_is_cauchy(space, seq.terms, probes.window, probes.sequence_tolerance);
    ev.subsequence_converges = ev.sequence_converges ||
                               detail::tail_is_cauchy(space, even, half_window, probes.sequence_tolerance) ||
                               detail::tail_is_cauchy(space, odd, half_window, probes.sequence_tolerance);
    if (ev.t_image_converges) {
      ev.sequential = ev.sequence_converges ? Evidence::consistent : Evidence::inconsistent;
      ev.subsequential = ev.subsequence_converges ? Evidence::consistent : Evidence::inconsistent;
    }
    out.sequences.push_back(std::move(ev));
  }

  const auto& decl = maps.declared();
  if (decl.t_injective && !out.injective) out.declaration_conflicts.push_back("T declared injective but T(x) = T(y) for x != y");
  for (const auto& ev : out.sequences) {
    if (decl.t_sequentially_convergent && ev.sequential == Evidence::inconsistent)
      out.declaration_conflicts.push_back("T declared sequentially convergent; probe '" + ev.name + "' disagrees");
    if (decl.t_subsequentially_convergent && ev.subsequential == Evidence::inconsistent)
      out.declaration_conflicts.push_back("T declared subsequentially convergent; probe '" + ev.name + "' disagrees");
  }
  return out;
}

}  // namespace conefix
