#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "conefix/axioms.hpp"
#include "conefix/cone.hpp"
#include "conefix/contractions.hpp"
#include "conefix/finite.hpp"
#include "conefix/io/instance_file.hpp"
#include "conefix/solver.hpp"

namespace conefix::io {

inline constexpr std::size_t max_listed = 20;  // witnesses listed per report section

inline std::string rational_string(const Rational& r) { return r.str(); }

inline const char* class_description(ClassKind k) {
  switch (k) {
    case ClassKind::tb: return "TB: d(TSx,TSy) <= a d(Tx,Ty)";
    case ClassKind::tk: return "TK: d(TSx,TSy) <= b [d(Tx,TSx) + d(Ty,TSy)]";
    case ClassKind::tc: return "TC: d(TSx,TSy) <= c [d(Tx,TSy) + d(Ty,TSx)]";
    case ClassKind::tz: return "TZ: at least one of the TB, TK, TC inequalities holds for each pair";
    case ClassKind::tw: return "TW: d(TSx,TSy) <= delta d(Tx,Ty) + L d(Ty,TSx)";
    case ClassKind::tw_dual: return "TW_DUAL: d(TSx,TSy) <= delta d(Tx,Ty) + L d(Tx,TSy)";
    case ClassKind::twu: return "TWU: d(TSx,TSy) <= theta d(Tx,Ty) + L1 d(Tx,TSx)";
  }
  return "?";
}

inline Json to_json(const AxiomReport& r) {
  Json j;
  j["status"] = r.passed() ? "pass" : "fail";
  j["axioms_checked"] = r.axioms_checked;
  j["sample_count"] = r.sample_count;
  j["violation_count"] = r.violations.size();
  Json list = Json::array();
  for (std::size_t k = 0; k < std::min(r.violations.size(), max_listed); ++k) {
    const auto& v = r.violations[k];
    list.push_back({{"axiom", v.axiom}, {"anchor", axiom_description(v.axiom)}, {"witness", v.witness},
                    {"residual", v.residual}});
  }
  j["violations"] = list;
  return j;
}

/// Points are written by `label`, which maps a point of the report's space
/// to JSON (finite views report indices, which callers turn into labels).
template <class P, class Label>
Json to_json(const ConditionReport<P>& r, Label&& label) {
  Json j;
  j["class"] = class_json(r.spec);
  j["condition"] = class_description(kind_of(r.spec));
  j["status"] = r.inconclusive() ? "inconclusive" : (r.holds() ? "pass" : "fail");
  j["pairs_checked"] = r.pairs_checked;
  j["violation_count"] = r.violations.size();
  if (kind_of(r.spec) == ClassKind::tz) {
    j["branch_hits"] = r.branch_hits;
    j["sole_branch_hits"] = r.sole_branch_hits;
  }
  Json list = Json::array();
  for (std::size_t k = 0; k < std::min(r.violations.size(), max_listed); ++k) {
    const auto& v = r.violations[k];
    list.push_back({{"x", label(v.x)}, {"y", label(v.y)}, {"lhs", v.lhs.coords()}, {"rhs", v.rhs.coords()},
                    {"residual", v.residual.coords()}});
  }
  j["violations"] = list;
  return j;
}

inline Json to_json(const ConditionReport<Point>& r) {
  return to_json(r, [](const Point& p) { return Json(p); });
}

template <class P, class Label>
Json to_json(const ReductionReport<P>& r, Label&& label) {
  Json j;
  j["applicable"] = r.applicable;
  j["delta"] = r.delta;
  j["quoted_rate"] = r.delta < 0.5 ? Json(quoted_zamfirescu_rate(r.delta)) : Json(nullptr);
  j["status"] = !r.applicable ? "not_applicable" : (r.holds() ? "pass" : "fail");
  j["precondition"] = to_json(r.precondition, label);
  if (r.applicable) {
    j["primary"] = to_json(r.primary, label);
    j["primary"]["condition"] = "d(TSx,TSy) <= delta d(Tx,Ty) + 2 delta d(Tx,TSx)";
    j["dual"] = to_json(r.dual, label);
    j["dual"]["condition"] = "d(TSx,TSy) <= delta d(Tx,Ty) + 2 delta d(Tx,TSy)";
  }
  return j;
}

inline Json to_json(const NormalConstantEstimate& e) {
  return {{"value", e.value}, {"pairs", e.pairs}, {"inconclusive", e.inconclusive}};
}

inline Json to_json(const DecayReport& r) {
  Json j;
  j["status"] = r.passed() ? "pass" : "fail";
  j["h"] = r.h;
  j["K"] = r.K;
  j["per_step_ok"] = r.per_step_ok;
  j["cauchy_ok"] = r.cauchy_ok;
  j["cauchy_pairs_checked"] = r.cauchy_pairs_checked;
  j["first_step_failure"] = r.first_step_failure ? Json(*r.first_step_failure) : Json(nullptr);
  j["first_cauchy_failure"] =
      r.first_cauchy_failure ? Json({r.first_cauchy_failure->first, r.first_cauchy_failure->second}) : Json(nullptr);
  return j;
}

template <class P, class Label>
Json to_json(const UniquenessResult<P>& r, Label&& label) {
  Json j;
  j["verdict"] = to_string(r.verdict);
  j["fixed_point"] = r.fixed_point ? label(*r.fixed_point) : Json(nullptr);
  Json w = Json::array();
  for (const auto& p : r.witnesses) w.push_back(label(p));
  j["witnesses"] = w;
  Json runs = Json::array();
  for (const auto& run : r.runs)
    runs.push_back({{"start", label(run.start)},
                    {"stop_reason", to_string(run.stop_reason)},
                    {"iterations", run.iterations},
                    {"limit", label(run.limit)},
                    {"certified", run.check.certified},
                    {"residual_norm", run.check.residual_norm}});
  j["runs"] = runs;
  return j;
}

inline Json to_json(const TDiagnostics& d) {
  Json j;
  j["injective"] = d.injective;
  j["points_checked"] = d.points_checked;
  Json v = Json::array();
  for (std::size_t k = 0; k < std::min(d.injectivity_violations.size(), max_listed); ++k)
    v.push_back({d.injectivity_violations[k].first, d.injectivity_violations[k].second});
  j["injectivity_violations"] = v;
  j["injectivity_violation_count"] = d.injectivity_violations.size();
  Json seqs = Json::array();
  for (const auto& s : d.sequences)
    seqs.push_back({{"name", s.name},
                    {"t_image_converges", s.t_image_converges},
                    {"sequence_converges", s.sequence_converges},
                    {"subsequence_converges", s.subsequence_converges},
                    {"sequential", to_string(s.sequential)},
                    {"subsequential", to_string(s.subsequential)}});
  j["sequences"] = seqs;
  j["declaration_conflicts"] = d.declaration_conflicts;
  j["note"] = "probes can refute declared properties of T but never establish them";
  return j;
}

template <class P, class Label>
Json to_json(const FitResult<P>& r, Label&& label) {
  Json j;
  j["status"] = to_string(r.status);
  j["spec"] = r.spec ? class_json(*r.spec) : Json(nullptr);
  j["pairs_used"] = r.pairs_used;
  j["degenerate_pairs"] = r.degenerate_pairs;
  Json w = Json::array();
  for (std::size_t k = 0; k < std::min(r.witnesses.size(), max_listed); ++k)
    w.push_back({label(r.witnesses[k].first), label(r.witnesses[k].second)});
  j["witnesses"] = w;
  return j;
}

/// Finite-instance reports identify points by their carrier labels.
inline auto label_of(const FiniteInstance& fin) {
  return [&fin](std::size_t i) { return Json(fin.labels()[i]); };
}

inline Json to_json(const TightConstants& t, const FiniteInstance& fin) {
  Json j;
  j["class"] = to_string(t.kind);
  j["feasible"] = t.feasible;
  j["first"] = t.first ? Json(rational_string(*t.first)) : Json(nullptr);
  j["second"] = t.second ? Json(rational_string(*t.second)) : Json(nullptr);
  j["spec"] = t.spec ? class_json(*t.spec) : Json(nullptr);
  if (!t.reason.empty()) j["reason"] = t.reason;
  Json w = Json::array();
  const auto label = label_of(fin);
  for (std::size_t k = 0; k < std::min(t.witnesses.size(), max_listed); ++k)
    w.push_back({label(t.witnesses[k].first), label(t.witnesses[k].second)});
  j[t.feasible ? "binding_pairs" : "witnesses"] = w;
  return j;
}

inline Json to_json(const CrossValidation& c, const FiniteInstance& fin) {
  const auto label = label_of(fin);
  Json j;
  j["status"] = !c.applicable ? "not_applicable" : (c.passed() ? "pass" : "fail");
  if (!c.applicable) j["reason"] = c.reason;
  j["condition"] = to_json(c.condition, label);
  if (!c.applicable) return j;
  Json fps = Json::array();
  for (std::size_t i : c.fixed_points) fps.push_back(label(i));
  j["fixed_points"] = fps;
  j["fixed_point_exists"] = c.exists;
  j["uniqueness_expected"] = c.uniqueness_expected;
  j["uniqueness_ok"] = c.unique_ok;
  j["orbits_reach_fixed_point"] = c.orbits_ok;
  j["max_orbit_steps"] = c.orbit_steps.empty() ? 0 : *std::max_element(c.orbit_steps.begin(), c.orbit_steps.end());
  return j;
}

}  // namespace conefix::io
