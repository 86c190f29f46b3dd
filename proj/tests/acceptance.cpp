// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.
// Usage: conefix_acceptance [--seed N] [--report path]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "conefix/cli.hpp"
#include "conefix/generate.hpp"

using namespace conefix;
using io::Json;

namespace {

struct Criterion {
  Criterion(int i, std::string n) : id(i), name(std::move(n)) {}
  int id;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SuiteResult {
  std::vector<Criterion> criteria;
  Json report;
  std::vector<std::string> evidence;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Index of the first row that sits on `fp`, if any.
std::optional<std::size_t> first_hit(const IterationTrace<Point>& trace, const Point& fp) {
  for (std::size_t n = 0; n < trace.rows(); ++n)
    if (trace.x_sequence[n] == fp) return n;
  return std::nullopt;
}

Criterion axiom_suite(std::uint64_t seed, Json& rep) {
  Criterion c{1, "axiom suite"};
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t violations = 0;
  const SamplingPlan plan{seed, 10000};
  for (const auto& inst : {instances::a(), instances::b(), instances::c()}) {
    const auto space = make_space(inst);
    const auto m = verify_metric_axioms(space, plan);
    const auto k = verify_cone_axioms(inst.cone, plan);
    violations += m.violations.size() + k.violations.size();
    rep[inst.name] = {{"metric", m.violations.size()}, {"cone", k.violations.size()}, {"samples", m.sample_count}};
  }
  Rng rng = Rng::substream(seed, 1);
  Json gen = Json::array();
  for (int i = 0; i < 20; ++i) {
    const auto fin = random_finite_instance(rng);
    const auto m = verify_metric_axioms(fin);
    const auto k = verify_cone_axioms(fin.cone(), plan);
    violations += m.violations.size() + k.violations.size();
    gen.push_back({{"points", fin.size()}, {"violations", m.violations.size() + k.violations.size()}});
  }
  rep["generated"] = gen;
  const double elapsed = seconds_since(t0);
  c.passed = violations == 0 && elapsed < 5.0;
  c.detail = std::to_string(violations) + " violations, " + fmt("%.2f", elapsed) + " s (limit 5 s)";
  return c;
}

struct Corpus {
  std::vector<GeneratedInstance> items;
  std::size_t attempts = 0;
};

Corpus tz_corpus(std::uint64_t seed) {
  Corpus corpus;
  Rng rng = Rng::substream(seed, 2);
  while (corpus.items.size() < 100) {
    auto g = generate_certified(ClassKind::tz, rng);
    if (!g) break;
    corpus.attempts += g->attempts;
    corpus.items.push_back(std::move(*g));
  }
  return corpus;
}

Criterion reduction(const Corpus& corpus, Json& rep) {
  Criterion c{2, "Zamfirescu reduction, primary and dual"};
  std::size_t failures = 0, sole[3] = {0, 0, 0};
  for (const auto& g : corpus.items) {
    const auto& z = std::get<Zamfirescu<double>>(g.spec);
    const auto r = verify_zamfirescu_reduction(g.fin.exact_view(), g.fin.maps(), z.a, z.b, z.c, g.fin.all_pairs());
    if (!r.holds()) ++failures;
    for (int b = 0; b < 3; ++b) sole[b] += r.precondition.sole_branch_hits[b] > 0;
  }
  rep = {{"instances", corpus.items.size()},
         {"attempts", corpus.attempts},
         {"failures", failures},
         {"instances_with_sole_branch", {sole[0], sole[1], sole[2]}}};
  c.passed = corpus.items.size() == 100 && failures == 0;
  c.detail = std::to_string(corpus.items.size()) + " instances, " + std::to_string(failures) + " failing";
  return c;
}

Criterion geometric(Json& rep) {
  Criterion c{3, "geometric convergence on instance A"};
  const auto inst = instances::a();
  const auto space = make_space(inst);
  const auto trace = picard_iterate(space, make_maps(inst), Point{1.0}, inst.run.stopping_rule());
  double worst = 0.0;
  bool enough = trace.rows() >= 41;
  for (std::size_t n = 0; n <= 40 && n < trace.rows(); ++n) {
    const double want = std::ldexp(trace.gap_norms[0], -static_cast<int>(n));
    worst = std::max(worst, std::abs(trace.gap_norms[n] - want) / want);
  }
  const auto decay = geometric_decay_check(space, trace, 0.5, 1.0);
  rep = {{"rows", trace.rows()},
         {"max_relative_error", worst},
         {"per_step_ok", decay.per_step_ok},
         {"cauchy_ok", decay.cauchy_ok},
         {"cauchy_pairs", decay.cauchy_pairs_checked}};
  c.passed = enough && worst <= 1e-12 && decay.passed();
  c.detail = std::to_string(trace.rows()) + " rows, max rel error " + fmt("%.3g", worst) + ", decay " +
             (decay.per_step_ok ? "ok" : "FAILED") + ", Cauchy " + (decay.cauchy_ok ? "ok" : "FAILED") + " on " +
             std::to_string(decay.cauchy_pairs_checked) + " pairs";
  return c;
}

Criterion rate(const Corpus& corpus, Json& rep, std::vector<std::string>& evidence) {
  Criterion c{4, "measured rate within delta"};
  double worst_excess = -1.0;
  double worst_fraction = 0.0;
  std::size_t high_delta = 0, high_delta_evidence = 0, traces = 0;
  Json per = Json::array();
  for (std::size_t i = 0; i < corpus.items.size(); ++i) {
    const auto& g = corpus.items[i];
    const auto& z = std::get<Zamfirescu<double>>(g.spec);
    const double delta = to_double(zamfirescu_delta(Rational(z.a), Rational(z.b), Rational(z.c)));
    double ratio = 0.0;
    for (std::size_t s = 0; s < g.fin.size(); ++s) {
      const auto trace = picard_iterate(g.fin.approx_view(), g.fin.maps(), s, StoppingRule{});
      ratio = std::max(ratio, measured_rate(trace));
      ++traces;
    }
    worst_excess = std::max(worst_excess, ratio - delta);
    if (delta > 0) worst_fraction = std::max(worst_fraction, ratio / delta);
    const double quoted = quoted_zamfirescu_rate(delta);
    per.push_back({{"delta", delta}, {"measured", ratio}, {"quoted", std::isfinite(quoted) ? Json(quoted) : Json("inf")}});
    if (delta >= 1.0 / 3.0) {
      ++high_delta;
      if (ratio <= delta) {
        ++high_delta_evidence;
        evidence.push_back("instance " + std::to_string(i) + ": delta " + fmt("%.6g", delta) + ", measured " +
                           fmt("%.6g", ratio) + ", quoted " + (std::isfinite(quoted) ? fmt("%.6g", quoted) : "inf"));
      }
    }
  }
  rep = {{"traces", traces},
         {"max_ratio_minus_delta", worst_excess},
         {"max_ratio_over_delta", worst_fraction},
         {"instances_delta_at_least_third", high_delta},
         {"of_which_ratio_at_most_delta", high_delta_evidence},
         {"instances", per}};
  c.passed = !corpus.items.empty() && worst_excess <= 1e-9;
  c.detail = std::to_string(traces) + " traces, max ratio/delta " + fmt("%.4f", worst_fraction) + "; " +
             std::to_string(high_delta_evidence) + "/" + std::to_string(high_delta) +
             " instances with delta >= 1/3 stay at or below delta";
  return c;
}

Criterion oracle_equivalence(const Corpus& corpus, Json& rep) {
  Criterion c{5, "oracle and solver agree"};
  std::size_t bad = 0, max_steps = 0;
  for (std::size_t i = 0; i < corpus.items.size(); ++i) {
    const auto& g = corpus.items[i];
    const auto cv = cross_validate(g.fin, g.spec);
    if (!cv.passed() || cv.fixed_points.size() != 1 || g.fin.size() > 20) {
      ++bad;
      continue;
    }
    const Point fp = g.fin.labels()[cv.fixed_points.front()];
    const auto inst = to_instance(g.fin, "tz" + std::to_string(i), g.spec);
    const auto space = make_space(inst);
    const auto maps = make_maps(inst);
    for (const auto& start : g.fin.labels()) {
      const auto trace = picard_iterate(space, maps, start, StoppingRule{1e-12, 1000, 50});
      const auto hit = first_hit(trace, fp);
      if (!trace.converged() || !hit || *hit > 20 || trace.x_sequence.back() != fp) {
        ++bad;
        break;
      }
      max_steps = std::max(max_steps, *hit);
    }
  }
  rep = {{"instances", corpus.items.size()}, {"disagreements", bad}, {"max_steps", max_steps}};
  c.passed = !corpus.items.empty() && bad == 0;
  c.detail = std::to_string(bad) + " disagreements, longest orbit " + std::to_string(max_steps) + " steps";
  return c;
}

Criterion non_uniqueness(Json& rep) {
  Criterion c{6, "non-uniqueness on instance C"};
  const auto inst = instances::c();
  const auto fin = FiniteInstance::tabulate(make_space(inst), make_maps(inst));
  const auto cond = check_condition(fin.exact_view(), fin.maps(), ClassSpec{Weak<double>{0.5, 0.5}}, fin.all_pairs());
  const auto fps = enumerate_fixed_points(fin);
  std::vector<std::size_t> starts(fin.size());
  for (std::size_t i = 0; i < starts.size(); ++i) starts[i] = i;
  const auto probe = uniqueness_probe(fin.approx_view(), fin.maps(), starts, inst.run.stopping_rule());
  rep = {{"points", fin.size()},
         {"pairs", cond.pairs_checked},
         {"condition_holds", cond.holds()},
         {"fixed_points", fps.size()},
         {"verdict", to_string(probe.verdict)}};
  c.passed = fin.size() == 101 && cond.holds() && fps.size() == 101 && probe.verdict == Uniqueness::non_unique;
  c.detail = "TW(0.5,0.5) " + std::string(cond.holds() ? "holds" : "FAILS") + " on " +
             std::to_string(cond.pairs_checked) + " pairs, " + std::to_string(fps.size()) + " fixed points, " +
             to_string(probe.verdict);
  return c;
}

Criterion twu_uniqueness(std::uint64_t seed, Json& rep) {
  Criterion c{7, "TWU uniqueness"};
  Rng rng = Rng::substream(seed, 3);
  std::size_t made = 0, bad = 0;
  for (int i = 0; i < 20; ++i) {
    const auto g = generate_certified(ClassKind::twu, rng);
    if (!g) break;
    ++made;
    const auto cv = cross_validate(g->fin, g->spec);
    bool ok = cv.passed() && cv.fixed_points.size() == 1;
    for (const auto& lim : cv.orbit_limits) ok = ok && lim && *lim == cv.fixed_points.front();
    bad += !ok;
  }
  rep = {{"instances", made}, {"failures", bad}};
  c.passed = made == 20 && bad == 0;
  c.detail = std::to_string(made) + " instances, " + std::to_string(bad) + " failing";
  return c;
}

Criterion promotion(const Corpus& corpus, Json& rep) {
  Criterion c{8, "promotion soundness"};
  std::size_t checked = 0, failures = 0;
  auto check = [&](const FiniteInstance& fin, const ExactClassSpec& spec) {
    ++checked;
    if (!exhaustive_condition_check(fin, promote_to_weak(spec)).holds()) ++failures;
  };
  for (const auto& g : corpus.items) {
    check(g.fin, convert_spec<Rational>(g.spec));
    for (auto k : {ClassKind::tb, ClassKind::tk, ClassKind::tc}) {
      const auto t = tightest_constants(g.fin, k);
      if (t.feasible) check(g.fin, *t.exact_spec);
    }
  }
  rep = {{"specs_checked", checked}, {"failures", failures}};
  c.passed = checked > 0 && failures == 0;
  c.detail = std::to_string(checked) + " promoted specs, " + std::to_string(failures) + " failing";
  return c;
}

Criterion normal_constant(std::uint64_t seed, Json& rep) {
  Criterion c{9, "normal constant of the orthant"};
  const auto kmax = estimate_normal_constant(ConeSpec::orthant(2, NormKind::max), SamplingPlan{seed, 100000});
  const auto keuc = estimate_normal_constant(ConeSpec::orthant(2, NormKind::euclidean), SamplingPlan{seed, 100000});
  rep = {{"max", kmax.value}, {"euclidean", keuc.value}};
  c.passed = std::abs(kmax.value - 1.0) <= 1e-9 && std::abs(keuc.value - 1.0) <= 1e-9;
  c.detail = "max " + fmt("%.12g", kmax.value) + ", euclidean " + fmt("%.12g", keuc.value);
  return c;
}

std::string cli_reports(std::uint64_t seed) {
  std::string all;
  const std::string dir = CONEFIX_FIXTURES;
  const std::string s = std::to_string(seed);
  const std::vector<std::vector<std::string>> runs = {
      {"verify", "instance_a.json"}, {"verify", "instance_d_kannan.json"}, {"solve", "instance_a.json"},
      {"solve", "instance_b.json"},  {"oracle", "instance_d.json"},       {"fit", "instance_c.json"}};
  for (const auto& r : runs) {
    const std::string path = dir + "/" + r[1];
    const char* argv[] = {"conefix", r[0].c_str(), "--instance", path.c_str(), "--seed", s.c_str()};
    std::ostringstream out, err;
    cli::run_cli(6, argv, out, err);
    all += out.str();
  }
  return all;
}

SuiteResult run_suite(std::uint64_t seed) {
  SuiteResult res;
  Json& rep = res.report;
  rep["seed"] = seed;
  Json j;
  res.criteria.push_back(axiom_suite(seed, j));
  rep["axioms"] = j;
  const Corpus corpus = tz_corpus(seed);
  res.criteria.push_back(reduction(corpus, j = Json()));
  rep["reduction"] = j;
  res.criteria.push_back(geometric(j = Json()));
  rep["geometric"] = j;
  res.criteria.push_back(rate(corpus, j = Json(), res.evidence));
  rep["rate"] = j;
  res.criteria.push_back(oracle_equivalence(corpus, j = Json()));
  rep["oracle"] = j;
  res.criteria.push_back(non_uniqueness(j = Json()));
  rep["non_uniqueness"] = j;
  res.criteria.push_back(twu_uniqueness(seed, j = Json()));
  rep["twu"] = j;
  res.criteria.push_back(promotion(corpus, j = Json()));
  rep["promotion"] = j;
  res.criteria.push_back(normal_constant(seed, j = Json()));
  rep["normal_constant"] = j;
  rep["evidence"] = res.evidence;
  return res;
}

}  // namespace

int main(int argc, char** argv) {
  std::uint64_t seed = 1;
  std::optional<std::string> report_path;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) {
      seed = std::strtoull(argv[++i], nullptr, 10);
    } else if (std::strcmp(argv[i], "--report") == 0 && i + 1 < argc) {
      report_path = argv[++i];
    } else {
      std::cerr << "usage: conefix_acceptance [--seed N] [--report path]\n";
      return 2;
    }
  }

  const auto t0 = std::chrono::steady_clock::now();
  SuiteResult first = run_suite(seed);
  const std::string cli_first = cli_reports(seed);
  SuiteResult second = run_suite(seed);
  const std::string cli_second = cli_reports(seed);
  Criterion det{10, "determinism"};
  const std::string d1 = first.report.dump(2), d2 = second.report.dump(2);
  det.passed = d1 == d2 && cli_first == cli_second && !cli_first.empty();
  det.detail = "suite report " + std::to_string(d1.size()) + " bytes " + (d1 == d2 ? "identical" : "DIFFERS") +
               ", CLI reports " + std::to_string(cli_first.size()) + " bytes " +
               (cli_first == cli_second ? "identical" : "DIFFERS");
  first.criteria.push_back(det);

  bool all = true;
  Json summary = Json::array();
  for (const auto& c : first.criteria) {
    std::cout << (c.passed ? "PASS" : "FAIL") << " " << c.id << " " << c.name << ": " << c.detail << "\n";
    all = all && c.passed;
    summary.push_back({{"id", c.id}, {"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  for (std::size_t k = 0; k < std::min<std::size_t>(first.evidence.size(), 5); ++k)
    std::cout << "  evidence " << first.evidence[k] << "\n";
  if (first.evidence.size() > 5) std::cout << "  evidence ... " << first.evidence.size() - 5 << " more in the report\n";
  std::cout << "total " << fmt("%.2f", seconds_since(t0)) << " s\n";
  if (report_path) {
    Json out = first.report;
    out["criteria"] = summary;
    io::write_file(*report_path, out.dump(2) + "\n");
  }
  return all ? 0 : 1;
}
