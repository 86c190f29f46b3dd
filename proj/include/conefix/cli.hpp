#pragma once

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "conefix/finite.hpp"
#include "conefix/instances.hpp"
#include "conefix/io/instance_file.hpp"
#include "conefix/io/report_json.hpp"
#include "conefix/io/trace_file.hpp"
#include "conefix/solver.hpp"

namespace conefix::cli {

enum ExitStatus : int { pass = 0, check_failed = 1, usage_error = 2 };

struct Options {
  std::string command;
  std::string instance_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<std::string> x0;
  std::optional<double> epsilon;
  std::optional<std::size_t> max_iter;
  std::optional<std::string> out;
  std::string format = "csv";
  std::optional<std::string> report;
  std::optional<std::string> fit_class;
  std::optional<double> pin;
};

struct Outcome {
  int status = pass;
  io::Json report;
  std::optional<std::string> artifact;  // trace text for solve
};

namespace detail {

inline Point parse_point(const std::string& text) {
  Point p;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      p.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--x0: '" + text + "' is not a comma-separated list of numbers");
    }
  }
  if (p.empty()) throw ConfigError("--x0 is empty");
  return p;
}

inline io::Json header(const std::string& command, const Instance& inst) {
  io::Json j;
  j["tool"] = "conefix";
  j["command"] = command;
  j["instance"] = inst.name;
  j["seed"] = inst.run.seed;
  j["samples"] = inst.run.samples;
  return j;
}

inline void finish(Outcome& o, bool ok) {
  o.status = ok ? pass : check_failed;
  o.report["status"] = ok ? "pass" : "fail";
}

inline bool promotable(const ClassSpec& spec) {
  const auto k = kind_of(spec);
  return k == ClassKind::tb || k == ClassKind::tk || k == ClassKind::tc || k == ClassKind::tz;
}

}  // namespace detail

inline Outcome run_verify(const Instance& inst) {
  Outcome o;
  o.report = detail::header("verify", inst);
  const auto plan = inst.run.sampling_plan();
  const auto space = make_space(inst);
  const auto maps = make_maps(inst);
  bool ok = true;

  const auto cone_axioms = verify_cone_axioms(inst.cone, plan);
  const auto metric_axioms = verify_metric_axioms(space, plan);
  const auto into = verify_maps_into_carrier(space, maps, plan);
  ok = ok && cone_axioms.passed() && metric_axioms.passed() && into.passed();
  o.report["cone_axioms"] = io::to_json(cone_axioms);
  o.report["metric_axioms"] = io::to_json(metric_axioms);
  o.report["maps_into_carrier"] = io::to_json(into);
  o.report["normal_constant"] = io::to_json(estimate_normal_constant(inst.cone, plan));

  if (into.passed()) {
    const auto diag = diagnose_T(space, maps);
    ok = ok && diag.declaration_conflicts.empty();
    o.report["t_diagnostics"] = io::to_json(diag);
  }
  if (inst.contraction && into.passed()) {
    const auto pairs = sample_pairs(space, plan);
    const auto cond = check_condition(space, maps, *inst.contraction, pairs);
    ok = ok && cond.holds();
    o.report["condition"] = io::to_json(cond);
    if (const auto* z = std::get_if<Zamfirescu<double>>(&*inst.contraction)) {
      const auto red = verify_zamfirescu_reduction(space, maps, z->a, z->b, z->c, pairs);
      ok = ok && (!red.applicable || red.holds());
      o.report["reduction"] = io::to_json(red, [](const Point& p) { return io::Json(p); });
    }
    if (detail::promotable(*inst.contraction) && cond.holds()) {
      const auto promoted = promote_to_weak(*inst.contraction);
      const auto weak = check_condition(space, maps, promoted, pairs);
      ok = ok && weak.holds();
      o.report["promotion"] = io::to_json(weak);
    }
  }
  detail::finish(o, ok);
  return o;
}

inline Outcome run_solve(const Instance& inst, io::TraceFormat format) {
  Outcome o;
  o.report = detail::header("solve", inst);
  const auto space = make_space(inst);
  const auto maps = make_maps(inst);
  const auto rule = inst.run.stopping_rule();
  const Point x0 = inst.run.x0 ? *inst.run.x0 : space.extreme_points().front();
  o.report["x0"] = x0;
  o.report["stopping_rule"] = {{"epsilon", rule.epsilon}, {"max_iter", rule.max_iter}, {"stall_window", rule.stall_window}};

  IterationTrace<Point> trace;
  try {
    trace = picard_iterate(space, maps, x0, rule);
  } catch (const DomainError& e) {
    o.report["error"] = e.what();
    detail::finish(o, false);
    return o;
  }
  const auto normal = estimate_normal_constant(inst.cone, inst.run.sampling_plan());
  const double K = std::max(1.0, normal.value);
  std::optional<double> h;
  if (inst.contraction) h = implied_rate(*inst.contraction);
  if (h && *h >= 1.0) h.reset();

  Certificate<Point> cert;
  cert.measured_rate = measured_rate(trace);
  if (h) cert.rate_h = *h;
  if (const auto* z = inst.contraction ? std::get_if<Zamfirescu<double>>(&*inst.contraction) : nullptr)
    cert.quoted_rate = quoted_zamfirescu_rate(zamfirescu_delta(z->a, z->b, z->c));
  const Point& last = trace.x_sequence.back();
  const auto check = certify_fixed_point(space, maps, last, rule.epsilon);
  cert.residual_norm = check.residual_norm;
  if (trace.converged() && check.certified) cert.fixed_point = last;

  bool ok = cert.fixed_point.has_value();
  io::Json decay_json = nullptr;
  if (h) {
    const auto decay = geometric_decay_check(space, trace, *h, K, 1e-9, 200000, inst.run.seed);
    cert.cauchy_bound_ok = decay.cauchy_ok;
    ok = ok && decay.passed();
    decay_json = io::to_json(decay);
  }
  std::vector<Point> starts = inst.run.starts.empty() ? std::vector<Point>{x0} : inst.run.starts;
  io::Json probe_json;
  try {
    const auto probe = uniqueness_probe(space, maps, starts, rule);
    cert.uniqueness = probe.verdict;
    cert.witnesses = probe.witnesses;
    probe_json = io::to_json(probe, [](const Point& p) { return io::Json(p); });
  } catch (const DomainError& e) {
    probe_json = {{"verdict", "unknown"}, {"error", e.what()}};
  }

  o.report["trace"] = {{"rows", trace.rows()},
                       {"iterations", trace.iterations},
                       {"stop_reason", to_string(trace.stop_reason)},
                       {"final_gap_norm", trace.gap_norms.back()},
                       {"t_image_limit", trace.t_images.back()}};
  o.report["certificate"] = {{"fixed_point", cert.fixed_point ? io::Json(*cert.fixed_point) : io::Json(nullptr)},
                             {"residual_norm", cert.residual_norm},
                             {"rate_h", h ? io::Json(*h) : io::Json(nullptr)},
                             {"quoted_rate", cert.quoted_rate ? io::Json(*cert.quoted_rate) : io::Json(nullptr)},
                             {"measured_rate", cert.measured_rate},
                             {"normal_constant", K},
                             {"cauchy_bound_ok", h ? io::Json(cert.cauchy_bound_ok) : io::Json(nullptr)},
                             {"uniqueness", to_string(cert.uniqueness)}};
  o.report["decay"] = decay_json;
  o.report["uniqueness_probe"] = probe_json;
  o.artifact = io::render_trace(trace, io::TraceBound{h, K}, format);
  detail::finish(o, ok);
  return o;
}

inline Outcome run_oracle(const Instance& inst) {
  Outcome o;
  o.report = detail::header("oracle", inst);
  const FiniteInstance fin = make_finite(inst);
  const auto label = io::label_of(fin);
  bool ok = true;
  const auto axioms = verify_metric_axioms(fin);
  ok = ok && axioms.passed();
  o.report["metric_axioms"] = io::to_json(axioms);
  io::Json fps = io::Json::array();
  for (std::size_t i : enumerate_fixed_points(fin)) fps.push_back(label(i));
  o.report["fixed_points"] = fps;
  o.report["t_injective"] = fin.t_injective();
  io::Json tight = io::Json::array();
  for (ClassKind k : {ClassKind::tb, ClassKind::tk, ClassKind::tc, ClassKind::tw, ClassKind::tw_dual, ClassKind::twu})
    tight.push_back(io::to_json(tightest_constants(fin, k), fin));
  o.report["tightest_constants"] = tight;
  if (inst.contraction) {
    const auto cv = cross_validate(fin, *inst.contraction);
    ok = ok && cv.passed();
    o.report["cross_validation"] = io::to_json(cv, fin);
    if (const auto* z = std::get_if<Zamfirescu<double>>(&*inst.contraction)) {
      const auto red = verify_zamfirescu_reduction(fin.exact_view(), fin.maps(), z->a, z->b, z->c, fin.all_pairs());
      ok = ok && (!red.applicable || red.holds());
      o.report["reduction"] = io::to_json(red, label);
    }
    if (detail::promotable(*inst.contraction) && cv.condition.holds()) {
      const auto weak = exhaustive_condition_check(fin, promote_to_weak(convert_spec<Rational>(*inst.contraction)));
      ok = ok && weak.holds();
      o.report["promotion"] = io::to_json(weak, label);
    }
  }
  detail::finish(o, ok);
  return o;
}

inline Outcome run_fit(const Instance& inst, const Options& opts) {
  Outcome o;
  o.report = detail::header("fit", inst);
  std::optional<ClassKind> kind = inst.run.fit_class;
  if (opts.fit_class) {
    kind = parse_class_kind(*opts.fit_class);
    if (!kind) throw ConfigError("--class must be one of TB, TK, TC, TW, TW_DUAL, TWU");
  }
  if (!kind && inst.contraction) kind = kind_of(*inst.contraction);
  if (!kind || *kind == ClassKind::tz) throw ConfigError("fit needs a class other than TZ (--class or run.fit_class)");
  FitOptions fo;
  fo.pinned_leading = opts.pin ? opts.pin : inst.run.fit_pinned;
  const auto space = make_space(inst);
  const auto maps = make_maps(inst);
  const auto pairs = sample_pairs(space, inst.run.sampling_plan());
  const auto fit = fit_constants(space, maps, *kind, pairs, fo);
  o.report["class"] = to_string(*kind);
  o.report["pinned"] = fo.pinned_leading ? io::Json(*fo.pinned_leading) : io::Json(nullptr);
  o.report["tolerance"] = fo.tolerance;
  o.report["fit"] = io::to_json(fit, [](const Point& p) { return io::Json(p); });
  if (space.is_finite()) {
    const FiniteInstance fin = make_finite(inst);
    std::optional<Rational> pinned;
    if (fo.pinned_leading) pinned = Rational(*fo.pinned_leading);
    o.report["exact"] = io::to_json(tightest_constants(fin, *kind, pinned), fin);
  }
  detail::finish(o, fit.status == FitStatus::fitted);
  return o;
}

/// Applies command-line overrides to the instance's run section.
inline void apply_overrides(Instance& inst, const Options& opts) {
  if (opts.seed) inst.run.seed = *opts.seed;
  if (opts.samples) {
    if (*opts.samples == 0) throw ConfigError("--samples must be >= 1");
    inst.run.samples = *opts.samples;
  }
  if (opts.epsilon) {
    if (!(*opts.epsilon > 0)) throw ConfigError("--epsilon must be > 0");
    inst.run.epsilon = *opts.epsilon;
  }
  if (opts.max_iter) {
    if (*opts.max_iter == 0) throw ConfigError("--max-iter must be >= 1");
    inst.run.max_iter = *opts.max_iter;
  }
  if (opts.x0) {
    const Point p = detail::parse_point(*opts.x0);
    if (!make_space(inst).contains(p)) throw ConfigError("--x0 is outside the carrier");
    inst.run.x0 = p;
  }
}

/// Runs one command end to end and writes its artifacts. Returns the exit
/// status: 0 when every requested check passed, 1 when one failed, 2 for
/// usage and configuration errors.
inline int execute(const Options& opts, std::ostream& out, std::ostream& err) {
  try {
    Instance inst = io::load_instance(opts.instance_path);
    apply_overrides(inst, opts);
    const io::TraceFormat format = opts.format == "json" ? io::TraceFormat::json : io::TraceFormat::csv;
    Outcome o;
    if (opts.command == "verify") {
      o = run_verify(inst);
    } else if (opts.command == "solve") {
      o = run_solve(inst, format);
    } else if (opts.command == "oracle") {
      if (!std::holds_alternative<FiniteCarrier>(inst.carrier)) {
        err << "conefix: oracle requires an instance with a finite carrier\n";
        return usage_error;
      }
      o = run_oracle(inst);
    } else {
      o = run_fit(inst, opts);
    }
    const std::string report = o.report.dump(2) + "\n";
    if (opts.command == "solve") {
      if (opts.out && o.artifact) io::write_file(*opts.out, *o.artifact);
      if (opts.report) {
        io::write_file(*opts.report, report);
      } else {
        out << report;
      }
    } else {
      if (opts.out) io::write_file(*opts.out, report);
      if (opts.report) io::write_file(*opts.report, report);
      if (!opts.out && !opts.report) out << report;
    }
    err << "conefix " << opts.command << ": " << (o.status == pass ? "pass" : "fail") << "\n";
    return o.status;
  } catch (const ConfigError& e) {
    err << "conefix: configuration error\n";
    for (const auto& p : e.problems()) err << "  " << p << "\n";
    return usage_error;
  } catch (const IoError& e) {
    err << "conefix: " << e.what() << ": " << e.path() << "\n";
    return usage_error;
  } catch (const DomainError& e) {
    err << "conefix: " << e.what() << "\n";
    return check_failed;
  }
}

/// Entry point usable in-process: parses argv and runs the command.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cone metric fixed-point toolkit"};
  Options opts;
  app.add_option("command", opts.command, "verify | solve | oracle | fit")
      ->required()
      ->check(CLI::IsMember({"verify", "solve", "oracle", "fit"}));
  app.add_option("--instance", opts.instance_path, "instance file (JSON)")->required();
  app.add_option("--seed", opts.seed, "sampling seed");
  app.add_option("--samples", opts.samples, "pairs / triples to sample");
  app.add_option("--x0", opts.x0, "start point, comma-separated coordinates");
  app.add_option("--epsilon", opts.epsilon, "stopping threshold");
  app.add_option("--max-iter", opts.max_iter, "iteration cap");
  app.add_option("--out", opts.out, "output path (trace for solve, report otherwise)");
  app.add_option("--format", opts.format, "trace format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--report", opts.report, "report path");
  app.add_option("--class", opts.fit_class, "class to fit (TB, TK, TC, TW, TW_DUAL, TWU)");
  app.add_option("--pin", opts.pin, "fix the leading constant when fitting TW, TW_DUAL or TWU");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? pass : usage_error;
  }
  return execute(opts, out, err);
}

}  // namespace conefix::cli
