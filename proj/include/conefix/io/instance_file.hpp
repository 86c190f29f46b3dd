#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "conefix/errors.hpp"
#include "conefix/instances.hpp"

namespace conefix::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* schema_version = "1";

namespace detail {

inline std::string join_path(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

inline std::string index_path(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

/// Collects every problem instead of stopping at the first.
class Reader {
 public:
  std::vector<std::string> problems;

  void fail(const std::string& path, const std::string& what) { problems.push_back(path + ": " + what); }

  bool object(const Json& j, const std::string& path) {
    if (j.is_object()) return true;
    fail(path, "expected an object");
    return false;
  }

  void keys(const Json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    for (const auto& item : j.items()) {
      bool known = false;
      for (const char* k : allowed) known = known || item.key() == k;
      if (!known) fail(join_path(path, item.key()), "unknown key");
    }
  }

  const Json* child(const Json& j, const std::string& path, const char* key, bool required) {
    const auto it = j.find(key);
    if (it == j.end()) {
      if (required) fail(join_path(path, key), "missing");
      return nullptr;
    }
    return &*it;
  }

  std::optional<double> number(const Json& j, const std::string& path) {
    if (!j.is_number()) {
      fail(path, "expected a number");
      return std::nullopt;
    }
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
      fail(path, "must be finite");
      return std::nullopt;
    }
    return v;
  }

  std::optional<double> number(const Json& j, const std::string& path, const char* key, bool required) {
    const Json* c = child(j, path, key, required);
    return c ? number(*c, join_path(path, key)) : std::nullopt;
  }

  std::optional<std::uint64_t> count(const Json& j, const std::string& path, const char* key, bool required) {
    const Json* c = child(j, path, key, required);
    if (c == nullptr) return std::nullopt;
    if (!c->is_number_unsigned() && !(c->is_number_integer() && c->get<std::int64_t>() >= 0)) {
      fail(join_path(path, key), "expected a nonnegative integer");
      return std::nullopt;
    }
    return c->get<std::uint64_t>();
  }

  std::optional<bool> boolean(const Json& j, const std::string& path, const char* key) {
    const Json* c = child(j, path, key, false);
    if (c == nullptr) return std::nullopt;
    if (!c->is_boolean()) {
      fail(join_path(path, key), "expected true or false");
      return std::nullopt;
    }
    return c->get<bool>();
  }

  std::optional<std::string> string(const Json& j, const std::string& path, const char* key, bool required) {
    const Json* c = child(j, path, key, required);
    if (c == nullptr) return std::nullopt;
    if (!c->is_string()) {
      fail(join_path(path, key), "expected a string");
      return std::nullopt;
    }
    return c->get<std::string>();
  }

  std::optional<std::vector<double>> vector(const Json& j, const std::string& path) {
    if (!j.is_array()) {
      fail(path, "expected an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    bool ok = true;
    for (std::size_t i = 0; i < j.size(); ++i) {
      const auto v = number(j[i], index_path(path, i));
      ok = ok && v.has_value();
      out.push_back(v.value_or(0.0));
    }
    return ok ? std::optional(out) : std::nullopt;
  }

  std::optional<std::vector<double>> vector(const Json& j, const std::string& path, const char* key, bool required) {
    const Json* c = child(j, path, key, required);
    return c ? vector(*c, join_path(path, key)) : std::nullopt;
  }

  /// A point is an array, or a bare number for one-dimensional carriers.
  std::optional<Point> point(const Json& j, const std::string& path) {
    if (j.is_number()) {
      const auto v = number(j, path);
      return v ? std::optional(Point{*v}) : std::nullopt;
    }
    return vector(j, path);
  }

  std::optional<std::vector<Point>> points(const Json& j, const std::string& path, const char* key, bool required) {
    const Json* c = child(j, path, key, required);
    if (c == nullptr) return std::nullopt;
    const std::string p = join_path(path, key);
    if (!c->is_array()) {
      fail(p, "expected an array of points");
      return std::nullopt;
    }
    std::vector<Point> out;
    bool ok = true;
    for (std::size_t i = 0; i < c->size(); ++i) {
      auto v = point((*c)[i], index_path(p, i));
      ok = ok && v.has_value();
      out.push_back(v.value_or(Point{}));
    }
    return ok ? std::optional(out) : std::nullopt;
  }
};

inline std::optional<NormKind> parse_norm(const std::string& s) {
  if (s == "max") return NormKind::max;
  if (s == "euclidean") return NormKind::euclidean;
  return std::nullopt;
}

inline const char* norm_name(NormKind k) { return k == NormKind::max ? "max" : "euclidean"; }

inline const char* rho_name(ScalarMetric r) {
  switch (r) {
    case ScalarMetric::abs: return "abs";
    case ScalarMetric::euclidean: return "euclidean";
    case ScalarMetric::max: return "max";
  }
  return "?";
}

inline std::optional<ConeSpec> read_cone(Reader& r, const Json& j) {
  const std::string path = "cone";
  if (!r.object(j, path)) return std::nullopt;
  r.keys(j, path, {"family", "dimension", "weights", "matrix", "norm", "interior_margin", "slack", "interior_point"});
  const auto family = r.string(j, path, "family", true);
  const auto dim = r.count(j, path, "dimension", false);
  NormKind norm = NormKind::max;
  if (const auto n = r.string(j, path, "norm", false)) {
    if (auto k = parse_norm(*n)) norm = *k;
    else r.fail(join_path(path, "norm"), "must be max or euclidean");
  }
  const auto margin = r.number(j, path, "interior_margin", false);
  const auto slack = r.number(j, path, "slack", false);
  const auto interior = r.vector(j, path, "interior_point", false);
  if (margin && !(*margin > 0)) r.fail(join_path(path, "interior_margin"), "must be > 0");
  if (slack && !(*slack >= 0)) r.fail(join_path(path, "slack"), "must be >= 0");
  if (!family) return std::nullopt;

  std::optional<ConeSpec> cone;
  try {
    if (*family == "orthant") {
      if (!dim) {
        r.fail(join_path(path, "dimension"), "missing");
      } else {
        cone = ConeSpec::orthant(*dim, norm);
      }
    } else if (*family == "scaled_orthant") {
      if (const auto w = r.vector(j, path, "weights", true)) {
        if (dim && *dim != w->size()) r.fail(join_path(path, "weights"), "length differs from dimension");
        cone = ConeSpec::scaled_orthant(*w, norm);
      }
    } else if (*family == "polyhedral") {
      const Json* m = r.child(j, path, "matrix", true);
      if (!dim) r.fail(join_path(path, "dimension"), "missing");
      if (m != nullptr) {
        const std::string mp = join_path(path, "matrix");
        if (!m->is_array()) {
          r.fail(mp, "expected an array of rows");
        } else {
          std::vector<std::vector<double>> rows;
          bool ok = true;
          for (std::size_t i = 0; i < m->size(); ++i) {
            auto row = r.vector((*m)[i], index_path(mp, i));
            ok = ok && row.has_value();
            rows.push_back(row.value_or(std::vector<double>{}));
          }
          if (ok && dim) {
            try {
              cone = ConeSpec::polyhedral(*dim, rows, norm);
            } catch (const ConfigError& e) {
              for (const auto& p : e.problems()) r.fail(mp, p);
            }
          }
        }
      }
    } else {
      r.fail(join_path(path, "family"), "must be orthant, scaled_orthant or polyhedral");
    }
    if (cone) {
      if (margin && *margin > 0) cone->with_margin(*margin);
      if (slack && *slack >= 0) cone->with_slack(*slack);
      if (interior) cone->with_interior_point(VectorE(*interior));
    }
  } catch (const ConfigError& e) {
    for (const auto& p : e.problems()) r.fail(path, p);
    return std::nullopt;
  } catch (const DomainError& e) {
    r.fail(path, e.what());
    return std::nullopt;
  }
  return cone;
}

inline std::optional<CarrierSpec> read_carrier(Reader& r, const Json& j, const std::string& path) {
  if (!r.object(j, path)) return std::nullopt;
  const auto kind = r.string(j, path, "kind", true);
  if (!kind) return std::nullopt;
  if (*kind == "interval") {
    r.keys(j, path, {"kind", "lo", "hi", "grid"});
    IntervalCarrier c;
    c.lo = r.number(j, path, "lo", false).value_or(c.lo);
    c.hi = r.number(j, path, "hi", false).value_or(c.hi);
    c.grid = r.count(j, path, "grid", false).value_or(c.grid);
    return c;
  }
  if (*kind == "box") {
    r.keys(j, path, {"kind", "lo", "hi", "grid"});
    BoxCarrier c;
    c.lo = r.vector(j, path, "lo", true).value_or(std::vector<double>{});
    c.hi = r.vector(j, path, "hi", true).value_or(std::vector<double>{});
    c.grid = r.count(j, path, "grid", false).value_or(c.grid);
    return c;
  }
  if (*kind == "finite") {
    r.keys(j, path, {"kind", "points", "size"});
    const auto pts = r.points(j, path, "points", false);
    const auto size = r.count(j, path, "size", false);
    if (pts && size) r.fail(path, "give either points or size, not both");
    if (pts) return FiniteCarrier{*pts};
    if (size) return FiniteCarrier::labels(*size);
    r.fail(path, "finite carrier needs points or size");
    return std::nullopt;
  }
  r.fail(join_path(path, "kind"), "must be interval, box or finite");
  return std::nullopt;
}

inline std::optional<MetricSpec> read_metric(Reader& r, const Json& j, const std::string& path) {
  if (!r.object(j, path)) return std::nullopt;
  const auto kind = r.string(j, path, "kind", true);
  if (!kind) return std::nullopt;
  if (*kind == "scaled") {
    r.keys(j, path, {"kind", "direction", "rho"});
    ScaledMetric m;
    const auto dir = r.vector(j, path, "direction", true);
    if (dir) m.direction = *dir;
    if (const auto rho = r.string(j, path, "rho", false)) {
      if (*rho == "abs") m.rho = ScalarMetric::abs;
      else if (*rho == "euclidean") m.rho = ScalarMetric::euclidean;
      else if (*rho == "max") m.rho = ScalarMetric::max;
      else r.fail(join_path(path, "rho"), "must be abs, euclidean or max");
    }
    return dir ? std::optional<MetricSpec>(m) : std::nullopt;
  }
  if (*kind == "tabulated") {
    r.keys(j, path, {"kind", "table"});
    const Json* t = r.child(j, path, "table", true);
    if (t == nullptr) return std::nullopt;
    const std::string tp = join_path(path, "table");
    if (!t->is_array()) {
      r.fail(tp, "expected an n x n array of vectors");
      return std::nullopt;
    }
    TabulatedMetric m;
    bool ok = true;
    for (std::size_t i = 0; i < t->size(); ++i) {
      const Json& row = (*t)[i];
      if (!row.is_array()) {
        r.fail(index_path(tp, i), "expected an array of vectors");
        ok = false;
        continue;
      }
      m.table.emplace_back();
      for (std::size_t k = 0; k < row.size(); ++k) {
        auto v = r.vector(row[k], index_path(index_path(tp, i), k));
        ok = ok && v.has_value();
        m.table.back().push_back(v.value_or(std::vector<double>{}));
      }
    }
    return ok ? std::optional<MetricSpec>(m) : std::nullopt;
  }
  r.fail(join_path(path, "kind"), "must be scaled or tabulated");
  return std::nullopt;
}

inline std::optional<MapSpec> read_map(Reader& r, const Json& j, const std::string& path) {
  if (!r.object(j, path)) return std::nullopt;
  const auto family = r.string(j, path, "family", true);
  if (!family) return std::nullopt;
  if (*family == "identity") {
    r.keys(j, path, {"family"});
    return MapSpec::identity();
  }
  if (*family == "affine") {
    r.keys(j, path, {"family", "alpha", "beta"});
    return MapSpec::affine(r.number(j, path, "alpha", false).value_or(1.0), r.number(j, path, "beta", false).value_or(0.0));
  }
  if (*family == "power") {
    r.keys(j, path, {"family", "exponent"});
    const auto p = r.number(j, path, "exponent", true);
    return p ? std::optional(MapSpec::power(*p)) : std::nullopt;
  }
  if (*family == "tabulated") {
    r.keys(j, path, {"family", "table"});
    const Json* t = r.child(j, path, "table", true);
    if (t == nullptr) return std::nullopt;
    const std::string tp = join_path(path, "table");
    if (!t->is_array()) {
      r.fail(tp, "expected an array of point indices");
      return std::nullopt;
    }
    std::vector<std::size_t> table;
    bool ok = true;
    for (std::size_t i = 0; i < t->size(); ++i) {
      const Json& v = (*t)[i];
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        r.fail(index_path(tp, i), "expected a point index");
        ok = false;
        continue;
      }
      table.push_back(v.get<std::size_t>());
    }
    return ok ? std::optional(MapSpec::tabulated(std::move(table))) : std::nullopt;
  }
  r.fail(join_path(path, "family"), "must be identity, affine, power or tabulated");
  return std::nullopt;
}

inline std::optional<ClassSpec> read_class(Reader& r, const Json& j) {
  const std::string path = "contraction";
  if (!r.object(j, path)) return std::nullopt;
  const auto name = r.string(j, path, "class", true);
  if (!name) return std::nullopt;
  const auto kind = parse_class_kind(*name);
  if (!kind) {
    r.fail(join_path(path, "class"), "must be one of TB, TK, TC, TZ, TW, TW_DUAL, TWU");
    return std::nullopt;
  }
  auto num = [&](const char* key) { return r.number(j, path, key, true).value_or(0.0); };
  const std::size_t before = r.problems.size();
  ClassSpec spec = Banach<double>{0.0};
  switch (*kind) {
    case ClassKind::tb: r.keys(j, path, {"class", "a"}); spec = Banach<double>{num("a")}; break;
    case ClassKind::tk: r.keys(j, path, {"class", "b"}); spec = Kannan<double>{num("b")}; break;
    case ClassKind::tc: r.keys(j, path, {"class", "c"}); spec = Chatterjea<double>{num("c")}; break;
    case ClassKind::tz:
      r.keys(j, path, {"class", "a", "b", "c"});
      spec = Zamfirescu<double>{num("a"), num("b"), num("c")};
      break;
    case ClassKind::tw: r.keys(j, path, {"class", "delta", "L"}); spec = Weak<double>{num("delta"), num("L")}; break;
    case ClassKind::tw_dual:
      r.keys(j, path, {"class", "delta", "L"});
      spec = WeakDual<double>{num("delta"), num("L")};
      break;
    case ClassKind::twu:
      r.keys(j, path, {"class", "theta", "L1"});
      spec = WeakUnique<double>{num("theta"), num("L1")};
      break;
  }
  if (r.problems.size() != before) return std::nullopt;
  for (const auto& p : range_errors(spec)) r.fail(path, p);
  return spec;
}

inline void read_run(Reader& r, const Json& j, RunConfig& run) {
  const std::string path = "run";
  if (!r.object(j, path)) return;
  r.keys(j, path, {"seed", "samples", "x0", "epsilon", "max_iter", "stall_window", "starts", "fit_class", "fit_pinned"});
  run.seed = r.count(j, path, "seed", false).value_or(run.seed);
  run.samples = r.count(j, path, "samples", false).value_or(run.samples);
  if (const Json* x0 = r.child(j, path, "x0", false)) run.x0 = r.point(*x0, join_path(path, "x0"));
  if (const auto e = r.number(j, path, "epsilon", false)) {
    if (*e > 0) run.epsilon = *e;
    else r.fail(join_path(path, "epsilon"), "must be > 0");
  }
  if (const auto m = r.count(j, path, "max_iter", false)) {
    if (*m >= 1) run.max_iter = *m;
    else r.fail(join_path(path, "max_iter"), "must be >= 1");
  }
  run.stall_window = r.count(j, path, "stall_window", false).value_or(run.stall_window);
  if (const auto s = r.points(j, path, "starts", false)) run.starts = *s;
  if (const auto fc = r.string(j, path, "fit_class", false)) {
    run.fit_class = parse_class_kind(*fc);
    if (!run.fit_class || *run.fit_class == ClassKind::tz)
      r.fail(join_path(path, "fit_class"), "must be one of TB, TK, TC, TW, TW_DUAL, TWU");
  }
  if (const auto p = r.number(j, path, "fit_pinned", false)) {
    if (*p >= 0 && *p < 1) run.fit_pinned = *p;
    else r.fail(join_path(path, "fit_pinned"), "must be in [0,1)");
  }
}

inline std::string position_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace detail

/// Parses and fully validates an instance file. Throws ConfigError listing
/// every problem found, each prefixed by its location in the document.
inline Instance parse_instance(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    throw ConfigError("syntax error at " + detail::position_of(text, byte) + " (byte " + std::to_string(e.byte) +
                      ")");
  }
  detail::Reader r;
  if (!r.object(j, "$")) throw ConfigError(std::move(r.problems));
  r.keys(j, "", {"schema_version", "name", "cone", "space", "maps", "contraction", "run"});
  if (const auto v = r.string(j, "", "schema_version", true); v && *v != schema_version)
    r.fail("schema_version", "unsupported version '" + *v + "'");
  const std::string name = r.string(j, "", "name", false).value_or("");

  std::optional<ConeSpec> cone;
  if (const Json* c = r.child(j, "", "cone", true)) cone = detail::read_cone(r, *c);

  std::optional<CarrierSpec> carrier;
  std::optional<MetricSpec> metric;
  if (const Json* s = r.child(j, "", "space", true); s && r.object(*s, "space")) {
    r.keys(*s, "space", {"carrier", "metric"});
    if (const Json* c = r.child(*s, "space", "carrier", true)) carrier = detail::read_carrier(r, *c, "space.carrier");
    if (const Json* m = r.child(*s, "space", "metric", true)) metric = detail::read_metric(r, *m, "space.metric");
  }

  std::optional<MapSpec> t_map, s_map;
  DeclaredProperties declared;
  if (const Json* m = r.child(j, "", "maps", true); m && r.object(*m, "maps")) {
    r.keys(*m, "maps", {"T", "S", "declared"});
    if (const Json* t = r.child(*m, "maps", "T", true)) t_map = detail::read_map(r, *t, "maps.T");
    if (const Json* s = r.child(*m, "maps", "S", true)) s_map = detail::read_map(r, *s, "maps.S");
    if (const Json* d = r.child(*m, "maps", "declared", false); d && r.object(*d, "maps.declared")) {
      const std::string dp = "maps.declared";
      r.keys(*d, dp, {"t_continuous", "t_injective", "t_sequentially_convergent", "t_subsequentially_convergent",
                      "s_continuous"});
      declared.t_continuous = r.boolean(*d, dp, "t_continuous").value_or(declared.t_continuous);
      declared.t_injective = r.boolean(*d, dp, "t_injective").value_or(declared.t_injective);
      declared.t_sequentially_convergent =
          r.boolean(*d, dp, "t_sequentially_convergent").value_or(declared.t_sequentially_convergent);
      declared.t_subsequentially_convergent =
          r.boolean(*d, dp, "t_subsequentially_convergent").value_or(declared.t_subsequentially_convergent);
      declared.s_continuous = r.boolean(*d, dp, "s_continuous").value_or(declared.s_continuous);
    }
  }

  std::optional<ClassSpec> contraction;
  if (const Json* c = r.child(j, "", "contraction", false)) contraction = detail::read_class(r, *c);

  RunConfig run;
  if (const Json* rj = r.child(j, "", "run", false)) detail::read_run(r, *rj, run);

  // Cross-section checks need the pieces above.
  if (cone && carrier && metric) {
    try {
      const ConeMetricSpace space(*cone, *carrier, *metric);
      if (t_map && s_map) {
        try {
          (void)MapPair::from_specs(*t_map, *s_map, *carrier, declared);
        } catch (const ConfigError& e) {
          for (const auto& p : e.problems()) r.fail("maps", p);
        }
      }
      auto check_point = [&](const Point& p, const std::string& where) {
        if (!space.contains(p)) r.fail(where, "point is outside the carrier");
      };
      if (run.x0) check_point(*run.x0, "run.x0");
      for (std::size_t i = 0; i < run.starts.size(); ++i) check_point(run.starts[i], detail::index_path("run.starts", i));
    } catch (const ConfigError& e) {
      for (const auto& p : e.problems()) r.fail("space", p);
    }
  }
  if (!r.problems.empty()) throw ConfigError(std::move(r.problems));
  return Instance{name, *cone, *carrier, *metric, *t_map, *s_map, declared, contraction, run};
}

inline Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read instance file", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str());
}

inline Json point_json(const Point& p) { return Json(p); }

inline Json class_json(const ClassSpec& spec) {
  Json j;
  j["class"] = to_string(kind_of(spec));
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Banach<double>>) {
          j["a"] = s.a;
        } else if constexpr (std::is_same_v<T, Kannan<double>>) {
          j["b"] = s.b;
        } else if constexpr (std::is_same_v<T, Chatterjea<double>>) {
          j["c"] = s.c;
        } else if constexpr (std::is_same_v<T, Zamfirescu<double>>) {
          j["a"] = s.a;
          j["b"] = s.b;
          j["c"] = s.c;
        } else if constexpr (std::is_same_v<T, WeakUnique<double>>) {
          j["theta"] = s.theta;
          j["L1"] = s.L1;
        } else {
          j["delta"] = s.delta;
          j["L"] = s.L;
        }
      },
      spec);
  return j;
}

inline Json map_json(const MapSpec& m) {
  Json j;
  switch (m.family) {
    case MapFamily::identity: j["family"] = "identity"; break;
    case MapFamily::affine:
      j["family"] = "affine";
      j["alpha"] = m.alpha;
      j["beta"] = m.beta;
      break;
    case MapFamily::power:
      j["family"] = "power";
      j["exponent"] = m.exponent;
      break;
    case MapFamily::tabulated:
      j["family"] = "tabulated";
      j["table"] = m.table;
      break;
  }
  return j;
}

/// Inverse of parse_instance: parse_instance(emit_instance(x).dump()) == x.
inline Json emit_instance(const Instance& inst) {
  Json j;
  j["schema_version"] = schema_version;
  j["name"] = inst.name;
  Json cone;
  const ConeSpec& c = inst.cone;
  switch (c.family()) {
    case ConeFamily::orthant: cone["family"] = "orthant"; break;
    case ConeFamily::scaled_orthant: cone["family"] = "scaled_orthant"; break;
    case ConeFamily::polyhedral: cone["family"] = "polyhedral"; break;
  }
  cone["dimension"] = c.dimension();
  if (c.family() == ConeFamily::scaled_orthant) cone["weights"] = c.weights();
  if (c.family() == ConeFamily::polyhedral) cone["matrix"] = c.rows();
  cone["norm"] = detail::norm_name(c.norm_kind());
  cone["interior_margin"] = c.interior_margin();
  cone["slack"] = c.slack();
  if (c.declared_interior_point()) cone["interior_point"] = c.declared_interior_point()->coords();
  j["cone"] = cone;

  Json carrier;
  if (const auto* iv = std::get_if<IntervalCarrier>(&inst.carrier)) {
    carrier = {{"kind", "interval"}, {"lo", iv->lo}, {"hi", iv->hi}, {"grid", iv->grid}};
  } else if (const auto* bx = std::get_if<BoxCarrier>(&inst.carrier)) {
    carrier = {{"kind", "box"}, {"lo", bx->lo}, {"hi", bx->hi}, {"grid", bx->grid}};
  } else {
    carrier = {{"kind", "finite"}, {"points", std::get<FiniteCarrier>(inst.carrier).points}};
  }
  Json metric;
  if (const auto* sm = std::get_if<ScaledMetric>(&inst.metric)) {
    metric = {{"kind", "scaled"}, {"direction", sm->direction}, {"rho", detail::rho_name(sm->rho)}};
  } else {
    metric = {{"kind", "tabulated"}, {"table", std::get<TabulatedMetric>(inst.metric).table}};
  }
  j["space"] = {{"carrier", carrier}, {"metric", metric}};

  const auto& d = inst.declared;
  j["maps"] = {{"T", map_json(inst.t_map)},
               {"S", map_json(inst.s_map)},
               {"declared",
                {{"t_continuous", d.t_continuous},
                 {"t_injective", d.t_injective},
                 {"t_sequentially_convergent", d.t_sequentially_convergent},
                 {"t_subsequentially_convergent", d.t_subsequentially_convergent},
                 {"s_continuous", d.s_continuous}}}};
  if (inst.contraction) j["contraction"] = class_json(*inst.contraction);

  const auto& r = inst.run;
  Json run;
  run["seed"] = r.seed;
  run["samples"] = r.samples;
  if (r.x0) run["x0"] = *r.x0;
  run["epsilon"] = r.epsilon;
  run["max_iter"] = r.max_iter;
  run["stall_window"] = r.stall_window;
  run["starts"] = r.starts;
  if (r.fit_class) run["fit_class"] = to_string(*r.fit_class);
  if (r.fit_pinned) run["fit_pinned"] = *r.fit_pinned;
  j["run"] = run;
  return j;
}

}  // namespace conefix::io
