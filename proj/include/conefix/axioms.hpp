#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace conefix {

/// Seeded, reproducible sampling budget.
struct SamplingPlan {
  std::uint64_t seed = 1;
  std::size_t count = 10000;
};

struct AxiomViolation {
  std::string axiom;
  std::vector<std::vector<double>> witness;
  std::vector<double> residual;
};

struct AxiomReport {
  std::vector<std::string> axioms_checked;
  std::vector<AxiomViolation> violations;
  std::size_t sample_count = 0;

  bool passed() const noexcept { return violations.empty(); }

  std::size_t count(const std::string& axiom) const {
    std::size_t n = 0;
    for (const auto& v : violations) n += v.axiom == axiom;
    return n;
  }

  void merge(const AxiomReport& other) {
    for (const auto& a : other.axioms_checked) axioms_checked.push_back(a);
    violations.insert(violations.end(), other.violations.begin(), other.violations.end());
    sample_count += other.sample_count;
  }
};

/// Human-readable anchor for a violated axiom id.
inline std::string axiom_description(const std::string& id) {
  if (id == "P1") return "P1 cone is closed, nonempty and not {0}";
  if (id == "P2") return "P2 closed under nonnegative combinations";
  if (id == "P3") return "P3 pointed: P and -P meet only at 0";
  if (id == "interior") return "cone has nonempty interior";
  if (id == "d1") return "d1 positivity: d(x,y) in P, zero iff x = y";
  if (id == "d2") return "d2 symmetry: d(x,y) = d(y,x)";
  if (id == "d3") return "d3 triangle inequality: d(x,y) <= d(x,z) + d(z,y)";
  if (id == "T-into-carrier") return "T maps the carrier into itself";
  if (id == "S-into-carrier") return "S maps the carrier into itself";
  if (id == "T-injective") return "T is one to one";
  return id;
}

}  // namespace conefix
