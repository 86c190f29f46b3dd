#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "conefix/errors.hpp"
#include "conefix/numeric.hpp"

namespace conefix {

enum class NormKind { max, euclidean };

/// Element of the ordered space E = R^m. Floating coordinates must be finite.
template <class Scalar>
class BasicVector {
 public:
  using value_type = Scalar;

  BasicVector() = default;
  explicit BasicVector(std::size_t m) : coords_(m, Scalar(0)) {}
  BasicVector(std::initializer_list<Scalar> init) : coords_(init) { check_finite(); }
  explicit BasicVector(std::vector<Scalar> coords) : coords_(std::move(coords)) { check_finite(); }

  std::size_t size() const noexcept { return coords_.size(); }
  const Scalar& operator[](std::size_t i) const { return coords_[i]; }
  Scalar& operator[](std::size_t i) { return coords_[i]; }
  auto begin() const noexcept { return coords_.begin(); }
  auto end() const noexcept { return coords_.end(); }
  const std::vector<Scalar>& coords() const noexcept { return coords_; }

  bool is_zero() const {
    return std::all_of(coords_.begin(), coords_.end(), [](const Scalar& v) { return v == 0; });
  }

  BasicVector& operator+=(const BasicVector& o) {
    same_dimension(o);
    for (std::size_t i = 0; i < size(); ++i) coords_[i] += o.coords_[i];
    return *this;
  }
  BasicVector& operator-=(const BasicVector& o) {
    same_dimension(o);
    for (std::size_t i = 0; i < size(); ++i) coords_[i] -= o.coords_[i];
    return *this;
  }
  BasicVector& operator*=(const Scalar& k) {
    for (auto& v : coords_) v *= k;
    return *this;
  }

  friend BasicVector operator+(BasicVector a, const BasicVector& b) { return a += b; }
  friend BasicVector operator-(BasicVector a, const BasicVector& b) { return a -= b; }
  friend BasicVector operator*(const Scalar& k, BasicVector v) { return v *= k; }
  friend BasicVector operator-(BasicVector v) {
    for (auto& c : v.coords_) c = -c;
    return v;
  }
  friend bool operator==(const BasicVector& a, const BasicVector& b) { return a.coords_ == b.coords_; }

 private:
  void check_finite() const {
    if constexpr (std::is_floating_point_v<Scalar>) {
      for (const auto& v : coords_)
        if (!std::isfinite(v)) throw DomainError("non-finite coordinate in vector of E");
    }
  }
  void same_dimension(const BasicVector& o) const {
    if (o.size() != size())
      throw ConfigError("dimension mismatch: " + std::to_string(size()) + " vs " +
                        std::to_string(o.size()));
  }

  std::vector<Scalar> coords_;
};

using VectorE = BasicVector<double>;
using RationalVector = BasicVector<Rational>;

inline VectorE to_double(const VectorE& v) { return v; }
inline VectorE to_double(const RationalVector& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& c : v) out.push_back(to_double(c));
  return VectorE(std::move(out));
}

inline RationalVector to_exact(const VectorE& v) {
  std::vector<Rational> out;
  out.reserve(v.size());
  for (double c : v) out.emplace_back(c);
  return RationalVector(std::move(out));
}

inline double norm(const VectorE& v, NormKind kind) {
  double acc = 0.0;
  if (kind == NormKind::max) {
    for (double c : v) acc = std::max(acc, std::abs(c));
    return acc;
  }
  for (double c : v) acc = std::hypot(acc, c);
  return acc;
}

inline double norm(const RationalVector& v, NormKind kind) { return norm(to_double(v), kind); }

}  // namespace conefix
