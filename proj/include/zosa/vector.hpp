#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace zosa {

/// Dense, fixed-length, finite-valued real vector.
///
/// Every constructor rejects NaN/Inf entries with NonFiniteError, and every
/// arithmetic helper below returns a freshly validated Vector, so a Vector in
/// hand is always finite. Instances are immutable and safe to share.
class Vector {
 public:
  Vector() = default;
  explicit Vector(std::vector<double> values);
  Vector(std::initializer_list<double> values);

  static Vector zeros(std::size_t d);
  static Vector filled(std::size_t d, double value);

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }
  const std::vector<double>& data() const noexcept { return values_; }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<double> values_;
};

bool all_finite(std::span<const double> values) noexcept;

// Throws DimensionError unless a.size() == b.size().
void require_same_size(const Vector& a, const Vector& b);

double dot(const Vector& a, const Vector& b);
double squared_norm(const Vector& a) noexcept;
double norm(const Vector& a) noexcept;

Vector operator+(const Vector& a, const Vector& b);
Vector operator-(const Vector& a, const Vector& b);
Vector operator*(double s, const Vector& a);

// y + a * x
Vector axpy(double a, const Vector& x, const Vector& y);

// FNV-1a over the IEEE-754 bit patterns; identifies a parameter vector in
// error reports without dumping it.
std::uint64_t fingerprint(std::span<const double> values) noexcept;
inline std::uint64_t fingerprint(const Vector& v) noexcept { return fingerprint(v.values()); }

}  // namespace zosa
