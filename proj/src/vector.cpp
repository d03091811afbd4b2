#include "zosa/vector.hpp"

#include <cmath>
#include <cstring>

#include <fmt/format.h>

#include "zosa/errors.hpp"

namespace zosa {

namespace {

void require_finite(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw NonFiniteError(fmt::format("non-finite vector entry {} at index {}", values[i], i));
    }
  }
}

}  // namespace

Vector::Vector(std::vector<double> values) : values_(std::move(values)) {
  require_finite(values_);
}

Vector::Vector(std::initializer_list<double> values) : values_(values) {
  require_finite(values_);
}

Vector Vector::zeros(std::size_t d) { return filled(d, 0.0); }

Vector Vector::filled(std::size_t d, double value) {
  return Vector(std::vector<double>(d, value));
}

bool all_finite(std::span<const double> values) noexcept {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void require_same_size(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw DimensionError(fmt::format("vector length mismatch: {} vs {}", a.size(), b.size()));
  }
}

double dot(const Vector& a, const Vector& b) {
  require_same_size(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_norm(const Vector& a) noexcept {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

double norm(const Vector& a) noexcept { return std::sqrt(squared_norm(a)); }

Vector operator+(const Vector& a, const Vector& b) { return axpy(1.0, b, a); }

Vector operator-(const Vector& a, const Vector& b) { return axpy(-1.0, b, a); }

Vector operator*(double s, const Vector& a) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = s * a[i];
  return Vector(std::move(out));
}

Vector axpy(double a, const Vector& x, const Vector& y) {
  require_same_size(x, y);
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + a * x[i];
  return Vector(std::move(out));
}

std::uint64_t fingerprint(std::span<const double> values) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : values) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

}  // namespace zosa
