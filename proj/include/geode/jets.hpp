#pragma once

#include "geode/types.hpp"

#include <cmath>

namespace geode {

// ---------------------------------------------------------------------------
// Jet1: second-order forward-mode scalar over one parameter.
// ---------------------------------------------------------------------------

/// Value together with first and second derivative with respect to a single
/// parameter. Arithmetic propagates both derivatives exactly.
struct Jet1 {
  double f = 0.0;
  double d = 0.0;
  double dd = 0.0;

  static Jet1 constant(double c) { return {c, 0.0, 0.0}; }
  static Jet1 variable(double x) { return {x, 1.0, 0.0}; }
};

inline Jet1 operator-(const Jet1& u) { return {-u.f, -u.d, -u.dd}; }
inline Jet1 operator+(const Jet1& u, const Jet1& w) {
  return {u.f + w.f, u.d + w.d, u.dd + w.dd};
}
inline Jet1 operator-(const Jet1& u, const Jet1& w) {
  return {u.f - w.f, u.d - w.d, u.dd - w.dd};
}
inline Jet1 operator*(const Jet1& u, const Jet1& w) {
  return {u.f * w.f, u.f * w.d + u.d * w.f, u.f * w.dd + 2.0 * u.d * w.d + u.dd * w.f};
}

/// Composition with a scalar function given by value and two derivatives.
inline Jet1 chain(const Jet1& u, double f, double d1, double d2) {
  return {f, d1 * u.d, d1 * u.dd + d2 * u.d * u.d};
}

inline Jet1 inverse(const Jet1& w) {
  const double inv = 1.0 / w.f;
  return chain(w, inv, -inv * inv, 2.0 * inv * inv * inv);
}
inline Jet1 operator/(const Jet1& u, const Jet1& w) { return u * inverse(w); }

inline Jet1 sin(const Jet1& u) {
  const double s = std::sin(u.f), c = std::cos(u.f);
  return chain(u, s, c, -s);
}
inline Jet1 cos(const Jet1& u) {
  const double s = std::sin(u.f), c = std::cos(u.f);
  return chain(u, c, -s, -c);
}
inline Jet1 tan(const Jet1& u) {
  const double t = std::tan(u.f);
  const double d1 = 1.0 + t * t;
  return chain(u, t, d1, 2.0 * t * d1);
}
inline Jet1 sqrt(const Jet1& u) {
  const double r = std::sqrt(u.f);
  return chain(u, r, 0.5 / r, -0.25 / (r * u.f));
}
inline Jet1 exp(const Jet1& u) {
  const double e = std::exp(u.f);
  return chain(u, e, e, e);
}
inline Jet1 log(const Jet1& u) {
  const double inv = 1.0 / u.f;
  return chain(u, std::log(u.f), inv, -inv * inv);
}
inline Jet1 atan(const Jet1& u) {
  const double q = 1.0 / (1.0 + u.f * u.f);
  return chain(u, std::atan(u.f), q, -2.0 * u.f * q * q);
}

inline double value_of(const Jet1& u) { return u.f; }
inline bool all_finite(const Jet1& u) {
  return std::isfinite(u.f) && std::isfinite(u.d) && std::isfinite(u.dd);
}

// ---------------------------------------------------------------------------
// Jet2: second-order forward-mode scalar over (x, y, z).
// ---------------------------------------------------------------------------

/// Packed index of the symmetric 3x3 Hessian: (0,0) (0,1) (0,2) (1,1) (1,2)
/// (2,2) map to 0..5. Both orderings of (i,j) address the same slot.
inline int packed_index(int i, int j) {
  if (i > j) std::swap(i, j);
  return i * (5 - i) / 2 + j;
}

/// Value, gradient over (x,y,z), and Hessian stored as six packed entries so
/// symmetry holds by construction.
struct Jet2 {
  double f = 0.0;
  Vec3 g = Vec3::Zero();
  Vec6 h = Vec6::Zero();

  static Jet2 constant(double c) {
    Jet2 r;
    r.f = c;
    return r;
  }
  static Jet2 variable(double x, int axis) {
    Jet2 r;
    r.f = x;
    r.g[axis] = 1.0;
    return r;
  }

  double hess(int i, int j) const { return h[packed_index(i, j)]; }
  Mat3 hess_matrix() const {
    Mat3 m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = hess(i, j);
    return m;
  }
};

/// Packed a_i*b_j + a_j*b_i (the symmetric part of an outer product, doubled
/// on the diagonal), as needed by the product rule.
inline Vec6 packed_sym_product(const Vec3& a, const Vec3& b) {
  Vec6 r;
  r << 2.0 * a[0] * b[0], a[0] * b[1] + a[1] * b[0], a[0] * b[2] + a[2] * b[0],
      2.0 * a[1] * b[1], a[1] * b[2] + a[2] * b[1], 2.0 * a[2] * b[2];
  return r;
}

/// Packed a_i*a_j, as needed by the second-order chain rule.
inline Vec6 packed_outer(const Vec3& a) {
  Vec6 r;
  r << a[0] * a[0], a[0] * a[1], a[0] * a[2], a[1] * a[1], a[1] * a[2], a[2] * a[2];
  return r;
}

inline Jet2 operator-(const Jet2& u) { return {-u.f, -u.g, -u.h}; }
inline Jet2 operator+(const Jet2& u, const Jet2& w) {
  return {u.f + w.f, u.g + w.g, u.h + w.h};
}
inline Jet2 operator-(const Jet2& u, const Jet2& w) {
  return {u.f - w.f, u.g - w.g, u.h - w.h};
}
inline Jet2 operator*(const Jet2& u, const Jet2& w) {
  Jet2 r;
  r.f = u.f * w.f;
  r.g = u.f * w.g + w.f * u.g;
  r.h = u.f * w.h + w.f * u.h + packed_sym_product(u.g, w.g);
  return r;
}

inline Jet2 chain(const Jet2& u, double f, double d1, double d2) {
  Jet2 r;
  r.f = f;
  r.g = d1 * u.g;
  r.h = d1 * u.h + d2 * packed_outer(u.g);
  return r;
}

inline Jet2 inverse(const Jet2& w) {
  const double inv = 1.0 / w.f;
  return chain(w, inv, -inv * inv, 2.0 * inv * inv * inv);
}
inline Jet2 operator/(const Jet2& u, const Jet2& w) { return u * inverse(w); }

inline Jet2 sin(const Jet2& u) {
  const double s = std::sin(u.f), c = std::cos(u.f);
  return chain(u, s, c, -s);
}
inline Jet2 cos(const Jet2& u) {
  const double s = std::sin(u.f), c = std::cos(u.f);
  return chain(u, c, -s, -c);
}
inline Jet2 tan(const Jet2& u) {
  const double t = std::tan(u.f);
  const double d1 = 1.0 + t * t;
  return chain(u, t, d1, 2.0 * t * d1);
}
inline Jet2 sqrt(const Jet2& u) {
  const double r = std::sqrt(u.f);
  return chain(u, r, 0.5 / r, -0.25 / (r * u.f));
}
inline Jet2 exp(const Jet2& u) {
  const double e = std::exp(u.f);
  return chain(u, e, e, e);
}
inline Jet2 log(const Jet2& u) {
  const double inv = 1.0 / u.f;
  return chain(u, std::log(u.f), inv, -inv * inv);
}
inline Jet2 atan(const Jet2& u) {
  const double q = 1.0 / (1.0 + u.f * u.f);
  return chain(u, std::atan(u.f), q, -2.0 * u.f * q * q);
}

inline double value_of(const Jet2& u) { return u.f; }
inline bool all_finite(const Jet2& u) {
  return std::isfinite(u.f) && u.g.allFinite() && u.h.allFinite();
}

// ---------------------------------------------------------------------------
// Plain double fallbacks so the expression evaluator can be scalar-generic.
// ---------------------------------------------------------------------------

inline double value_of(double u) { return u; }
inline bool all_finite(double u) { return std::isfinite(u); }

/// Integer power by binary exponentiation using only multiplication, so the
/// derivative arithmetic stays exact for any base sign.
template <class S>
S pow_int(S base, long n) {
  if (n < 0) return inverse(pow_int(base, -n));
  S result = S::constant(1.0);
  while (n > 0) {
    if (n & 1) result = result * base;
    base = base * base;
    n >>= 1;
  }
  return result;
}

inline double inverse(double w) { return 1.0 / w; }

template <>
inline double pow_int<double>(double base, long n) {
  if (n < 0) return 1.0 / pow_int(base, -n);
  double result = 1.0;
  while (n > 0) {
    if (n & 1) result *= base;
    base *= base;
    n >>= 1;
  }
  return result;
}

}  // namespace geode
