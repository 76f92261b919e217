#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace geode {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Failure to parse a formula or a structured input file. `offset` is the
/// byte position of the first offending character.
struct ParseError : Error {
  std::size_t offset;
  ParseError(const std::string& what, std::size_t offset_);
};

/// Evaluation outside a function's domain: sqrt of a negative, log of a
/// non-positive, division by zero, or any non-finite intermediate.
struct DomainError : Error {
  using Error::Error;
};

/// Geometric precondition violation: degenerate normal, off-surface point,
/// apex ambiguity, unsupported family for the requested operation.
struct GeometryError : Error {
  using Error::Error;
};

/// An iterative scheme (Newton projection, ruling solve, shooting) exhausted
/// its budget without converging.
struct ConvergenceError : Error {
  using Error::Error;
};

/// Shortest decimal string that parses back to exactly `x` (locale-free).
std::string format_double(double x);

}  // namespace geode
