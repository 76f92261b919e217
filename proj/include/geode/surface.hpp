#pragma once

#include "geode/expr.hpp"
#include "geode/types.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace geode {

/// Optional axis-aligned coordinate ranges attached to a surface definition;
/// consumers (meshing, ruling solves, check grids) fall back to defaults when
/// a range is absent.
struct DomainHints {
  std::optional<std::array<double, 2>> x, y, z, v, omega;
};

struct NormalFieldSurface {
  Expression p, q, r;  // formulas in x, y, z
};

struct ImplicitSurface {
  Expression f;  // level function in x, y, z; normal = gradient
};

struct GraphSurface {
  Expression zeta;  // height z = zeta(x, y); normal (zeta_x, zeta_y, -1)
};

/// Surface of revolution about the z axis, profile z = z_of_v(v) with
/// v = sqrt(x^2 + y^2). The normal is (x, y, r(v)) with coefficient
/// r(v) = -v / z_of_v'(v); `r_of_v`, when present, supplies r directly.
struct RevolutionSurface {
  std::optional<Expression> z_of_v;
  std::optional<Expression> r_of_v;
};

/// One-parameter family of straight rulings y = A(w)x + C(w),
/// z = B(w)x + D(w). Cones have C = D = 0 and pass through the origin.
struct RuledFamily {
  Expression a, b;
  std::optional<Expression> c, d;
  bool is_cone() const { return !c.has_value() && !d.has_value(); }
};

/// Slopes (p, q) of the tangent plane dz = p dx + q dy along one ruling.
struct SlopePair {
  double p, q;
};

struct IntegrabilityReport {
  std::vector<Vec3> points;      // sample points (Frobenius check)
  std::vector<double> omegas;    // sample parameters (developability check)
  std::vector<double> residuals;
  double max_abs = 0.0;
  double tolerance = 0.0;
  bool integrable = false;
};

/// A surface in one of five presentations, each reduced to a normal field
/// n(x,y,z) = (p,q,r) with an exact spatial Jacobian. Immutable after
/// construction; all queries are pure and safe to share across threads.
class Surface {
 public:
  enum class Family { NormalField, Implicit, Graph, Revolution, Ruled };

  static Surface normal_field(Expression p, Expression q, Expression r);
  static Surface implicit(Expression f);
  static Surface graph(Expression zeta);
  static Surface revolution(Expression z_of_v);
  static Surface revolution_coefficient(Expression r_of_v);
  static Surface ruled(RuledFamily family);

  /// Load from the JSON schema documented in the README ("kind" plus
  /// kind-specific expression strings and optional "domain" hints).
  static Surface from_json_text(std::string_view text);
  std::string to_json_text() const;

  Family family() const;
  /// The "kind" string of the JSON schema ("implicit", "cone", ...).
  const std::string& kind_name() const { return kind_name_; }

  const DomainHints& domain() const { return domain_; }
  void set_domain(DomainHints d) { domain_ = std::move(d); }
  /// Ruling-parameter search range (hint or the default [-1.25, 1.25]).
  std::array<double, 2> omega_range() const;

  /// Normal field value; throws GeometryError when |n| < 1e-12.
  Vec3 normal_at(const Vec3& point) const;
  /// Entry (i,j) = d n_i / d x_j, exact via forward-mode differentiation.
  Mat3 normal_jacobian_at(const Vec3& point) const;
  /// Both of the above from one evaluation pass, with an optional warm-start
  /// ruling parameter threaded through by iterative callers.
  struct NormalData {
    Vec3 n;
    Mat3 jacobian;
    std::optional<double> omega;
  };
  NormalData normal_data(const Vec3& point,
                         std::optional<double> warm_omega = std::nullopt) const;

  /// Scalar obstruction to the normal field admitting integral surfaces:
  ///   p (q_z - r_y) + q (r_x - p_z) + r (p_y - q_x);
  /// identically zero for any gradient field.
  double integrability_residual(const Vec3& point) const;

  /// True for families carrying a scalar level function (implicit, graph,
  /// revolution with a profile).
  bool has_level() const;
  double level_at(const Vec3& point) const;
  /// Nearest-along-normal on-surface point with |level| below 1e-12 (graphs
  /// project vertically, which lands exactly in one step). Throws
  /// ConvergenceError after 20 Newton iterations.
  Vec3 project(const Vec3& point, int* iterations = nullptr) const;
  /// Level value where one exists; for ruled families the z-mismatch of the
  /// fitted ruling; zero for plain normal fields. Used as the trajectory
  /// diagnostic column.
  double constraint_residual(const Vec3& point) const;

  const NormalFieldSurface& normal_field_surface() const;
  const ImplicitSurface& implicit_surface() const;
  const GraphSurface& graph_surface() const;
  const RevolutionSurface& revolution_surface() const;
  const RuledFamily& ruled_family() const;

  /// Revolution coefficient r(v) and its derivative.
  Jet1 revolution_coefficient_at(double v) const;

 private:
  using Data = std::variant<NormalFieldSurface, ImplicitSurface, GraphSurface,
                            RevolutionSurface, RuledFamily>;
  explicit Surface(Data data, std::string kind);

  Data data_;
  std::string kind_name_;
  DomainHints domain_;
};

/// Developability residual A'D' - B'C' at each sample; the verdict compares
/// |residual| against `tolerance * max(1, |A'D'|)` sample-wise.
IntegrabilityReport validate_developable(const RuledFamily& family,
                                         std::span<const double> omega_samples,
                                         double tolerance = 1e-9);

/// Tangent-plane slopes q = B'/A', p = B - A q of a ruled family at `omega`.
/// Throws GeometryError when |A'| < 1e-12 (ruling degeneracy).
SlopePair slopes_from_family(const RuledFamily& family, double omega);

/// Solve A(w)x + C(w) = y for the ruling parameter through `point`
/// (Newton, seeded from `warm` or from a scan of `range`).
double ruling_parameter(const RuledFamily& family, const Vec3& point,
                        std::optional<double> warm,
                        const std::array<double, 2>& range);

}  // namespace geode
