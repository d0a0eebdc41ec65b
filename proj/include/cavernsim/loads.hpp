#pragma once

#include "cavernsim/materials.hpp"
#include "cavernsim/mesh.hpp"

#include <Eigen/Core>

#include <functional>
#include <string>
#include <vector>

namespace cavernsim {

inline constexpr double gravity = 9.81;

struct GeostaticModel
{
  double overburden_density = 2200.0; // [kg/m^3]
  double salt_density = 2200.0;       // [kg/m^3]
  double salt_top_depth = 500.0;      // [m]
  double g = gravity;
  double surface_temperature = 283.15; // [K]
  double temperature_gradient = 0.0313; // [K/m]

  friend bool operator==(const GeostaticModel&, const GeostaticModel&) = default;
};

/// Throws ValidationError for non-positive densities or a negative gradient.
void validate(const GeostaticModel& model);

double lithostatic_pressure(const GeostaticModel& model, double depth);
double temperature_at(const GeostaticModel& model, double depth);

struct PressureSchedule
{
  enum class Kind
  {
    Constant,
    CyclicStep,
  };

  Kind kind = Kind::Constant;
  /// Constant fraction, or the low branch of a cyclic schedule.
  double p_min = 0.2;
  double p_max = 0.8;
  double period = 6.0; // [day]
  /// Fraction of the period spent at p_max, starting at every cycle start.
  double duty = 0.5;

  static PressureSchedule constant(double fraction) { return {Kind::Constant, fraction, fraction, 1.0, 1.0}; }
  static PressureSchedule cyclic(double p_min, double p_max, double period, double duty = 0.5)
  {
    return {Kind::CyclicStep, p_min, p_max, period, duty};
  }

  /// Fraction of lithostatic pressure at time `t` [day].
  double fraction_at(double t) const;

  friend bool operator==(const PressureSchedule&, const PressureSchedule&) = default;
};

/// Lower and upper edge of the admissible operating window.
inline constexpr double admissible_min_fraction = 0.20;
inline constexpr double admissible_max_fraction = 0.80;

/// Throws ValidationError when a fraction leaves (0, 1] or the cyclic
/// parameters are inconsistent. Returns warnings for fractions outside the
/// admissible window.
std::vector<std::string> validate(const PressureSchedule& schedule);

struct FluidModel
{
  double density = 8.0; // [kg/m^3]

  friend bool operator==(const FluidModel&, const FluidModel&) = default;
};

/// fraction(t) * p_litho(reference_depth) + rho_fluid g (depth - reference_depth).
double cavern_pressure(const PressureSchedule& schedule,
                       const GeostaticModel& geo,
                       const FluidModel& fluid,
                       double t,
                       double depth,
                       double reference_depth);

/// Pressure on the wall at a point (x, y).
using WallPressure = std::function<double(const Vec2&)>;

/// Nodal forces of a pressure acting on every CavernWall segment, pushing
/// into the rock. Each segment's pressure is evaluated at its midpoint and
/// the force p L n is split equally between its end nodes.
Eigen::VectorXd traction_nodal_forces(const Mesh& mesh, const WallPressure& pressure);

/// Same for any set of tags, with `traction(midpoint, outward_normal)`
/// returning the traction vector applied on the segment.
using TractionField = std::function<Vec2(const Vec2& midpoint, const Vec2& outward_normal)>;
Eigen::VectorXd boundary_traction_forces(const Mesh& mesh,
                                         const std::vector<BoundaryTag>& tags,
                                         const TractionField& traction);

/// Weight rho g A per element, split equally to its nodes (negative y).
Eigen::VectorXd body_force(const Mesh& mesh, const MaterialCatalog& catalog, double g = gravity);

/// Body force density b(x, y) [N/m^3] integrated with the 3-point
/// edge-midpoint rule against the linear shape functions.
using BodyForceField = std::function<Vec2(const Vec2&)>;
Eigen::VectorXd body_force(const Mesh& mesh, const BodyForceField& density);

} // namespace cavernsim
