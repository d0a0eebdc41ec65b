#pragma once

#include "cavernsim/mesh.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cavernsim {

/// Half profile of a cavern: `points[i] = (radius, depth below roof apex)`,
/// running from the roof apex (0, 0) to the floor apex (0, height).
class CavernProfile
{
public:
  CavernProfile() = default;

  /// Cylinder with hemispherical caps; `height` is apex to apex.
  static CavernProfile capsule(double radius, double height);
  /// Throws GeometryError-style ValidationError when the polyline does not
  /// start and end on the axis or has non-increasing depth.
  static CavernProfile from_points(std::vector<Vec2> points);

  const std::vector<Vec2>& points() const noexcept { return points_; }
  double height() const;
  double max_radius() const;
  /// Depth below the roof apex at which the radius is largest.
  double depth_of_max_radius() const;
  /// Volume of the solid of revolution about the profile axis.
  double revolved_volume() const;

  friend bool operator==(const CavernProfile&, const CavernProfile&) = default;

private:
  std::vector<Vec2> points_;
};

struct CavernPlacement
{
  CavernProfile profile;
  /// 0 places a half cavern on the symmetry axis; anything else a full
  /// cavern centred at this x.
  double center_x = 0.0;
  double roof_depth = 700.0;

  friend bool operator==(const CavernPlacement&, const CavernPlacement&) = default;
};

struct DomainSpec
{
  double width = 500.0;
  double top_depth = 500.0;
  double bottom_depth = 1150.0;
  std::vector<CavernPlacement> caverns;
  /// Element size far from the caverns [m].
  double far_size = 40.0;
  /// Far-field size divided by the size on the cavern wall.
  double refinement = 4.0;
  /// Growth of element size per metre of distance from the wall.
  double grading = 0.25;
  /// When set, the interior point count is tuned to hit this element count.
  std::optional<int> target_elements;
  std::uint32_t seed = 20240501;
  std::string material = "halite";

  friend bool operator==(const DomainSpec&, const DomainSpec&) = default;
};

/// Throws ValidationError for infeasible layouts (cavern outside the
/// domain, overlapping caverns).
Mesh generate_cavern_domain(const DomainSpec& spec);

/// Single half cavern on the axis with the given roof/floor cover.
DomainSpec single_cavern_domain(const CavernProfile& profile,
                                double top_depth,
                                double roof_thickness,
                                double floor_thickness,
                                double width);

/// Half cavern on the axis plus a full copy whose wall is `ctc` metres from
/// the first at their widest sections.
DomainSpec twin_cavern_domain(const CavernProfile& profile,
                              double ctc,
                              double top_depth,
                              double roof_thickness,
                              double floor_thickness,
                              double far_margin);

/// Seven probes A..G spread evenly by arc length along the first cavern
/// wall, A at the roof apex and G at the floor apex.
std::vector<Probe> default_probes(const Mesh& mesh);

struct RectangleTags
{
  BoundaryTag bottom = BoundaryTag::Bottom;
  BoundaryTag right = BoundaryTag::FarField;
  BoundaryTag top = BoundaryTag::Top;
  BoundaryTag left = BoundaryTag::SymmetryAxis;
};

/// Structured mesh of nx*ny squares, each split along its diagonal.
Mesh generate_rectangle(Vec2 origin,
                        double width,
                        double height,
                        int nx,
                        int ny,
                        const std::string& material = "halite",
                        RectangleTags tags = {});

/// Copy of `mesh` where every element whose centroid has y in [y_min, y_max]
/// uses `material`.
Mesh assign_material_band(const Mesh& mesh, double y_min, double y_max, const std::string& material);

} // namespace cavernsim
