#pragma once

#include <Eigen/Core>

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cavernsim {

/// Coordinates in metres. By convention `y` is elevation relative to the
/// ground surface, so depth = -y for the generated cavern domains.
struct Vec2
{
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

enum class BoundaryTag
{
  CavernWall,
  Bottom,
  SymmetryAxis,
  Top,
  FarField,
};

std::string_view to_string(BoundaryTag tag);
/// Throws ParseError (line 0) on an unknown name.
BoundaryTag boundary_tag_from_string(std::string_view name);

struct Element
{
  std::array<int, 3> nodes{};
  std::string material;

  friend bool operator==(const Element&, const Element&) = default;
};

struct BoundarySegment
{
  int a = 0;
  int b = 0;
  BoundaryTag tag = BoundaryTag::FarField;

  friend bool operator==(const BoundarySegment&, const BoundarySegment&) = default;
};

struct Probe
{
  std::string label;
  Vec2 position;

  friend bool operator==(const Probe&, const Probe&) = default;
};

/// Ordered wall polyline of one cavern. Half caverns (cut by the symmetry
/// axis) are open chains whose end nodes lie on the axis.
struct CavernLoop
{
  std::vector<int> nodes;
  bool closed = false;
};

/// Immutable triangulated domain. Construction validates the topology and
/// rewrites every element to counter-clockwise order.
class Mesh
{
public:
  Mesh() = default;
  Mesh(std::vector<Vec2> nodes,
       std::vector<Element> elements,
       std::vector<BoundarySegment> boundary,
       std::vector<Probe> probes = {});

  const std::vector<Vec2>& nodes() const noexcept { return nodes_; }
  const std::vector<Element>& elements() const noexcept { return elements_; }
  const std::vector<BoundarySegment>& boundary() const noexcept { return boundary_; }
  const std::vector<Probe>& probes() const noexcept { return probes_; }

  int node_count() const noexcept { return static_cast<int>(nodes_.size()); }
  int element_count() const noexcept { return static_cast<int>(elements_.size()); }
  int dof_count() const noexcept { return 2 * node_count(); }

  const Vec2& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  const Element& element(int id) const { return elements_.at(static_cast<std::size_t>(id)); }

  /// Element owning boundary segment `segment`.
  int segment_element(int segment) const { return segment_element_.at(static_cast<std::size_t>(segment)); }

  double element_area(int e) const;
  Vec2 centroid(int e) const;
  /// Longest edge length.
  double diameter(int e) const;
  double total_area() const;

  /// Connected CavernWall chains, ordered from the highest end node.
  std::vector<CavernLoop> cavern_loops() const;

  /// Copy with probes replaced.
  Mesh with_probes(std::vector<Probe> probes) const;

  friend bool operator==(const Mesh&, const Mesh&) = default;

private:
  void validate_and_orient();

  std::vector<Vec2> nodes_;
  std::vector<Element> elements_;
  std::vector<BoundarySegment> boundary_;
  std::vector<Probe> probes_;
  std::vector<int> segment_element_;
};

using BMatrix = Eigen::Matrix<double, 3, 6>;

struct ElementGeometry
{
  double area = 0.0;
  /// Maps (u1, v1, u2, v2, u3, v3) to (exx, eyy, gxy).
  BMatrix B;
};

/// Areas below this are treated as degenerate.
inline constexpr double degenerate_area = 1e-12;

ElementGeometry element_geometry(const Vec2& p1, const Vec2& p2, const Vec2& p3);
/// Throws DegenerateElementError.
ElementGeometry element_geometry(const Mesh& mesh, int e);

struct ProbeLocation
{
  int element = -1;
  std::array<double, 3> barycentric{};
};

/// Element containing `point` with clamped barycentric coordinates, or
/// nullopt when the point is outside the mesh.
std::optional<ProbeLocation> locate_probe(const Mesh& mesh, Vec2 point);

/// Reads the sectioned text format ($Nodes/$Elements/$Boundary/$Probes).
Mesh load_mesh(std::istream& in);
Mesh load_mesh_file(const std::string& path);
/// Writes with round-trip precision so a reload is bit-identical.
void save_mesh(const Mesh& mesh, std::ostream& out);
void save_mesh_file(const Mesh& mesh, const std::string& path);

} // namespace cavernsim
