#include "cavernsim/loads.hpp"

#include "cavernsim/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cavernsim {

void validate(const GeostaticModel& m)
{
  if (!(m.overburden_density > 0.0)) {
    throw ValidationError("geostatic.overburden_density", "must be positive");
  }
  if (!(m.salt_density > 0.0)) {
    throw ValidationError("geostatic.salt_density", "must be positive");
  }
  if (!(m.salt_top_depth >= 0.0)) {
    throw ValidationError("geostatic.salt_top_depth", "must be >= 0");
  }
  if (!(m.g > 0.0)) {
    throw ValidationError("geostatic.g", "must be positive");
  }
  if (!(m.surface_temperature > 0.0)) {
    throw ValidationError("geostatic.surface_temperature", "must be positive");
  }
  if (!(m.temperature_gradient >= 0.0)) {
    throw ValidationError("geostatic.temperature_gradient", "must be >= 0");
  }
}

double lithostatic_pressure(const GeostaticModel& m, double depth)
{
  const double d = std::max(depth, 0.0);
  return m.g * (m.overburden_density * std::min(d, m.salt_top_depth) +
                m.salt_density * std::max(0.0, d - m.salt_top_depth));
}

double temperature_at(const GeostaticModel& m, double depth)
{
  return m.surface_temperature + m.temperature_gradient * depth;
}

double PressureSchedule::fraction_at(double t) const
{
  if (kind == Kind::Constant) {
    return p_min;
  }
  const double cycles = t / period;
  const double phase = cycles - std::floor(cycles);
  return phase < duty ? p_max : p_min;
}

std::vector<std::string> validate(const PressureSchedule& s)
{
  auto check_fraction = [](const char* key, double f) {
    if (!(f > 0.0 && f <= 1.0)) {
      std::ostringstream msg;
      msg << "fraction " << f << " outside (0, 1]";
      throw ValidationError(std::string("schedule.") + key, msg.str());
    }
  };
  std::vector<std::string> warnings;
  auto warn_window = [&](const char* key, double f) {
    if (f < admissible_min_fraction || f > admissible_max_fraction) {
      std::ostringstream msg;
      msg << "schedule." << key << " = " << f
          << " lies outside the admissible 24%-80% operating window (20% minimum accepted)";
      warnings.push_back(msg.str());
    }
  };

  if (s.kind == PressureSchedule::Kind::Constant) {
    check_fraction("fraction", s.p_min);
    warn_window("fraction", s.p_min);
    return warnings;
  }
  check_fraction("p_min", s.p_min);
  check_fraction("p_max", s.p_max);
  if (s.p_min > s.p_max) {
    throw ValidationError("schedule.p_min", "must not exceed p_max");
  }
  if (!(s.period > 0.0)) {
    throw ValidationError("schedule.period", "must be positive");
  }
  if (!(s.duty > 0.0 && s.duty < 1.0)) {
    throw ValidationError("schedule.duty", "must be in (0, 1)");
  }
  warn_window("p_min", s.p_min);
  warn_window("p_max", s.p_max);
  return warnings;
}

double cavern_pressure(const PressureSchedule& schedule,
                       const GeostaticModel& geo,
                       const FluidModel& fluid,
                       double t,
                       double depth,
                       double reference_depth)
{
  const double f = schedule.fraction_at(t);
  if (!(f > 0.0 && f <= 1.0)) {
    throw ValidationError("schedule", "fraction outside (0, 1]");
  }
  return f * lithostatic_pressure(geo, reference_depth) + fluid.density * geo.g * (depth - reference_depth);
}

namespace {

/// Outward unit normal and length of boundary segment `s`, using the
/// counter-clockwise orientation of its owning element.
std::pair<Vec2, double> outward_normal(const Mesh& mesh, int s)
{
  const auto& seg = mesh.boundary()[static_cast<std::size_t>(s)];
  const auto& nodes = mesh.element(mesh.segment_element(s)).nodes;
  int a = seg.a;
  int b = seg.b;
  bool forward = false;
  for (int k = 0; k < 3; ++k) {
    if (nodes[static_cast<std::size_t>(k)] == a && nodes[static_cast<std::size_t>((k + 1) % 3)] == b) {
      forward = true;
    }
  }
  if (!forward) {
    std::swap(a, b);
  }
  const Vec2& p = mesh.node(a);
  const Vec2& q = mesh.node(b);
  const double dx = q.x - p.x;
  const double dy = q.y - p.y;
  const double len = std::hypot(dx, dy);
  return {{dy / len, -dx / len}, len};
}

} // namespace

Eigen::VectorXd boundary_traction_forces(const Mesh& mesh,
                                         const std::vector<BoundaryTag>& tags,
                                         const TractionField& traction)
{
  Eigen::VectorXd f = Eigen::VectorXd::Zero(mesh.dof_count());
  const auto& boundary = mesh.boundary();
  for (int s = 0; s < static_cast<int>(boundary.size()); ++s) {
    const auto& seg = boundary[static_cast<std::size_t>(s)];
    if (std::find(tags.begin(), tags.end(), seg.tag) == tags.end()) {
      continue;
    }
    const auto [n, len] = outward_normal(mesh, s);
    const Vec2& p = mesh.node(seg.a);
    const Vec2& q = mesh.node(seg.b);
    const Vec2 mid{0.5 * (p.x + q.x), 0.5 * (p.y + q.y)};
    const Vec2 t = traction(mid, n);
    for (int node : {seg.a, seg.b}) {
      f[2 * node] += 0.5 * len * t.x;
      f[2 * node + 1] += 0.5 * len * t.y;
    }
  }
  return f;
}

Eigen::VectorXd traction_nodal_forces(const Mesh& mesh, const WallPressure& pressure)
{
  return boundary_traction_forces(mesh, {BoundaryTag::CavernWall}, [&](const Vec2& mid, const Vec2& n) {
    const double p = pressure(mid);
    return Vec2{-p * n.x, -p * n.y};
  });
}

Eigen::VectorXd body_force(const Mesh& mesh, const MaterialCatalog& catalog, double g)
{
  Eigen::VectorXd f = Eigen::VectorXd::Zero(mesh.dof_count());
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto& el = mesh.element(e);
    const double w = catalog.at(el.material).density * g * mesh.element_area(e) / 3.0;
    for (int node : el.nodes) {
      f[2 * node + 1] -= w;
    }
  }
  return f;
}

Eigen::VectorXd body_force(const Mesh& mesh, const BodyForceField& density)
{
  Eigen::VectorXd f = Eigen::VectorXd::Zero(mesh.dof_count());
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto& nodes = mesh.element(e).nodes;
    const double w = mesh.element_area(e) / 3.0;
    for (int k = 0; k < 3; ++k) {
      const Vec2& p = mesh.node(nodes[static_cast<std::size_t>(k)]);
      const Vec2& q = mesh.node(nodes[static_cast<std::size_t>((k + 1) % 3)]);
      const Vec2 b = density({0.5 * (p.x + q.x), 0.5 * (p.y + q.y)});
      // shape functions of the two edge ends are 1/2 at the midpoint
      for (int end : {k, (k + 1) % 3}) {
        const int node = nodes[static_cast<std::size_t>(end)];
        f[2 * node] += 0.5 * w * b.x;
        f[2 * node + 1] += 0.5 * w * b.y;
      }
    }
  }
  return f;
}

} // namespace cavernsim
