#include "cavernsim/postprocess.hpp"

#include "cavernsim/error.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <locale>
#include <numbers>
#include <ostream>

namespace cavernsim {

FieldSnapshot make_snapshot(double t,
                            const Eigen::VectorXd& u,
                            const std::vector<ElementFields>& fields,
                            const std::vector<CreepStrain>& creep,
                            const std::vector<double>& damage,
                            const std::vector<double>& in_situ_pressure)
{
  FieldSnapshot s;
  s.t = t;
  s.u = u;
  const std::size_t n = fields.size();
  s.stress.reserve(n);
  s.strain.reserve(n);
  s.von_mises.reserve(n);
  s.eps_vol.reserve(n);
  s.damage.reserve(n);
  for (std::size_t e = 0; e < n; ++e) {
    StressState sig = fields[e].stress;
    if (!in_situ_pressure.empty()) {
      sig.xx -= in_situ_pressure[e];
      sig.yy -= in_situ_pressure[e];
      sig.zz -= in_situ_pressure[e];
    }
    s.stress.push_back(sig);
    s.strain.push_back(fields[e].strain);
    s.von_mises.push_back(von_mises(sig));
    s.eps_vol.push_back(creep.empty() ? 0.0 : volumetric_strain(creep[e].in_plane(), 0.0));
    s.damage.push_back(damage.empty() ? 0.0 : damage[e]);
  }
  s.permeability = permeability_field(s);
  return s;
}

std::vector<double> permeability_field(const FieldSnapshot& snapshot)
{
  std::vector<double> k;
  k.reserve(snapshot.eps_vol.size());
  for (double ev : snapshot.eps_vol) {
    k.push_back(permeability(ev));
  }
  return k;
}

namespace {

using Polygon = std::vector<Vec2>;

double signed_area(const Polygon& p)
{
  double a = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec2& s = p[i];
    const Vec2& t = p[(i + 1) % p.size()];
    a += s.x * t.y - t.x * s.y;
  }
  return 0.5 * a;
}

/// Signed integral of x over the polygon.
double signed_x_moment(const Polygon& p)
{
  double m = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec2& s = p[i];
    const Vec2& t = p[(i + 1) % p.size()];
    m += (s.x + t.x) * (s.x * t.y - t.x * s.y);
  }
  return m / 6.0;
}

/// Part of `p` with x >= x0 (sign = +1) or x <= x0 (sign = -1).
Polygon clip_half_plane(const Polygon& p, double x0, double sign)
{
  Polygon out;
  auto inside = [&](const Vec2& v) { return sign * (v.x - x0) >= 0.0; };
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec2& a = p[i];
    const Vec2& b = p[(i + 1) % p.size()];
    if (inside(a)) {
      out.push_back(a);
    }
    if (inside(a) != inside(b)) {
      const double s = (x0 - a.x) / (b.x - a.x);
      out.push_back({x0, a.y + s * (b.y - a.y)});
    }
  }
  return out;
}

} // namespace

std::vector<CavernVolume> cavern_volume(const Mesh& mesh, const Eigen::VectorXd& u)
{
  if (u.size() != mesh.dof_count()) {
    throw ValidationError("u", "displacement length does not match the mesh");
  }
  constexpr double axis_tolerance = 1e-6;
  std::vector<CavernVolume> out;
  for (const auto& loop : mesh.cavern_loops()) {
    Polygon poly;
    poly.reserve(loop.nodes.size());
    for (int n : loop.nodes) {
      const Vec2& p = mesh.node(n);
      poly.push_back({p.x + u[2 * n], p.y + u[2 * n + 1]});
    }
    CavernVolume v;
    if (loop.closed) {
      v.area = std::abs(signed_area(poly));
      const double xc = signed_x_moment(poly) / signed_area(poly);
      // average of the solids generated by the right and left halves
      const Polygon right = clip_half_plane(poly, xc, 1.0);
      const Polygon left = clip_half_plane(poly, xc, -1.0);
      const double right_moment = std::abs(signed_x_moment(right) - xc * signed_area(right));
      const double left_moment = std::abs(signed_x_moment(left) - xc * signed_area(left));
      v.volume = std::numbers::pi * (right_moment + left_moment);
    } else {
      const Vec2& first = mesh.node(loop.nodes.front());
      const Vec2& last = mesh.node(loop.nodes.back());
      if (std::abs(first.x) > axis_tolerance || std::abs(last.x) > axis_tolerance) {
        throw TopologyError("open cavern wall chain does not end on the symmetry axis");
      }
      v.area = std::abs(signed_area(poly));
      v.volume = 2.0 * std::numbers::pi * std::abs(signed_x_moment(poly));
    }
    out.push_back(v);
  }
  return out;
}

double volume_loss_percent(double initial, double current)
{
  return (initial - current) / initial * 100.0;
}

Vec2 interpolate_displacement(const Mesh& mesh, const ProbeLocation& where, const Eigen::VectorXd& u)
{
  const auto& nodes = mesh.element(where.element).nodes;
  Vec2 d;
  for (std::size_t k = 0; k < 3; ++k) {
    d.x += where.barycentric[k] * u[2 * nodes[k]];
    d.y += where.barycentric[k] * u[2 * nodes[k] + 1];
  }
  return d;
}

namespace {

std::ofstream open_for_writing(const std::string& path)
{
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot open " + path + " for writing");
  }
  return out;
}

void finish(std::ofstream& out, const std::string& path)
{
  out.flush();
  if (!out) {
    throw Error("write to " + path + " failed");
  }
}

void write_cell_scalars(std::ostream& out, const char* name, const std::vector<double>& values)
{
  out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
  for (double v : values) {
    out << v << '\n';
  }
}

} // namespace

void export_vtk(const Mesh& mesh, const FieldSnapshot& s, std::ostream& out)
{
  const auto n_nodes = static_cast<std::size_t>(mesh.node_count());
  const auto n_cells = static_cast<std::size_t>(mesh.element_count());
  if (static_cast<std::size_t>(s.u.size()) != 2 * n_nodes || s.von_mises.size() != n_cells) {
    throw ValidationError("snapshot", "array lengths do not match the mesh");
  }
  out.imbue(std::locale::classic());
  out << std::setprecision(17);
  out << "# vtk DataFile Version 3.0\n"
      << "cavernsim t_day=" << s.t << "\n"
      << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << n_nodes << " double\n";
  for (const auto& p : mesh.nodes()) {
    out << p.x << ' ' << p.y << " 0\n";
  }
  out << "CELLS " << n_cells << ' ' << 4 * n_cells << '\n';
  for (const auto& el : mesh.elements()) {
    out << "3 " << el.nodes[0] << ' ' << el.nodes[1] << ' ' << el.nodes[2] << '\n';
  }
  out << "CELL_TYPES " << n_cells << '\n';
  for (std::size_t e = 0; e < n_cells; ++e) {
    out << "5\n";
  }
  out << "POINT_DATA " << n_nodes << "\nVECTORS u double\n";
  for (std::size_t i = 0; i < n_nodes; ++i) {
    out << s.u[static_cast<Eigen::Index>(2 * i)] << ' ' << s.u[static_cast<Eigen::Index>(2 * i + 1)] << " 0\n";
  }
  out << "CELL_DATA " << n_cells << '\n';
  write_cell_scalars(out, "s_vm", s.von_mises);
  write_cell_scalars(out, "D", s.damage);
  write_cell_scalars(out, "k", s.permeability);
  write_cell_scalars(out, "eps_vol", s.eps_vol);
  std::vector<double> comp(n_cells);
  const std::pair<const char*, double StressState::*> components[] = {
    {"s_xx", &StressState::xx}, {"s_yy", &StressState::yy}, {"s_xy", &StressState::xy}, {"s_zz", &StressState::zz}};
  for (const auto& [name, member] : components) {
    for (std::size_t e = 0; e < n_cells; ++e) {
      comp[e] = s.stress[e].*member;
    }
    write_cell_scalars(out, name, comp);
  }
}

void export_vtk(const Mesh& mesh, const FieldSnapshot& snapshot, const std::string& path)
{
  auto out = open_for_writing(path);
  export_vtk(mesh, snapshot, out);
  finish(out, path);
}

void export_probe_csv(const std::vector<ProbeSample>& samples, std::ostream& out)
{
  out.imbue(std::locale::classic());
  out << std::setprecision(17);
  out << "t_day,probe,u_x,u_y,s_vm,D\n";
  for (const auto& s : samples) {
    out << s.t << ',' << s.probe << ',' << s.u_x << ',' << s.u_y << ',' << s.s_vm << ',' << s.damage << '\n';
  }
}

void export_probe_csv(const std::vector<ProbeSample>& samples, const std::string& path)
{
  auto out = open_for_writing(path);
  export_probe_csv(samples, out);
  finish(out, path);
}

} // namespace cavernsim
