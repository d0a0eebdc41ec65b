#include "cavernsim/error.hpp"
#include "cavernsim/mesher.hpp"
#include "cavernsim/postprocess.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace cavernsim;

namespace {

Mesh base_mesh()
{
  DomainSpec spec = single_cavern_domain(CavernProfile::capsule(25.0, 250.0), 500.0, 200.0, 200.0, 500.0);
  spec.target_elements = 1960;
  return generate_cavern_domain(spec);
}

// Radial inward displacement of the cavern wall nodes by `delta`, measured
// from the cavern axis x = 0.
Eigen::VectorXd shrink_wall(const Mesh& m, double delta)
{
  Eigen::VectorXd u = Eigen::VectorXd::Zero(m.dof_count());
  for (const auto& s : m.boundary()) {
    if (s.tag != BoundaryTag::CavernWall) {
      continue;
    }
    for (int n : {s.a, s.b}) {
      u[2 * n] = m.node(n).x > 1e-9 ? -delta : 0.0;
    }
  }
  return u;
}

std::vector<std::string> lines(const std::string& text)
{
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) {
    out.push_back(l);
  }
  return out;
}

} // namespace

TEST_SUITE("postprocess")
{
  TEST_CASE("volume loss percent")
  {
    CHECK(volume_loss_percent(100.0, 97.5) == doctest::Approx(2.5));
    CHECK(volume_loss_percent(100.0, 100.0) == 0.0);
  }

  TEST_CASE("zero displacement keeps the initial volume")
  {
    const Mesh m = base_mesh();
    const auto v0 = cavern_volume(m, Eigen::VectorXd::Zero(m.dof_count()));
    REQUIRE(v0.size() == 1);
    CHECK(v0[0].area == doctest::Approx(25.0 * 200.0 + std::numbers::pi * 625.0 / 2.0).epsilon(0.01));
  }

  TEST_CASE("uniform radial shrinkage of the straight wall")
  {
    // shrinking the radius by delta on the cylindrical part removes about
    // 2 delta / R of its revolved volume
    const Mesh m = base_mesh();
    const double delta = 0.05;
    const auto v0 = cavern_volume(m, Eigen::VectorXd::Zero(m.dof_count()));
    const auto v1 = cavern_volume(m, shrink_wall(m, delta));
    const double loss = (v0[0].volume - v1[0].volume) / v0[0].volume;
    CHECK(loss == doctest::Approx(2.0 * delta / 25.0).epsilon(0.1));
    CHECK(v1[0].area < v0[0].area);
  }

  TEST_CASE("make_snapshot adds the in-situ pressure to the stress")
  {
    ElementFields f;
    f.stress = {1e6, -2e6, 3e5, 0.5e6};
    const Eigen::VectorXd u = Eigen::VectorXd::Zero(6);
    const auto s = make_snapshot(1.0, u, {f}, {CreepStrain{}}, {0.0}, {10e6});
    CHECK(s.stress[0].xx == doctest::Approx(-9e6));
    CHECK(s.stress[0].yy == doctest::Approx(-12e6));
    CHECK(s.stress[0].zz == doctest::Approx(-9.5e6));
    CHECK(s.stress[0].xy == doctest::Approx(3e5));
    // the isotropic part does not change the von Mises stress
    CHECK(s.von_mises[0] == doctest::Approx(von_mises(f.stress)));
  }

  TEST_CASE("permeability follows the creep dilatancy")
  {
    ElementFields f;
    const Eigen::VectorXd u = Eigen::VectorXd::Zero(6);
    const CreepStrain c{1e-3, 0.0, 0.0, -1e-3};
    const auto s = make_snapshot(0.0, u, {f, f}, {c, CreepStrain{}}, {0.0, 0.0});
    CHECK(s.eps_vol[0] == doctest::Approx(1e-3));
    CHECK(s.eps_vol[1] == 0.0);
    const auto k = permeability_field(s);
    CHECK(k[0] == doctest::Approx(2.13e-17));
    CHECK(k[1] == 0.0);
    CHECK(s.permeability == k);
  }

  TEST_CASE("VTK export of a single triangle")
  {
    std::istringstream in("$Nodes 3\n0 0 0\n1 1.25 0\n2 0 0.75\n$Elements 1\n0 0 1 2 halite\n"
                          "$Boundary 3\n0 1 Bottom\n1 2 FarField\n2 0 SymmetryAxis\n$Probes 0\n");
    const Mesh m = load_mesh(in);
    Eigen::VectorXd u(6);
    u << 0.1, 0.2, 0.3, 0.4, 0.5, 0.6;
    const auto snap = make_snapshot(0.0, u, {ElementFields{}}, {CreepStrain{}}, {0.0});
    std::ostringstream out;
    export_vtk(m, snap, out);
    const auto l = lines(out.str());
    REQUIRE(l.size() > 10);
    CHECK(l[0] == "# vtk DataFile Version 3.0");
    const auto find = [&](const std::string& prefix) {
      for (std::size_t i = 0; i < l.size(); ++i) {
        if (l[i].rfind(prefix, 0) == 0) {
          return i;
        }
      }
      FAIL("missing " << prefix);
      return l.size();
    };
    const auto pts = find("POINTS 3");
    std::istringstream p1(l[pts + 2]);
    double x = 0, y = 0, z = 0;
    p1 >> x >> y >> z;
    CHECK(x == 1.25);
    CHECK(y == 0.0);
    CHECK(l[find("CELLS 1")] == "CELLS 1 4");
    CHECK(l[find("CELL_TYPES 1") + 1] == "5");
    find("POINT_DATA 3");
    find("CELL_DATA 1");
    for (const char* name : {"s_vm", "D", "k", "eps_vol"}) {
      CHECK(out.str().find(std::string("SCALARS ") + name) != std::string::npos);
    }
  }

  TEST_CASE("probe CSV")
  {
    std::vector<ProbeSample> samples;
    for (int i = 0; i < 14; ++i) {
      samples.push_back({1.5 * i, "A", 1e-3 * i, -2e-3 * i, 1e7 + i, 0.0});
    }
    std::ostringstream out;
    export_probe_csv(samples, out);
    const auto l = lines(out.str());
    REQUIRE(l.size() == 15);
    CHECK(l[0] == "t_day,probe,u_x,u_y,s_vm,D");
    CHECK(l[1].rfind("0,A,0,", 0) == 0);

    // values survive a text round trip
    std::istringstream row(l[5]);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) {
      cells.push_back(cell);
    }
    REQUIRE(cells.size() == 6);
    CHECK(std::stod(cells[2]) == samples[4].u_x);
    CHECK(std::stod(cells[3]) == samples[4].u_y);

    std::ostringstream again;
    export_probe_csv(samples, again);
    CHECK(again.str() == out.str());
  }

  TEST_CASE("displacement interpolation is linear")
  {
    const Mesh m = generate_rectangle({0, 0}, 2.0, 2.0, 2, 2);
    Eigen::VectorXd u(m.dof_count());
    for (int n = 0; n < m.node_count(); ++n) {
      u[2 * n] = 1.0 + 2.0 * m.node(n).x - m.node(n).y;
      u[2 * n + 1] = 0.5 * m.node(n).y;
    }
    const Vec2 p{0.7, 1.3};
    const auto where = locate_probe(m, p);
    REQUIRE(where);
    const Vec2 v = interpolate_displacement(m, *where, u);
    CHECK(v.x == doctest::Approx(1.0 + 1.4 - 1.3));
    CHECK(v.y == doctest::Approx(0.65));
  }
}
