#include "cavernsim/error.hpp"
#include "cavernsim/loads.hpp"
#include "cavernsim/mesher.hpp"

#include <doctest.h>

#include <sstream>

using namespace cavernsim;

namespace {

// 1 x 2 rectangle whose left edge is a cavern wall (rock on the right).
Mesh wall_strip()
{
  std::istringstream in(R"($Nodes 4
0 0 0
1 1 0
2 1 2
3 0 2
$Elements 2
0 0 1 2 halite
1 0 2 3 halite
$Boundary 4
0 1 Bottom
1 2 FarField
2 3 Top
3 0 CavernWall
$Probes 0
)");
  return load_mesh(in);
}

Mesh twin_mesh()
{
  return generate_cavern_domain(
    twin_cavern_domain(CavernProfile::capsule(25.0, 250.0), 200.0, 500.0, 200.0, 200.0, 300.0));
}

} // namespace

TEST_SUITE("loads")
{
  TEST_CASE("lithostatic pressure")
  {
    const GeostaticModel g{};
    CHECK(lithostatic_pressure(g, 0.0) == 0.0);
    CHECK(lithostatic_pressure(g, 1000.0) == doctest::Approx(2200 * 9.81 * 1000));
    CHECK(lithostatic_pressure(g, 1000.0) == doctest::Approx(21.58e6).epsilon(1e-3));

    GeostaticModel layered = g;
    layered.overburden_density = 2500.0;
    CHECK(lithostatic_pressure(layered, 800.0) == doctest::Approx(9.81 * (2500 * 500 + 2200 * 300)));
    CHECK(lithostatic_pressure(layered, 300.0) == doctest::Approx(9.81 * 2500 * 300));
  }

  TEST_CASE("temperature")
  {
    const GeostaticModel g{};
    CHECK(temperature_at(g, 0.0) == doctest::Approx(283.15));
    CHECK(temperature_at(g, 1000.0) == doctest::Approx(314.45));
    GeostaticModel flat = g;
    flat.temperature_gradient = 0.0;
    CHECK(temperature_at(flat, 900.0) == doctest::Approx(283.15));
  }

  TEST_CASE("geostatic validation")
  {
    GeostaticModel g{};
    g.salt_density = 0.0;
    CHECK_THROWS_AS(validate(g), ValidationError);
    g = {};
    g.temperature_gradient = -0.01;
    CHECK_THROWS_AS(validate(g), ValidationError);
  }

  TEST_CASE("cavern pressure under a constant schedule")
  {
    const GeostaticModel g{};
    const FluidModel f{};
    const auto s = PressureSchedule::constant(0.2);
    const double ref = 700.0;
    for (double t : {0.0, 13.7, 275.0}) {
      CHECK(cavern_pressure(s, g, f, t, 800.0, ref) ==
            doctest::Approx(0.2 * 2200 * 9.81 * 700 + 8.0 * 9.81 * 100.0));
    }
    const FluidModel none{0.0};
    CHECK(cavern_pressure(s, g, none, 0.0, 950.0, ref) == doctest::Approx(cavern_pressure(s, g, none, 0.0, 700.0, ref)));
  }

  TEST_CASE("cyclic step branches")
  {
    const auto s = PressureSchedule::cyclic(0.2, 0.8, 6.0, 0.5);
    CHECK(s.fraction_at(1e-9) == 0.8);
    CHECK(s.fraction_at(3.0 + 1e-9) == 0.2);
    CHECK(s.fraction_at(6.0 + 1e-9) == 0.8);
    CHECK(s.fraction_at(2.9) == 0.8);
    CHECK(s.fraction_at(5.9) == 0.2);
  }

  TEST_CASE("schedule admissibility")
  {
    CHECK(validate(PressureSchedule::constant(0.2)).empty());
    CHECK(validate(PressureSchedule::cyclic(0.2, 0.8, 6.0)).empty());
    const auto w = validate(PressureSchedule::cyclic(0.1, 0.9, 6.0));
    REQUIRE(w.size() == 2);
    CHECK(w[0].find("24%-80%") != std::string::npos);
    CHECK_THROWS_AS(validate(PressureSchedule::constant(0.0)), ValidationError);
    CHECK_THROWS_AS(validate(PressureSchedule::constant(1.2)), ValidationError);
    CHECK_THROWS_AS(validate(PressureSchedule::cyclic(0.8, 0.2, 6.0)), ValidationError);
    CHECK_THROWS_AS(validate(PressureSchedule::cyclic(0.2, 0.8, 0.0)), ValidationError);
  }

  TEST_CASE("unit pressure on a vertical edge of length 2")
  {
    const Mesh m = wall_strip();
    const Eigen::VectorXd F = traction_nodal_forces(m, [](const Vec2&) { return 1.0; });
    // rock lies at x > 0, so the pressure pushes in +x
    CHECK(F[0] == doctest::Approx(1.0));
    CHECK(F[6] == doctest::Approx(1.0));
    CHECK(F[1] == doctest::Approx(0.0));
    CHECK(F[7] == doctest::Approx(0.0));
    CHECK(F.segment(2, 4).norm() == 0.0);
  }

  TEST_CASE("traction forces are linear in the pressure")
  {
    const Mesh m = twin_mesh();
    auto p1 = [](const Vec2& x) { return 1e6 - 100.0 * x.y; };
    auto p2 = [](const Vec2& x) { return 3e5 + 5.0 * x.x; };
    const Eigen::VectorXd a = traction_nodal_forces(m, p1);
    const Eigen::VectorXd b = traction_nodal_forces(m, p2);
    const Eigen::VectorXd ab = traction_nodal_forces(m, [&](const Vec2& x) { return 2.0 * p1(x) - 0.5 * p2(x); });
    CHECK((ab - (2.0 * a - 0.5 * b)).norm() <= 1e-9 * ab.norm());
  }

  TEST_CASE("uniform pressure on a closed wall has no net force")
  {
    const Mesh m = twin_mesh();
    const double p = 5e6;
    // only the full cavern (away from the axis) is loaded
    const Eigen::VectorXd F = traction_nodal_forces(m, [&](const Vec2& x) { return x.x > 100.0 ? p : 0.0; });
    double fx = 0.0, fy = 0.0, perimeter = 0.0;
    for (int n = 0; n < m.node_count(); ++n) {
      fx += F[2 * n];
      fy += F[2 * n + 1];
    }
    for (const auto& s : m.boundary()) {
      if (s.tag == BoundaryTag::CavernWall && m.node(s.a).x > 100.0) {
        perimeter += std::hypot(m.node(s.a).x - m.node(s.b).x, m.node(s.a).y - m.node(s.b).y);
      }
    }
    CHECK(perimeter > 500.0);
    CHECK(std::hypot(fx, fy) < 1e-9 * p * perimeter);
  }

  TEST_CASE("half cavern under uniform pressure pushes by p times its chord")
  {
    DomainSpec spec = single_cavern_domain(CavernProfile::capsule(25.0, 250.0), 500.0, 200.0, 200.0, 500.0);
    const Mesh m = generate_cavern_domain(spec);
    const double p = 2e6;
    const Eigen::VectorXd F = traction_nodal_forces(m, [&](const Vec2&) { return p; });
    double fx = 0.0, fy = 0.0;
    for (int n = 0; n < m.node_count(); ++n) {
      fx += F[2 * n];
      fy += F[2 * n + 1];
    }
    // projected length of the wall on the axis is the cavern height
    CHECK(fx == doctest::Approx(p * 250.0).epsilon(1e-9));
    CHECK(std::abs(fy) < 1e-9 * p * 250.0);
  }

  TEST_CASE("boundary tractions on selected tags")
  {
    const Mesh m = generate_rectangle({0, 0}, 2.0, 3.0, 2, 3);
    const Eigen::VectorXd F = boundary_traction_forces(m, {BoundaryTag::Top}, [](const Vec2&, const Vec2& n) {
      return Vec2{0.0, -5.0 * n.y};
    });
    double fy = 0.0;
    for (int n = 0; n < m.node_count(); ++n) {
      fy += F[2 * n + 1];
    }
    CHECK(fy == doctest::Approx(-10.0));
  }

  TEST_CASE("weight of a single element")
  {
    std::istringstream in("$Nodes 3\n0 0 0\n1 2 0\n2 0 1\n$Elements 1\n0 0 1 2 halite\n$Boundary 3\n0 1 Bottom\n1 2 FarField\n2 0 SymmetryAxis\n$Probes 0\n");
    const Mesh m = load_mesh(in);
    const Eigen::VectorXd F = body_force(m, builtin_catalog());
    CHECK(F[1] + F[3] + F[5] == doctest::Approx(-2200 * 9.81));
    CHECK(F[1] == doctest::Approx(F[3]));
    CHECK(F[0] + F[2] + F[4] == 0.0);

    const Eigen::VectorXd Z = body_force(m, [](const Vec2&) { return Vec2{0.0, 0.0}; });
    CHECK(Z.norm() == 0.0);
  }

  TEST_CASE("total weight is additive")
  {
    const Mesh m = generate_rectangle({0, -10}, 4.0, 10.0, 4, 5);
    const Eigen::VectorXd F = body_force(m, builtin_catalog());
    double fy = 0.0;
    for (int n = 0; n < m.node_count(); ++n) {
      fy += F[2 * n + 1];
    }
    CHECK(fy == doctest::Approx(-2200 * 9.81 * 40.0));
  }

  TEST_CASE("body force field integrates linear densities exactly")
  {
    const Mesh m = generate_rectangle({0, 0}, 1.0, 1.0, 3, 3);
    const Eigen::VectorXd F = body_force(m, [](const Vec2& p) { return Vec2{p.x, 1.0 + p.y}; });
    double fx = 0.0, fy = 0.0;
    for (int n = 0; n < m.node_count(); ++n) {
      fx += F[2 * n];
      fy += F[2 * n + 1];
    }
    CHECK(fx == doctest::Approx(0.5));
    CHECK(fy == doctest::Approx(1.5));
  }
}
