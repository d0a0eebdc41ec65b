#include "cavernsim/error.hpp"
#include "cavernsim/scenarios.hpp"

#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <sstream>

using namespace cavernsim;

namespace {

// Last sample of `probe` in a run.
ProbeSample final_sample(const RunArtifact& art, const std::string& probe)
{
  ProbeSample out;
  for (const auto& p : art.probes) {
    if (p.probe == probe) {
      out = p;
    }
  }
  return out;
}

Scenario short_uniaxial()
{
  Scenario s = builtin_scenario("uniaxial-benchmark");
  s.integrator.dt = 5.0;
  s.integrator.t_end = 50.0;
  return s;
}

} // namespace

TEST_SUITE("scenarios")
{
  TEST_CASE("empty configuration gives the base case")
  {
    const Scenario s = parse_scenario("{}");
    CHECK(s == Scenario{});
    CHECK(s.mesh.cavern.radius == 25.0);
    CHECK(s.mesh.cavern.height == 250.0);
    CHECK(s.integrator.dt == 1.5);
    CHECK(s.integrator.t_end == 275.0);
    CHECK(s.schedule.p_min == 0.2);
    CHECK(s.materials.at("halite").creep->n == 3.5);
  }

  TEST_CASE("serialization round trip")
  {
    for (const auto& name : builtin_scenario_names()) {
      CAPTURE(name);
      const Scenario s = builtin_scenario(name);
      const Scenario back = parse_scenario(serialize_scenario(s));
      CHECK(back == s);
      CHECK(serialize_scenario(back) == serialize_scenario(s));
    }
  }

  TEST_CASE("unknown keys and bad values name their path")
  {
    const auto path_of = [](const std::string& text) {
      try {
        parse_scenario(text);
      } catch (const ValidationError& e) {
        return e.path();
      }
      return std::string("<none>");
    };
    CHECK(path_of(R"({"integrator": {"dtt": 1}})") == "integrator.dtt");
    CHECK(path_of(R"({"integrator": {"dt": "big"}})") == "integrator.dt");
    CHECK(path_of(R"({"integrator": {"scheme": "rk4"}})") == "integrator.scheme");
    CHECK(path_of(R"({"material": "granite"})") == "material");
    CHECK(path_of(R"({"integrator": {"dt": -1}})").find("dt") != std::string::npos);
    CHECK_THROWS_AS(parse_scenario("{not json"), Error);
  }

  TEST_CASE("schedule outside the admissible window is a warning")
  {
    const Scenario s = parse_scenario(R"({"schedule": {"kind": "cyclic", "p_min": 0.2, "p_max": 0.9, "period": 6}})");
    REQUIRE(s.warnings.size() == 1);
    CHECK(s.warnings[0].find("80%") != std::string::npos);
    CHECK(parse_scenario(R"({"schedule": {"kind": "cyclic", "p_min": 0.2, "p_max": 0.8, "period": 6}})").warnings.empty());
  }

  TEST_CASE("builtin names")
  {
    const auto names = builtin_scenario_names();
    CHECK(names.size() == 16);
    for (const auto& n : names) {
      CHECK(builtin_scenario(n).name == n);
      CHECK_NOTHROW(validate(builtin_scenario(n)));
    }
    CHECK_THROWS_AS(builtin_scenario("nope"), ValidationError);
  }

  TEST_CASE("every builtin completes three steps")
  {
    for (const auto& name : builtin_scenario_names()) {
      CAPTURE(name);
      Scenario s = builtin_scenario(name);
      if (s.mode != "simulate") {
        continue;
      }
      s.integrator.t_end = 3.0 * s.integrator.dt;
      const auto start = std::chrono::steady_clock::now();
      const auto run = run_scenario(s);
      const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      CHECK(run.artifact.iterations_per_step.size() == 3);
      CHECK(seconds < 60.0);
    }
  }

  TEST_CASE("interlayer band is applied around the cavern mid-height")
  {
    const Scenario s = builtin_scenario("interlayer-carnallite-mid");
    const Mesh m = build_mesh(s);
    const auto [roof, floor] = cavern_depth_range(m);
    const double centre = 0.5 * (roof + floor);
    int count = 0;
    for (int e = 0; e < m.element_count(); ++e) {
      if (m.elements()[static_cast<std::size_t>(e)].material == "carnallite") {
        ++count;
        CHECK(std::abs(-m.centroid(e).y - centre) <= 15.0 + 1e-9);
      }
    }
    CHECK(count > 0);
  }

  TEST_CASE("probe overrides replace the mesh probes")
  {
    Scenario s = builtin_scenario("monotonic-cylinder");
    s.probes = {{"A", {25.0, -825.0}}, {"B", {200.0, -825.0}}};
    const Mesh m = build_mesh(s);
    REQUIRE(m.probes().size() == 2);
    CHECK(m.probes()[1].label == "B");
  }

  TEST_CASE("assignments by pointer and dotted path")
  {
    const Scenario base;
    const Scenario a = with_assignment(base, "/materials/halite/creep/n", 4.0);
    CHECK(a.materials.at("halite").creep->n == 4.0);
    const Scenario b = with_assignment(base, "geostatic.surface_temperature", 290.0);
    CHECK(b.geostatic.surface_temperature == 290.0);
    const Scenario c = with_assignment(base, "/mesh/top_depth", 600.0);
    CHECK(c.mesh.top_depth == 600.0);
    CHECK_THROWS_AS(with_assignment(base, "/mesh/no_such_thing", 1.0), ValidationError);
    CHECK_THROWS_AS(with_assignment(base, "/name", 1.0), ValidationError);
  }

  TEST_CASE("sweep axis parsing")
  {
    const auto a = parse_sweep_axis("/materials/halite/creep/n=3,3.5,4");
    CHECK(a.path == "/materials/halite/creep/n");
    CHECK(a.values == std::vector<double>{3.0, 3.5, 4.0});
    CHECK_THROWS_AS(parse_sweep_axis("n"), ValidationError);
    CHECK_THROWS_AS(parse_sweep_axis("n=3,x"), ValidationError);
  }

  TEST_CASE("sweep without axes runs the base once")
  {
    const auto r = run_sweep(short_uniaxial(), {}, SweepMode::OneAtATime, 2);
    REQUIRE(r.variants.size() == 1);
    CHECK(r.variants[0].label == "base");
    CHECK(r.variants[0].artifact);
  }

  TEST_CASE("larger creep exponent gives more displacement")
  {
    const auto r =
      run_sweep(short_uniaxial(), {parse_sweep_axis("/materials/halite/creep/n=3.3,3.5,3.7")}, SweepMode::OneAtATime, 3);
    REQUIRE(r.variants.size() == 4);
    std::vector<double> uy;
    for (std::size_t i = 1; i < r.variants.size(); ++i) {
      REQUIRE(r.variants[i].artifact);
      CHECK(r.variants[i].label == r.variants[i].assignments[0].first + "=" +
                                     (i == 1 ? "3.3" : i == 2 ? "3.5" : "3.7"));
      uy.push_back(std::abs(final_sample(*r.variants[i].artifact, "A").u_y));
    }
    CHECK(uy[0] < uy[1]);
    CHECK(uy[1] < uy[2]);
    // the base variant equals the n = 3.5 variant
    CHECK(final_sample(*r.variants[0].artifact, "A") == final_sample(*r.variants[2].artifact, "A"));
  }

  TEST_CASE("smaller damage resistance gives more damage")
  {
    Scenario s = short_uniaxial();
    Material halite = s.materials.at("halite");
    halite.damage = DamageParams{};
    s.materials.insert(halite);
    s.integrator.damage_enabled = true;
    s.integrator.dt = 0.1;
    s.integrator.t_end = 2.0;
    const auto r = run_sweep(s, {parse_sweep_axis("/materials/halite/damage/B=2e4,4e4,8e4")}, SweepMode::OneAtATime, 3);
    std::vector<double> d;
    for (std::size_t i = 1; i < r.variants.size(); ++i) {
      REQUIRE(r.variants[i].artifact);
      d.push_back(final_sample(*r.variants[i].artifact, "A").damage);
    }
    REQUIRE(d.size() == 3);
    CHECK(d[0] > d[1]);
    CHECK(d[1] > d[2]);
    CHECK(d[2] > 0.0);
  }

  TEST_CASE("cartesian sweep covers the product")
  {
    const auto r = run_sweep(short_uniaxial(),
                             {parse_sweep_axis("/materials/halite/creep/n=3.4,3.6"), parse_sweep_axis("/integrator/dt=5,10")},
                             SweepMode::Cartesian,
                             2);
    REQUIRE(r.variants.size() == 4);
    for (const auto& v : r.variants) {
      CHECK(v.assignments.size() == 2);
      CHECK_MESSAGE(v.error.empty(), v.error);
      CHECK(v.artifact);
    }
    CHECK(r.variants[1].label == "/materials/halite/creep/n=3.4;/integrator/dt=10");
  }

  TEST_CASE("invalid variants are rejected before anything runs")
  {
    CHECK_THROWS_AS(run_sweep(short_uniaxial(), {parse_sweep_axis("/integrator/dt=5,-1")}), ValidationError);
  }

  TEST_CASE("sweep CSV is independent of the thread count")
  {
    const auto axis = parse_sweep_axis("/materials/halite/creep/n=3.4,3.6");
    std::ostringstream one, many;
    export_sweep_csv(run_sweep(short_uniaxial(), {axis}, SweepMode::OneAtATime, 1), one);
    export_sweep_csv(run_sweep(short_uniaxial(), {axis}, SweepMode::OneAtATime, 4), many);
    CHECK(one.str() == many.str());
    CHECK(one.str().rfind("variant,assignment,t_day,probe,u_x,u_y,s_vm,D\n", 0) == 0);
  }

  TEST_CASE("profile text")
  {
    std::istringstream ok("# r depth\n0 0\n20 10\n25 100\n0 120\n");
    const CavernProfile p = load_profile(ok);
    CHECK(p.points().size() == 4);
    std::istringstream bad("0 0\n20 x\n");
    try {
      load_profile(bad);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }

  TEST_CASE("uniaxial benchmark runs and writes outputs")
  {
    const auto run = run_scenario(short_uniaxial());
    CHECK(run.artifact.status == RunArtifact::Status::Completed);
    CHECK(run.artifact.volumes.empty());
    CHECK(final_sample(run.artifact, "A").u_y < 0.0);
    // the top face settles monotonically
    double last = 0.0;
    for (const auto& p : run.artifact.probes) {
      if (p.probe == "A") {
        CHECK(p.u_y <= last);
        last = p.u_y;
      }
    }
    Scenario mms = builtin_scenario("mms-convergence");
    CHECK_THROWS_AS(run_scenario(mms), ValidationError);
  }

  TEST_CASE("zero manufactured field")
  {
    const auto r = run_mms_convergence({4, 8}, {}, 0.0);
    CHECK(r.passed);
    for (const auto& l : r.levels) {
      CHECK(l.displacement_error < 1e-14);
    }
  }

  TEST_CASE("fitted order of a power law")
  {
    CHECK(fitted_order({0.1, 0.05, 0.025}, {3e-2, 7.5e-3, 1.875e-3}) == doctest::Approx(2.0));
  }
}
