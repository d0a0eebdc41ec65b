// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
// followed by the measured values, and exits non-zero when any fails.
//
// usage: cavernsim_acceptance [path to cavernsim_tests]

#include "cavernsim/constitutive.hpp"
#include "cavernsim/loads.hpp"
#include "cavernsim/mesher.hpp"
#include "cavernsim/postprocess.hpp"
#include "cavernsim/scenarios.hpp"
#include "cavernsim/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

using namespace cavernsim;

namespace {

struct Outcome
{
  bool pass = false;
  std::string detail;
};

class Stopwatch
{
public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v, int precision = 4)
{
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

double final_loss_percent(const RunArtifact& art)
{
  const double v0 = art.volumes.front().caverns.at(0).volume;
  const double v1 = art.volumes.back().caverns.at(0).volume;
  return volume_loss_percent(v0, v1);
}

double final_probe_ux(const RunArtifact& art, const std::string& probe)
{
  double u = 0.0;
  for (const auto& p : art.probes) {
    if (p.probe == probe) {
      u = p.u_x;
    }
  }
  return u;
}

double max_wall_ux(const Mesh& mesh, const RunArtifact& art)
{
  double m = 0.0;
  for (const auto& loop : mesh.cavern_loops()) {
    for (int n : loop.nodes) {
      m = std::max(m, std::abs(art.final_state.u[2 * n]));
    }
  }
  return m;
}

// The base monotonic run is shared by criteria 4, 5 and 6.
struct BaseRun
{
  Scenario scenario;
  ScenarioRun run;
  double seconds = 0.0;
};

const BaseRun& base_run()
{
  static const BaseRun b = [] {
    BaseRun r;
    r.scenario = builtin_scenario("monotonic-cylinder");
    Stopwatch w;
    r.run = run_scenario(r.scenario);
    r.seconds = w.seconds();
    return r;
  }();
  return b;
}

Outcome mms_gate()
{
  const MmsReport r = run_mms_convergence();
  Outcome o;
  o.pass = r.passed && r.levels.size() >= 3 && r.seconds < 60.0;
  o.detail = "orders u " + fmt(r.displacement_order) + ", strain " + fmt(r.strain_order) + ", stress " +
             fmt(r.stress_order) + " over " + std::to_string(r.levels.size()) + " levels in " + fmt(r.seconds, 3) +
             " s";
  return o;
}

// One square cell under sxx = +s/sqrt(3), syy = -s/sqrt(3): the out-of-plane
// stress vanishes and the von Mises stress is s.
Scene uniaxial_patch(double s)
{
  Scene scene;
  scene.mesh = generate_rectangle({0, 0}, 1.0, 1.0, 1, 1, "halite");
  scene.catalog = builtin_catalog();
  scene.temperature.assign(static_cast<std::size_t>(scene.mesh.element_count()), 313.15);
  scene.constraints = constraints_from_tags(scene.mesh);
  const double a = s / std::sqrt(3.0);
  const Eigen::VectorXd F =
    boundary_traction_forces(scene.mesh, {BoundaryTag::Top, BoundaryTag::FarField}, [&](const Vec2&, const Vec2& n) {
      return Vec2{a * n.x, -a * n.y};
    });
  scene.external_force = [F](double) { return F; };
  return scene;
}

Outcome uniaxial_creep_oracle()
{
  const double s = 20e6, T = 313.15, days = 275.0;
  const CreepLaw& law = *builtin_catalog().at("halite").creep;
  const double rate = law.a * std::exp(-law.Q / (gas_constant * T)) * std::pow(s, law.n);
  const double analytic = rate * days * 86400.0;

  IntegratorConfig c;
  c.dt = 1.5;
  c.t_end = days;
  const auto imp = run_simulation(uniaxial_patch(s), c);
  c.scheme = Scheme::Explicit;
  const auto exp = run_simulation(uniaxial_patch(s), c);
  const double e_imp = imp.final_state.creep[0].equivalent();
  const double e_exp = exp.final_state.creep[0].equivalent();
  const double err_imp = std::abs(e_imp - analytic) / analytic;
  const double err_exp = std::abs(e_exp - e_imp) / e_imp;

  Outcome o;
  o.pass = err_imp <= 0.005 && err_exp <= 0.02;
  o.detail = "rate " + fmt(rate, 3) + " 1/s, analytic " + fmt(analytic, 6) + ", implicit " + fmt(e_imp, 6) + " (" +
             fmt(100 * err_imp, 2) + "%), explicit vs implicit " + fmt(100 * err_exp, 2) + "%";
  return o;
}

Outcome kachanov_oracle()
{
  const DamageParams p{};
  const double tf = p.B / ((p.r + 1.0) * std::pow(30.0, p.r));
  const auto f = integrate_damage_rk4(30.0, p, tf / 1000.0);
  const double err = std::abs(f.time_days - tf) / tf;
  Outcome o;
  o.pass = err <= 0.005;
  o.detail = "t_f " + fmt(tf, 5) + " day, numeric " + fmt(f.time_days, 5) + " day (" + fmt(100 * err, 2) + "%)";
  return o;
}

Outcome base_volume_loss()
{
  const auto& b = base_run();
  const double loss = final_loss_percent(b.run.artifact);
  Outcome o;
  o.pass = loss >= 1.5 && loss <= 4.5 && b.seconds < 300.0;
  o.detail = "loss " + fmt(loss) + "% after " + fmt(b.run.artifact.final_state.t) + " days, " +
             std::to_string(b.run.mesh.element_count()) + " elements, " + fmt(b.seconds, 3) + " s";
  return o;
}

Outcome cyclic_run()
{
  const Scenario sc = builtin_scenario("cyclic-cylinder");
  const ScenarioRun run = run_scenario(sc);
  const double loss = final_loss_percent(run.artifact);
  const double mono = final_loss_percent(base_run().run.artifact);

  // u_x at every cycle start, where the pressure returns to the same branch
  const double period = sc.schedule.period;
  std::map<std::string, std::vector<double>> at_cycle_start;
  for (const auto& p : run.artifact.probes) {
    const double k = p.t / period;
    if (std::abs(k - std::round(k)) < 1e-9) {
      at_cycle_start[p.probe].push_back(p.u_x);
    }
  }
  std::string best;
  double best_incr = -1.0;
  std::ostringstream incr;
  for (const std::string probe : {"B", "C", "D", "E", "F"}) {
    const auto& v = at_cycle_start[probe];
    const double mean = v.size() > 1 ? std::abs(v.back() - v.front()) / static_cast<double>(v.size() - 1) : 0.0;
    incr << probe << ' ' << fmt(mean * 1e3, 3) << (probe == "F" ? "" : ", ");
    if (mean > best_incr) {
      best_incr = mean;
      best = probe;
    }
  }
  Outcome o;
  o.pass = loss < 1.5 && loss < mono && best == "F";
  o.detail = "loss " + fmt(loss) + "% (monotonic " + fmt(mono) + "%), mean per-cycle |du_x| [mm]: " + incr.str() +
             "; largest at " + best;
  return o;
}

Outcome permeability_location()
{
  const auto& b = base_run();
  const Mesh& mesh = b.run.mesh;
  const FieldSnapshot& snap = b.run.artifact.snapshots.back();
  const int ne = mesh.element_count();

  // Roof and floor regions: wall segments within one maximum radius of the
  // roof or floor apex depth.
  const auto [roof, floor] = cavern_depth_range(mesh);
  const double reach = b.scenario.mesh.cavern.radius;
  std::vector<std::pair<Vec2, Vec2>> cap_segments;
  for (const auto& s : mesh.boundary()) {
    if (s.tag != BoundaryTag::CavernWall) {
      continue;
    }
    const Vec2 p = mesh.node(s.a), q = mesh.node(s.b);
    const double depth = -0.5 * (p.y + q.y);
    if (depth <= roof + reach || depth >= floor - reach) {
      cap_segments.emplace_back(p, q);
    }
  }
  const auto distance_to_caps = [&](const Vec2& x) {
    double d = 1e300;
    for (const auto& [p, q] : cap_segments) {
      const double lx = q.x - p.x, ly = q.y - p.y;
      const double t = std::clamp(((x.x - p.x) * lx + (x.y - p.y) * ly) / (lx * lx + ly * ly), 0.0, 1.0);
      d = std::min(d, std::hypot(x.x - p.x - t * lx, x.y - p.y - t * ly));
    }
    return d;
  };
  const auto diameter = [&](int e) {
    const auto& n = mesh.elements()[static_cast<std::size_t>(e)].nodes;
    double d = 0.0;
    for (int i = 0; i < 3; ++i) {
      const Vec2 p = mesh.node(n[static_cast<std::size_t>(i)]), q = mesh.node(n[static_cast<std::size_t>((i + 1) % 3)]);
      d = std::max(d, std::hypot(p.x - q.x, p.y - q.y));
    }
    return d;
  };

  std::vector<int> order(static_cast<std::size_t>(ne));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int c) {
    return snap.permeability[static_cast<std::size_t>(a)] > snap.permeability[static_cast<std::size_t>(c)];
  });
  const std::size_t decile = static_cast<std::size_t>(std::ceil(0.1 * ne));
  std::size_t near_caps = 0;
  double top_lo = 1e300, top_hi = 0.0;
  for (std::size_t i = 0; i < decile; ++i) {
    const int e = order[i];
    const double k = snap.permeability[static_cast<std::size_t>(e)];
    top_lo = std::min(top_lo, k);
    top_hi = std::max(top_hi, k);
    if (distance_to_caps(mesh.centroid(e)) <= 2.0 * diameter(e)) {
      ++near_caps;
    }
  }
  double all_lo = 1e300, all_hi = 0.0;
  std::size_t dilatant = 0;
  for (int e = 0; e < ne; ++e) {
    const double k = snap.permeability[static_cast<std::size_t>(e)];
    if (snap.eps_vol[static_cast<std::size_t>(e)] > 0.0) {
      ++dilatant;
      all_lo = std::min(all_lo, k);
      all_hi = std::max(all_hi, k);
    }
  }

  Outcome o;
  const bool located = near_caps == decile;
  const bool magnitude = dilatant > 0 && all_lo >= 1e-21 && all_hi <= 1e-17;
  o.pass = located && magnitude;
  o.detail = std::to_string(near_caps) + "/" + std::to_string(decile) +
             " top-decile elements within 2 diameters of roof/floor; top-decile k in [" + fmt(top_lo, 3) + ", " +
             fmt(top_hi, 3) + "] m^2; all " + std::to_string(dilatant) + " dilatant elements k in [" +
             fmt(all_lo, 3) + ", " + fmt(all_hi, 3) + "] m^2";
  return o;
}

Outcome interlayer_ordering()
{
  Scenario homog = builtin_scenario("monotonic-cylinder");
  homog.integrator.t_end = 50.0;
  const auto h = run_scenario(homog);
  const double u0 = max_wall_ux(h.mesh, h.artifact);
  std::map<std::string, double> u;
  for (const std::string name :
       {"interlayer-carnallite-mid", "interlayer-carnallite-floor", "interlayer-bischofite-mid", "interlayer-bischofite-floor"}) {
    const auto r = run_scenario(builtin_scenario(name));
    u[name] = max_wall_ux(r.mesh, r.artifact);
  }
  const auto pct = [&](const std::string& n) { return fmt(100.0 * (u[n] / u0 - 1.0), 3) + "%"; };
  const bool material_order = u["interlayer-bischofite-mid"] > u["interlayer-carnallite-mid"] &&
                              u["interlayer-carnallite-mid"] > u0 &&
                              u["interlayer-bischofite-floor"] > u["interlayer-carnallite-floor"] &&
                              u["interlayer-carnallite-floor"] > u0;
  const bool placement_order = u["interlayer-carnallite-floor"] > u["interlayer-carnallite-mid"] &&
                               u["interlayer-bischofite-floor"] > u["interlayer-bischofite-mid"];
  Outcome o;
  o.pass = material_order && placement_order;
  o.detail = "max wall |u_x| homogeneous " + fmt(u0) + " m; change: carnallite mid " +
             pct("interlayer-carnallite-mid") + ", floor " + pct("interlayer-carnallite-floor") +
             "; bischofite mid " + pct("interlayer-bischofite-mid") + ", floor " +
             pct("interlayer-bischofite-floor");
  return o;
}

Outcome multi_cavern()
{
  std::map<std::string, double> s;
  for (const std::string name : {"multi-cavern-regular-320",
                                 "multi-cavern-regular-200",
                                 "multi-cavern-irregular-200",
                                 "multi-cavern-irregular-140"}) {
    const Scenario sc = builtin_scenario(name);
    const auto r = run_scenario(sc);
    s[name] = midplane_min_von_mises(sc, r.mesh, r.artifact.snapshots.back());
  }
  Outcome o;
  o.pass = s["multi-cavern-regular-200"] > s["multi-cavern-regular-320"] &&
           s["multi-cavern-irregular-140"] > s["multi-cavern-irregular-200"];
  o.detail = "mid-plane min von Mises [MPa]: regular 320 " + fmt(s["multi-cavern-regular-320"] / 1e6) + ", 200 " +
             fmt(s["multi-cavern-regular-200"] / 1e6) + "; irregular 200 " +
             fmt(s["multi-cavern-irregular-200"] / 1e6) + ", 140 " + fmt(s["multi-cavern-irregular-140"] / 1e6);
  return o;
}

Outcome sensitivity()
{
  Scenario base = builtin_scenario("monotonic-cylinder");
  base.probes = {{"A", {25.0, -825.0}}, {"B", {200.0, -825.0}}};
  // each axis moves its parameter by -5% and +5%
  const auto around = [](double v) { return std::vector<double>{0.95 * v, v, 1.05 * v}; };
  const Material& halite = base.materials.at("halite");
  const std::vector<std::pair<std::string, SweepAxis>> axes = {
    {"a", {"/materials/halite/creep/a", around(halite.creep->a)}},
    {"T", {"/geostatic/surface_temperature", around(base.geostatic.surface_temperature)}},
    {"n", {"/materials/halite/creep/n", around(halite.creep->n)}},
    {"depth", {"/mesh/top_depth", around(base.mesh.top_depth)}},
  };
  bool monotone = true;
  std::map<std::string, double> spread;
  std::ostringstream detail;
  for (const auto& [name, axis] : axes) {
    const SweepResult r = run_sweep(base, {axis});
    std::vector<double> ux;
    for (std::size_t i = 1; i < r.variants.size(); ++i) {
      if (!r.variants[i].artifact) {
        return {false, name + " variant failed: " + r.variants[i].error};
      }
      ux.push_back(std::abs(final_probe_ux(*r.variants[i].artifact, "A")));
    }
    monotone = monotone && std::is_sorted(ux.begin(), ux.end());
    spread[name] = (ux.back() - ux.front()) / ux[1];
    detail << name << " |u_x| " << fmt(ux[0]) << '/' << fmt(ux[1]) << '/' << fmt(ux[2]) << " spread "
           << fmt(100.0 * spread[name], 3) << "%; ";
  }
  const bool n_largest = spread["n"] > spread["a"] && spread["n"] > spread["T"];
  Outcome o;
  o.pass = monotone && n_largest;
  o.detail = detail.str() + (n_largest ? "n largest among creep axes" : "n not largest among creep axes");
  return o;
}

Outcome invariant_suite(const std::string& tests_binary)
{
  if (tests_binary.empty()) {
    return {false, "path to the unit test binary not given"};
  }
  const std::string cmd = "\"" + tests_binary + "\" --test-suite=properties,assembly,constitutive,loads --no-version";
  Stopwatch w;
  const int rc = std::system((cmd + " > /dev/null").c_str());
  const double t = w.seconds();
  Outcome o;
  o.pass = rc == 0 && t < 180.0;
  o.detail = std::string(rc == 0 ? "all invariant checks passed" : "invariant checks failed") + " in " + fmt(t, 3) +
             " s";
  return o;
}

} // namespace

int main(int argc, char** argv)
{
  const std::string tests_binary = argc > 1 ? argv[1] : "";
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
    {"MMS convergence gate", mms_gate},
    {"uniaxial creep oracle", uniaxial_creep_oracle},
    {"Kachanov oracle", kachanov_oracle},
    {"base monotonic volume loss", base_volume_loss},
    {"cyclic run", cyclic_run},
    {"permeability location and magnitude", permeability_location},
    {"interlayer ordering", interlayer_ordering},
    {"multi-cavern mid-plane stress", multi_cavern},
    {"sensitivity monotonicity", sensitivity},
    {"invariant suite", [&] { return invariant_suite(tests_binary); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& [name, check] = criteria[i];
    Outcome o;
    Stopwatch w;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << std::setw(2) << i + 1 << ". " << name << " ("
              << fmt(w.seconds(), 3) << " s)\n"
              << "         " << o.detail << std::endl;
  }
  std::cout << criteria.size() - static_cast<std::size_t>(failed) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
