#include "cavernsim/scenarios.hpp"

#include "cavernsim/error.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <locale>
#include <sstream>

namespace cavernsim {

bool operator==(const Scenario& a, const Scenario& b)
{
  return a.name == b.name && a.mode == b.mode && a.mesh == b.mesh && a.material == b.material &&
         a.materials == b.materials && a.interlayers == b.interlayers && a.geostatic == b.geostatic &&
         a.schedule == b.schedule && a.fluid == b.fluid && a.loading == b.loading && a.temperature == b.temperature &&
         a.integrator == b.integrator && a.probes == b.probes && a.output == b.output;
}

std::vector<std::string> validate(const Scenario& s)
{
  if (!s.materials.contains(s.material)) {
    throw ValidationError("material", "unknown material '" + s.material + "'");
  }
  for (std::size_t i = 0; i < s.interlayers.size(); ++i) {
    const auto& l = s.interlayers[i];
    const std::string path = "interlayers[" + std::to_string(i) + "]";
    if (!s.materials.contains(l.material)) {
      throw ValidationError(path + ".material", "unknown material '" + l.material + "'");
    }
    if (!(l.width > 0.0)) {
      throw ValidationError(path + ".width", "must be positive");
    }
  }
  validate(s.geostatic);
  std::vector<std::string> warnings = validate(s.schedule);
  if (!(s.fluid.density >= 0.0)) {
    throw ValidationError("fluid.density", "must be >= 0");
  }
  validate(s.integrator);
  if (s.temperature && !(*s.temperature > 0.0)) {
    throw ValidationError("temperature", "must be positive");
  }
  const auto& m = s.mesh;
  if (m.source == "rectangle") {
    if (!(m.rect_width > 0.0) || !(m.rect_height > 0.0)) {
      throw ValidationError("mesh.rect_width", "rectangle dimensions must be positive");
    }
    if (m.nx < 1 || m.ny < 1) {
      throw ValidationError("mesh.nx", "at least one cell per direction");
    }
    if (s.loading.kind == "cavern") {
      throw ValidationError("loading.kind", "cavern loading needs a cavern mesh");
    }
  }
  if (m.source == "generated") {
    if (m.cavern.kind == "capsule" && (!(m.cavern.radius > 0.0) || !(m.cavern.height >= 2.0 * m.cavern.radius))) {
      throw ValidationError("mesh.cavern", "capsule needs radius > 0 and height >= 2 radius");
    }
    if (m.target_elements && *m.target_elements < 10) {
      throw ValidationError("mesh.target_elements", "must be at least 10");
    }
  }
  return warnings;
}

CavernProfile load_profile(std::istream& in)
{
  std::vector<Vec2> pts;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    std::istringstream ss(line);
    ss.imbue(std::locale::classic());
    Vec2 p;
    std::string extra;
    if (!(ss >> p.x >> p.y) || (ss >> extra)) {
      throw ParseError("expected 'radius depth'", line_no);
    }
    pts.push_back(p);
  }
  return CavernProfile::from_points(std::move(pts));
}

CavernProfile load_profile_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("mesh.cavern.file", "cannot open " + path);
  }
  return load_profile(in);
}

CavernProfile irregular_profile()
{
  return CavernProfile::from_points({{0, 0},
                                     {12, 3},
                                     {20, 10},
                                     {26, 25},
                                     {30, 50},
                                     {27, 80},
                                     {24, 110},
                                     {28, 140},
                                     {36, 170},
                                     {38, 190},
                                     {33, 215},
                                     {22, 235},
                                     {10, 246},
                                     {0, 250}});
}

CavernProfile field_profile()
{
  return CavernProfile::from_points({{0, 0},
                                     {8, 2},
                                     {18, 8},
                                     {26, 20},
                                     {31, 40},
                                     {33, 65},
                                     {30, 90},
                                     {32, 115},
                                     {37, 140},
                                     {40, 165},
                                     {38, 190},
                                     {35, 215},
                                     {37, 240},
                                     {33, 265},
                                     {24, 285},
                                     {12, 296},
                                     {0, 300}});
}

namespace {

Scenario base_cylinder()
{
  Scenario s;
  s.name = "monotonic-cylinder";
  return s;
}

Scenario with_interlayer(const std::string& name, const std::string& material, const std::string& placement)
{
  Scenario s = base_cylinder();
  s.name = name;
  s.interlayers.push_back({material, placement, 30.0, 0.0});
  s.integrator.t_end = 50.0;
  return s;
}

Scenario with_points(Scenario s, const CavernProfile& profile)
{
  s.mesh.cavern.kind = "points";
  s.mesh.cavern.points = profile.points();
  return s;
}

Scenario twin(const std::string& name, double ctc, bool irregular)
{
  Scenario s = base_cylinder();
  if (irregular) {
    s = with_points(s, irregular_profile());
  }
  s.name = name;
  s.mesh.layout = "twin";
  s.mesh.ctc = ctc;
  s.mesh.far_margin = 300.0;
  s.mesh.target_elements.reset();
  return s;
}

} // namespace

std::vector<std::string> builtin_scenario_names()
{
  return {"uniaxial-benchmark",
          "monotonic-cylinder",
          "cyclic-cylinder",
          "irregular-homogeneous",
          "irregular-potash",
          "interlayer-carnallite-mid",
          "interlayer-carnallite-floor",
          "interlayer-bischofite-mid",
          "interlayer-bischofite-floor",
          "field-profile",
          "damage-tertiary",
          "multi-cavern-regular-320",
          "multi-cavern-regular-200",
          "multi-cavern-irregular-200",
          "multi-cavern-irregular-140",
          "mms-convergence"};
}

Scenario builtin_scenario(const std::string& name)
{
  if (name == "uniaxial-benchmark") {
    Scenario s;
    s.name = name;
    s.mesh.source = "rectangle";
    s.mesh.rect_width = 0.05;
    s.mesh.rect_height = 0.13;
    s.mesh.nx = 4;
    s.mesh.ny = 10;
    s.mesh.target_elements.reset();
    s.loading = {"patch", 0.0, -20e6};
    s.temperature = 313.15;
    s.probes = {{"A", {0.025, 0.13}}, {"B", {0.05, 0.065}}};
    return s;
  }
  if (name == "monotonic-cylinder") {
    return base_cylinder();
  }
  if (name == "cyclic-cylinder") {
    Scenario s = base_cylinder();
    s.name = name;
    s.schedule = PressureSchedule::cyclic(0.2, 0.8, 6.0, 0.5);
    return s;
  }
  if (name == "irregular-homogeneous") {
    Scenario s = with_points(base_cylinder(), irregular_profile());
    s.name = name;
    return s;
  }
  if (name == "irregular-potash") {
    Scenario s = with_points(base_cylinder(), irregular_profile());
    s.name = name;
    s.interlayers.push_back({"potash", "floor", 30.0, 0.0});
    return s;
  }
  if (name == "interlayer-carnallite-mid") {
    return with_interlayer(name, "carnallite", "mid");
  }
  if (name == "interlayer-carnallite-floor") {
    return with_interlayer(name, "carnallite", "floor");
  }
  if (name == "interlayer-bischofite-mid") {
    return with_interlayer(name, "bischofite", "mid");
  }
  if (name == "interlayer-bischofite-floor") {
    return with_interlayer(name, "bischofite", "floor");
  }
  if (name == "field-profile") {
    Scenario s = with_points(base_cylinder(), field_profile());
    s.name = name;
    s.integrator.t_end = 730.0;
    return s;
  }
  if (name == "damage-tertiary") {
    Scenario s = base_cylinder();
    s.name = name;
    Material halite = s.materials.at("halite");
    halite.damage = DamageParams{};
    s.materials.insert(halite);
    s.integrator.damage_enabled = true;
    s.integrator.dt = 0.1;
    s.integrator.t_end = 30.0;
    return s;
  }
  if (name == "multi-cavern-regular-320") {
    return twin(name, 320.0, false);
  }
  if (name == "multi-cavern-regular-200") {
    return twin(name, 200.0, false);
  }
  if (name == "multi-cavern-irregular-200") {
    return twin(name, 200.0, true);
  }
  if (name == "multi-cavern-irregular-140") {
    return twin(name, 140.0, true);
  }
  if (name == "mms-convergence") {
    Scenario s;
    s.name = name;
    s.mode = "verify-mms";
    return s;
  }
  throw ValidationError("scenario", "unknown builtin scenario '" + name + "'");
}

CavernProfile cavern_profile(const Scenario& s)
{
  const auto& c = s.mesh.cavern;
  if (c.kind == "capsule") {
    return CavernProfile::capsule(c.radius, c.height);
  }
  if (c.kind == "points") {
    return CavernProfile::from_points(c.points);
  }
  return load_profile_file(c.file);
}

DomainSpec domain_spec(const Scenario& s)
{
  const auto& m = s.mesh;
  const CavernProfile profile = cavern_profile(s);
  DomainSpec spec = m.layout == "twin"
                      ? twin_cavern_domain(profile, m.ctc, m.top_depth, m.roof_thickness, m.floor_thickness, m.far_margin)
                      : single_cavern_domain(profile, m.top_depth, m.roof_thickness, m.floor_thickness, m.width);
  spec.far_size = m.far_size;
  spec.refinement = m.refinement;
  spec.grading = m.grading;
  spec.target_elements = m.target_elements;
  spec.seed = m.seed;
  spec.material = s.material;
  return spec;
}

std::pair<double, double> cavern_depth_range(const Mesh& mesh)
{
  const auto loops = mesh.cavern_loops();
  if (loops.empty()) {
    throw ValidationError("mesh", "no cavern wall in the mesh");
  }
  double top = std::numeric_limits<double>::infinity();
  double bottom = -std::numeric_limits<double>::infinity();
  for (int n : loops.front().nodes) {
    const double depth = -mesh.node(n).y;
    top = std::min(top, depth);
    bottom = std::max(bottom, depth);
  }
  return {top, bottom};
}

Mesh build_mesh(const Scenario& s)
{
  const auto& m = s.mesh;
  Mesh mesh;
  if (m.source == "generated") {
    mesh = generate_cavern_domain(domain_spec(s));
  } else if (m.source == "file") {
    mesh = load_mesh_file(m.file);
  } else {
    mesh = generate_rectangle({m.origin_x, m.origin_y}, m.rect_width, m.rect_height, m.nx, m.ny, s.material);
  }

  double y_min = std::numeric_limits<double>::infinity();
  double y_max = -std::numeric_limits<double>::infinity();
  for (const auto& p : mesh.nodes()) {
    y_min = std::min(y_min, p.y);
    y_max = std::max(y_max, p.y);
  }
  for (std::size_t i = 0; i < s.interlayers.size(); ++i) {
    const auto& l = s.interlayers[i];
    double center = l.center_depth;
    if (l.placement != "depth") {
      const auto [roof, floor] = cavern_depth_range(mesh);
      center = l.placement == "mid" ? 0.5 * (roof + floor) : floor;
    }
    const double band_top = -(center - 0.5 * l.width);
    const double band_bottom = -(center + 0.5 * l.width);
    if (band_bottom < y_min || band_top > y_max) {
      throw ValidationError("interlayers[" + std::to_string(i) + "]", "band lies outside the domain");
    }
    mesh = assign_material_band(mesh, band_bottom, band_top, l.material);
  }
  if (!s.probes.empty()) {
    mesh = mesh.with_probes(s.probes);
  }
  return mesh;
}

Scene build_scene(const Scenario& s)
{
  return build_scene(s, build_mesh(s));
}

Scene build_scene(const Scenario& s, Mesh mesh)
{
  Scene scene;
  scene.catalog = s.materials;
  const GeostaticModel geo = s.geostatic;
  const bool cavern = s.loading.kind == "cavern";
  for (int e = 0; e < mesh.element_count(); ++e) {
    const double depth = -mesh.centroid(e).y;
    scene.temperature.push_back(s.temperature.value_or(temperature_at(geo, std::max(depth, 0.0))));
    if (cavern) {
      scene.in_situ_pressure.push_back(lithostatic_pressure(geo, depth));
    }
  }
  scene.constraints = constraints_from_tags(mesh);

  if (cavern) {
    const double reference = cavern_depth_range(mesh).first;
    const Eigen::VectorXd at_reference =
      traction_nodal_forces(mesh, [&](const Vec2&) { return lithostatic_pressure(geo, reference); });
    const FluidModel fluid = s.fluid;
    const Eigen::VectorXd column =
      traction_nodal_forces(mesh, [&](const Vec2& p) { return fluid.density * geo.g * (-p.y - reference); });
    const Eigen::VectorXd lithostatic =
      traction_nodal_forces(mesh, [&](const Vec2& p) { return lithostatic_pressure(geo, -p.y); });
    // wall load relative to the undisturbed lithostatic state
    const Eigen::VectorXd fixed = column - lithostatic;
    const PressureSchedule schedule = s.schedule;
    scene.external_force = [schedule, at_reference, fixed](double t) -> Eigen::VectorXd {
      return schedule.fraction_at(t) * at_reference + fixed;
    };
  } else {
    const double sxx = s.loading.sxx;
    const double syy = s.loading.syy;
    const Eigen::VectorXd F = boundary_traction_forces(
      mesh, {BoundaryTag::Top, BoundaryTag::FarField}, [&](const Vec2&, const Vec2& n) {
        return Vec2{sxx * n.x, syy * n.y};
      });
    scene.external_force = [F](double) -> Eigen::VectorXd { return F; };
  }
  scene.mesh = std::move(mesh);
  return scene;
}

ScenarioRun run_scenario(const Scenario& s)
{
  if (s.mode != "simulate") {
    throw ValidationError("mode", "scenario mode '" + s.mode + "' does not run a simulation");
  }
  validate(s);
  Scene scene = build_scene(s);
  Mesh mesh = scene.mesh;
  RunArtifact art = run_simulation(std::move(scene), s.integrator);
  return {std::move(mesh), std::move(art)};
}

void write_run_outputs(const std::string& directory, const Mesh& mesh, const RunArtifact& art, const OutputConfig& output)
{
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  const fs::path dir(directory);
  if (output.csv) {
    export_probe_csv(art.probes, (dir / "probes.csv").string());

    std::ofstream vol((dir / "volumes.csv").string());
    vol.imbue(std::locale::classic());
    vol << std::setprecision(17) << "t_day,cavern,area_m2,volume_m3,area_loss_pct,volume_loss_pct\n";
    for (const auto& sample : art.volumes) {
      for (std::size_t c = 0; c < sample.caverns.size(); ++c) {
        const auto& v0 = art.volumes.front().caverns[c];
        const auto& v = sample.caverns[c];
        vol << sample.t << ',' << c << ',' << v.area << ',' << v.volume << ','
            << volume_loss_percent(v0.area, v.area) << ',' << volume_loss_percent(v0.volume, v.volume) << '\n';
      }
    }
    if (!vol) {
      throw Error("write to volumes.csv failed");
    }
  }
  std::ofstream log((dir / "events.log").string());
  log.imbue(std::locale::classic());
  for (const auto& e : art.events) {
    log << "t=" << e.t << " " << e.kind << ": " << e.message << '\n';
  }
  if (output.vtk) {
    for (std::size_t i = 0; i < art.snapshots.size(); ++i) {
      std::ostringstream name;
      name << "snapshot_" << std::setw(4) << std::setfill('0') << i << ".vtk";
      export_vtk(mesh, art.snapshots[i], (dir / name.str()).string());
    }
  }
}

double min_von_mises_on_segment(const Mesh& mesh, const FieldSnapshot& snapshot, Vec2 a, Vec2 b, int samples)
{
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= samples; ++i) {
    const double s = static_cast<double>(i) / samples;
    const auto where = locate_probe(mesh, {a.x + s * (b.x - a.x), a.y + s * (b.y - a.y)});
    if (where) {
      best = std::min(best, snapshot.von_mises[static_cast<std::size_t>(where->element)]);
    }
  }
  return best;
}

double midplane_min_von_mises(const Scenario& s, const Mesh& mesh, const FieldSnapshot& snapshot)
{
  if (s.mesh.layout != "twin") {
    throw ValidationError("mesh.layout", "mid-plane stress needs the twin layout");
  }
  const CavernProfile profile = cavern_profile(s);
  const double r = profile.max_radius();
  const double y = -(s.mesh.top_depth + s.mesh.roof_thickness + profile.depth_of_max_radius());
  // stay clear of the wall elements themselves
  const double inset = 0.05 * s.mesh.ctc;
  return min_von_mises_on_segment(mesh, snapshot, {r + inset, y}, {r + s.mesh.ctc - inset, y});
}

} // namespace cavernsim
