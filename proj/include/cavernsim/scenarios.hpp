#pragma once

#include "cavernsim/loads.hpp"
#include "cavernsim/materials.hpp"
#include "cavernsim/mesh.hpp"
#include "cavernsim/mesher.hpp"
#include "cavernsim/solver.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cavernsim {

struct CavernShapeConfig
{
  /// "capsule", "points" (inline half profile) or "file" (profile file).
  std::string kind = "capsule";
  double radius = 25.0;
  double height = 250.0;
  /// (radius, depth below roof) pairs from roof apex to floor apex.
  std::vector<Vec2> points;
  std::string file;

  friend bool operator==(const CavernShapeConfig&, const CavernShapeConfig&) = default;
};

struct MeshConfig
{
  /// "generated", "file" or "rectangle".
  std::string source = "generated";
  std::string file;

  /// "single" (half cavern on the axis) or "twin" (plus a full cavern).
  std::string layout = "single";
  CavernShapeConfig cavern;
  double top_depth = 500.0;
  double roof_thickness = 200.0;
  double floor_thickness = 200.0;
  double width = 500.0;
  double ctc = 200.0;
  double far_margin = 300.0;
  std::optional<int> target_elements = 1960;
  double far_size = 40.0;
  double refinement = 4.0;
  double grading = 0.25;
  std::uint32_t seed = 20240501;

  double origin_x = 0.0;
  double origin_y = 0.0;
  double rect_width = 1.0;
  double rect_height = 1.0;
  int nx = 1;
  int ny = 1;

  friend bool operator==(const MeshConfig&, const MeshConfig&) = default;
};

/// Horizontal band of another material around the first cavern.
struct InterlayerConfig
{
  std::string material;
  /// "mid" (centred on the cavern mid-height), "floor" (centred on the
  /// floor apex) or "depth" (centred on `center_depth`).
  std::string placement = "mid";
  double width = 30.0;
  double center_depth = 0.0;

  friend bool operator==(const InterlayerConfig&, const InterlayerConfig&) = default;
};

struct LoadingConfig
{
  /// "cavern": wall pressure relative to the lithostatic state.
  /// "patch": uniform tractions sxx on FarField and syy on Top edges.
  std::string kind = "cavern";
  double sxx = 0.0; // [Pa]
  double syy = 0.0; // [Pa]

  friend bool operator==(const LoadingConfig&, const LoadingConfig&) = default;
};

struct OutputConfig
{
  bool vtk = true;
  bool csv = true;

  friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct Scenario
{
  std::string name = "custom";
  /// "simulate" or "verify-mms".
  std::string mode = "simulate";
  MeshConfig mesh;
  /// Host rock of generated meshes.
  std::string material = "halite";
  MaterialCatalog materials = builtin_catalog();
  std::vector<InterlayerConfig> interlayers;
  GeostaticModel geostatic;
  PressureSchedule schedule = PressureSchedule::constant(0.2);
  FluidModel fluid;
  LoadingConfig loading;
  /// Uniform temperature instead of the geothermal gradient [K].
  std::optional<double> temperature;
  IntegratorConfig integrator;
  /// Replaces the mesh probes when non-empty.
  std::vector<Probe> probes;
  OutputConfig output;
  /// Non-fatal validation notes (e.g. schedule outside the admissible window).
  std::vector<std::string> warnings;

  friend bool operator==(const Scenario& a, const Scenario& b);
};

/// Parses the JSON scenario format (docs/scenario.md). Missing keys take
/// the base-case defaults. Throws ValidationError with the key path.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario_file(const std::string& path);
/// JSON text that parses back to an equal scenario.
std::string serialize_scenario(const Scenario& scenario);

/// Throws ValidationError when invariants fail; returns warnings.
std::vector<std::string> validate(const Scenario& scenario);

std::vector<std::string> builtin_scenario_names();
/// Throws ValidationError for unknown names.
Scenario builtin_scenario(const std::string& name);

/// Two-column "radius depth" text, one point per line, '#' comments.
CavernProfile load_profile(std::istream& in);
CavernProfile load_profile_file(const std::string& path);

/// Half profile of the synthetic irregular cavern used by the irregular
/// and multi-cavern irregular scenarios.
CavernProfile irregular_profile();
/// Half profile of the synthetic echo-log style field cavern.
CavernProfile field_profile();

CavernProfile cavern_profile(const Scenario& scenario);
DomainSpec domain_spec(const Scenario& scenario);
/// Mesh with interlayers and probe overrides applied.
Mesh build_mesh(const Scenario& scenario);
Scene build_scene(const Scenario& scenario);
Scene build_scene(const Scenario& scenario, Mesh mesh);

/// Depth range [roof, floor] of the first cavern loop of `mesh`.
std::pair<double, double> cavern_depth_range(const Mesh& mesh);

struct ScenarioRun
{
  Mesh mesh;
  RunArtifact artifact;
};

ScenarioRun run_scenario(const Scenario& scenario);

/// Writes probes.csv, volumes.csv, events.log and snapshot_NNNN.vtk.
void write_run_outputs(const std::string& directory, const Mesh& mesh, const RunArtifact& artifact, const OutputConfig& output);

/// Smallest von Mises stress sampled at `samples` points on the segment a-b.
double min_von_mises_on_segment(const Mesh& mesh, const FieldSnapshot& snapshot, Vec2 a, Vec2 b, int samples = 200);

/// Minimum von Mises stress on the horizontal line between the two cavern
/// walls of a twin layout, at the height of the widest section.
double midplane_min_von_mises(const Scenario& scenario, const Mesh& mesh, const FieldSnapshot& snapshot);

struct SweepAxis
{
  /// JSON pointer ("/materials/halite/creep/n") or dotted path
  /// ("materials.halite.creep.n") into the serialized scenario.
  std::string path;
  std::vector<double> values;
};

/// Parses "PATH=v1,v2,...".
SweepAxis parse_sweep_axis(const std::string& text);

enum class SweepMode
{
  OneAtATime,
  Cartesian,
};

struct SweepVariant
{
  std::string label;
  std::vector<std::pair<std::string, double>> assignments;
  std::optional<RunArtifact> artifact;
  std::string error;
};

struct SweepResult
{
  std::vector<SweepVariant> variants;
};

/// Scenario with `value` written at `path`. Throws ValidationError for
/// paths that do not name an existing numeric setting.
Scenario with_assignment(const Scenario& scenario, const std::string& path, double value);

/// Runs the variants on up to `threads` workers (0: CAVERNSIM_THREADS or
/// the hardware concurrency).
SweepResult run_sweep(const Scenario& base,
                      const std::vector<SweepAxis>& axes,
                      SweepMode mode = SweepMode::OneAtATime,
                      unsigned threads = 0);

/// Columns variant,assignment,t_day,probe,u_x,u_y,s_vm,D.
void export_sweep_csv(const SweepResult& result, std::ostream& out);

/// Worker count from CAVERNSIM_THREADS, else the hardware concurrency.
unsigned default_thread_count();

struct MmsLevel
{
  int n = 0;
  double h = 0.0;
  int elements = 0;
  double displacement_error = 0.0;
  double strain_error = 0.0;
  double stress_error = 0.0;
};

struct MmsReport
{
  std::string field;
  std::vector<MmsLevel> levels;
  double displacement_order = 0.0;
  double strain_order = 0.0;
  double stress_order = 0.0;
  bool passed = false;
  double seconds = 0.0;
};

/// Manufactured solution on the unit square with Dirichlet data on the
/// whole boundary. Passes when the fitted displacement order is >= 1.9
/// and the strain and stress orders are >= 0.9. `amplitude` 0 gives the
/// zero field.
MmsReport run_mms_convergence(const std::vector<int>& levels = {8, 16, 32, 64},
                              const ElasticParams& elastic = {},
                              double amplitude = 1e-3);

/// Least-squares slope of log(error) against log(h).
double fitted_order(const std::vector<double>& h, const std::vector<double>& error);

void print_mms_report(const MmsReport& report, std::ostream& out);

} // namespace cavernsim
