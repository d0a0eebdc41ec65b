#pragma once

#include "cavernsim/assembly.hpp"
#include "cavernsim/constitutive.hpp"
#include "cavernsim/mesh.hpp"

#include <Eigen/Core>

#include <iosfwd>
#include <string>
#include <vector>

namespace cavernsim {

/// Fields of one instant. Element arrays follow mesh element order; `u`
/// holds (u_x, u_y) per node.
struct FieldSnapshot
{
  double t = 0.0; // [day]
  Eigen::VectorXd u;
  std::vector<StressState> stress;
  std::vector<StrainState> strain;
  std::vector<double> von_mises;
  std::vector<double> eps_vol;
  std::vector<double> permeability;
  std::vector<double> damage;
};

/// Builds a snapshot from recovered fields. `in_situ_pressure` (one entry
/// per element, or empty) is added as isotropic compression to the
/// reported stress; `eps_vol` is the magnitude of the in-plane creep trace.
FieldSnapshot make_snapshot(double t,
                            const Eigen::VectorXd& u,
                            const std::vector<ElementFields>& fields,
                            const std::vector<CreepStrain>& creep,
                            const std::vector<double>& damage,
                            const std::vector<double>& in_situ_pressure = {});

/// Elementwise permeability of the snapshot's dilatancy.
std::vector<double> permeability_field(const FieldSnapshot& snapshot);

struct CavernVolume
{
  /// Cross-section area enclosed by the wall [m^2]; half caverns are
  /// closed along the symmetry axis.
  double area = 0.0;
  /// Solid of revolution about the cavern axis [m^3].
  double volume = 0.0;
};

/// One entry per cavern loop of `mesh` evaluated on the coordinates
/// x + u. Throws TopologyError for an open wall chain that does not end on
/// the symmetry axis.
std::vector<CavernVolume> cavern_volume(const Mesh& mesh, const Eigen::VectorXd& u);

/// (V0 - V) / V0 * 100.
double volume_loss_percent(double initial, double current);

/// Displacement interpolated at a point of an element.
Vec2 interpolate_displacement(const Mesh& mesh, const ProbeLocation& where, const Eigen::VectorXd& u);

struct ProbeSample
{
  double t = 0.0; // [day]
  std::string probe;
  double u_x = 0.0;
  double u_y = 0.0;
  double s_vm = 0.0; // [Pa]
  double damage = 0.0;

  friend bool operator==(const ProbeSample&, const ProbeSample&) = default;
};

/// Legacy ASCII VTK (3.0) unstructured grid with point data `u` and cell
/// data s_vm, D, k, eps_vol and the stress components.
void export_vtk(const Mesh& mesh, const FieldSnapshot& snapshot, std::ostream& out);
void export_vtk(const Mesh& mesh, const FieldSnapshot& snapshot, const std::string& path);

/// Header `t_day,probe,u_x,u_y,s_vm,D`, rows in the given order, classic
/// locale with round-trip precision.
void export_probe_csv(const std::vector<ProbeSample>& samples, std::ostream& out);
void export_probe_csv(const std::vector<ProbeSample>& samples, const std::string& path);

} // namespace cavernsim
