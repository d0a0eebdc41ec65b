#pragma once

#include "cavernsim/assembly.hpp"
#include "cavernsim/constitutive.hpp"
#include "cavernsim/materials.hpp"
#include "cavernsim/mesh.hpp"
#include "cavernsim/postprocess.hpp"

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace cavernsim {

enum class Scheme
{
  Explicit,
  Implicit,
};

struct IntegratorConfig
{
  Scheme scheme = Scheme::Implicit;
  double dt = 1.5;    // [day]
  double t_end = 275; // [day]
  /// Relative to the norm of the current total load F_ext + F_cr.
  double residual_tolerance = 1e-6;
  int max_iterations = 50;
  bool damage_enabled = false;
  /// Interval between stored snapshots [day]; 0 keeps the first and last.
  double snapshot_interval = 0.0;
  /// Re-evaluate element operators on x + u after every step.
  bool updated_geometry = false;
  /// An implicit step that fails to converge is retried as two half steps,
  /// at most this many times in a row. 0 makes non-convergence fatal.
  int max_step_cuts = 10;

  friend bool operator==(const IntegratorConfig&, const IntegratorConfig&) = default;
};

/// Throws ValidationError naming the offending field.
void validate(const IntegratorConfig& config);

/// Everything a run needs besides the integrator settings.
struct Scene
{
  Mesh mesh;
  MaterialCatalog catalog;
  /// Per element [K].
  std::vector<double> temperature;
  /// Isotropic in-situ compression per element, added to the reported
  /// stress only [Pa]. Empty means none.
  std::vector<double> in_situ_pressure;
  ConstraintSet constraints;
  /// Nodal load at time t [day].
  std::function<Eigen::VectorXd(double)> external_force;
};

struct SimulationState
{
  double t = 0.0; // [day]
  int step = 0;
  Eigen::VectorXd u;
  std::vector<CreepStrain> creep;
  std::vector<double> damage;
  /// Fields recovered from u and creep.
  std::vector<ElementFields> fields;
};

struct StepReport
{
  int iterations = 0;
  /// Relative residual norm of every iteration (implicit only).
  std::vector<double> residuals;
  /// Largest per-element |d eps_cr| / |eps_el| of the step.
  double creep_increment_ratio = 0.0;
  /// Elements whose damage reached D*.
  std::vector<int> failed_elements;
  /// Number of halvings needed by the smallest accepted sub-step.
  int cuts = 0;
};

struct RunEvent
{
  double t = 0.0;
  std::string kind; // "warning", "step-cut", "element-failure", "solver-failure"
  std::string message;
  int element = -1;
};

struct VolumeSample
{
  double t = 0.0;
  std::vector<CavernVolume> caverns;
};

struct RunArtifact
{
  enum class Status
  {
    Completed,
    DamageFailure,
  };

  Status status = Status::Completed;
  std::vector<FieldSnapshot> snapshots;
  std::vector<ProbeSample> probes;
  std::vector<VolumeSample> volumes;
  std::vector<RunEvent> events;
  std::vector<int> iterations_per_step;
  SimulationState final_state;
};

class Simulator
{
public:
  /// Resolves materials, factorises the constrained stiffness and locates
  /// the probes. Throws ValidationError / SolverError.
  Simulator(Scene scene, IntegratorConfig config);
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  const Scene& scene() const { return scene_; }
  const IntegratorConfig& config() const { return config_; }
  const Discretization& discretization() const { return disc_; }

  /// Elastic solution at t = 0 with F_cr = 0.
  SimulationState initial_state() const;

  /// Creep and damage advance with the stress at step start, then the
  /// displacement is re-solved.
  SimulationState step_explicit(const SimulationState& state, double dt, StepReport* report = nullptr);

  /// Lagged creep iterated with the elastic Jacobian until the relative
  /// residual drops below the tolerance. Throws SolverError with the
  /// residual trace on non-convergence.
  SimulationState step_implicit(const SimulationState& state, double dt, StepReport* report = nullptr);

  SimulationState step(const SimulationState& state, double dt, StepReport* report = nullptr);

  /// Implicit steps are subdivided on non-convergence (see
  /// IntegratorConfig::max_step_cuts); explicit steps are taken as is.
  SimulationState advance(const SimulationState& state, double dt, StepReport* report = nullptr);

  /// Full run from the elastic state to t_end. Damage failure ends the run
  /// with status DamageFailure; solver failures propagate.
  RunArtifact run();

  /// Probe samples of a state, in mesh probe order.
  std::vector<ProbeSample> sample_probes(const SimulationState& state) const;
  FieldSnapshot snapshot(const SimulationState& state) const;

private:
  void rebuild(const Eigen::VectorXd* u);
  SimulationState advance_cut(const SimulationState& state, double dt, int depth, StepReport& report);
  std::vector<CreepStrain> creep_rates(const SimulationState& state, const std::vector<ElementFields>& fields) const;
  void advance_damage_field(const SimulationState& from, SimulationState& to, double dt, StepReport* report) const;

  Scene scene_;
  IntegratorConfig config_;
  Discretization disc_;
  std::optional<StiffnessPattern> pattern_;
  SparseMatrix K_;
  std::optional<ConstrainedSystem> system_;
  std::vector<std::optional<CreepLaw>> creep_law_;
  std::vector<DamageParams> damage_params_;
  std::vector<std::optional<ProbeLocation>> probe_locations_;
  Mesh deformed_;
};

/// Builds and runs a simulator.
RunArtifact run_simulation(Scene scene, const IntegratorConfig& config);

} // namespace cavernsim
