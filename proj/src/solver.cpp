#include "cavernsim/solver.hpp"

#include "cavernsim/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cavernsim {

namespace {

constexpr double seconds_per_day = 86400.0;

double strain_norm(double xx, double yy, double gxy, double zz)
{
  return std::sqrt(xx * xx + yy * yy + zz * zz + 0.5 * gxy * gxy);
}

} // namespace

void validate(const IntegratorConfig& c)
{
  if (!(c.dt > 0.0)) {
    throw ValidationError("integrator.dt", "must be positive");
  }
  if (!(c.t_end >= 0.0)) {
    throw ValidationError("integrator.t_end", "must be >= 0");
  }
  if (!(c.residual_tolerance > 0.0)) {
    throw ValidationError("integrator.residual_tolerance", "must be positive");
  }
  if (c.max_iterations < 1) {
    throw ValidationError("integrator.max_iterations", "must be >= 1");
  }
  if (c.max_step_cuts < 0) {
    throw ValidationError("integrator.max_step_cuts", "must be >= 0");
  }
  if (!(c.snapshot_interval >= 0.0)) {
    throw ValidationError("integrator.snapshot_interval", "must be >= 0");
  }
}

Simulator::Simulator(Scene scene, IntegratorConfig config)
  : scene_(std::move(scene))
  , config_(config)
{
  validate(config_);
  const int ne = scene_.mesh.element_count();
  if (static_cast<int>(scene_.temperature.size()) != ne) {
    throw ValidationError("scene.temperature", "one temperature per element required");
  }
  if (!scene_.in_situ_pressure.empty() && static_cast<int>(scene_.in_situ_pressure.size()) != ne) {
    throw ValidationError("scene.in_situ_pressure", "one value per element required");
  }
  if (!scene_.external_force) {
    throw ValidationError("scene.external_force", "missing load");
  }
  for (int e = 0; e < ne; ++e) {
    const Material& m = scene_.catalog.at(scene_.mesh.element(e).material);
    if (m.creep && !(scene_.temperature[static_cast<std::size_t>(e)] > 0.0)) {
      throw ValidationError("scene.temperature", "temperature must be positive");
    }
    creep_law_.push_back(m.creep);
    damage_params_.push_back(m.damage.value_or(DamageParams{}));
  }
  pattern_.emplace(scene_.mesh);
  rebuild(nullptr);

  for (const auto& probe : scene_.mesh.probes()) {
    probe_locations_.push_back(locate_probe(scene_.mesh, probe.position));
  }
}

void Simulator::rebuild(const Eigen::VectorXd* u)
{
  if (u == nullptr) {
    disc_ = discretize(scene_.mesh, scene_.catalog);
  } else {
    std::vector<Vec2> moved = scene_.mesh.nodes();
    for (std::size_t i = 0; i < moved.size(); ++i) {
      moved[i].x += (*u)[static_cast<Eigen::Index>(2 * i)];
      moved[i].y += (*u)[static_cast<Eigen::Index>(2 * i + 1)];
    }
    deformed_ = Mesh(std::move(moved), scene_.mesh.elements(), scene_.mesh.boundary());
    disc_ = discretize(deformed_, scene_.catalog);
  }
  pattern_->assemble(disc_, K_);
  system_.emplace(K_, scene_.constraints);
}

SimulationState Simulator::initial_state() const
{
  SimulationState s;
  const auto ne = static_cast<std::size_t>(scene_.mesh.element_count());
  s.creep.assign(ne, CreepStrain{});
  s.damage.assign(ne, 0.0);
  s.u = system_->solve(scene_.external_force(0.0));
  s.fields = recover_fields(disc_, s.u, s.creep);
  return s;
}

std::vector<CreepStrain> Simulator::creep_rates(const SimulationState& state,
                                                const std::vector<ElementFields>& fields) const
{
  std::vector<CreepStrain> rates(fields.size());
  for (std::size_t e = 0; e < fields.size(); ++e) {
    if (!creep_law_[e]) {
      continue;
    }
    const double D = config_.damage_enabled ? state.damage[e] : 0.0;
    rates[e] = creep_strain_rate(fields[e].stress, *creep_law_[e], scene_.temperature[e], D);
  }
  return rates;
}

void Simulator::advance_damage_field(const SimulationState& from,
                                     SimulationState& to,
                                     double dt,
                                     StepReport* report) const
{
  to.damage = from.damage;
  if (!config_.damage_enabled) {
    return;
  }
  for (std::size_t e = 0; e < from.damage.size(); ++e) {
    if (!creep_law_[e]) {
      continue;
    }
    const double sv_mpa = from.fields[e].von_mises * 1e-6;
    const double D = advance_damage(from.damage[e], sv_mpa, dt, damage_params_[e]);
    to.damage[e] = std::max(D, from.damage[e]);
    if (to.damage[e] >= damage_params_[e].D_star && report != nullptr) {
      report->failed_elements.push_back(static_cast<int>(e));
    }
  }
}

SimulationState Simulator::step_explicit(const SimulationState& state, double dt, StepReport* report)
{
  StepReport local;
  StepReport& rep = report != nullptr ? *report : local;
  SimulationState next;
  next.t = state.t + dt;
  next.step = state.step + 1;

  const auto rates = creep_rates(state, state.fields);
  const double dt_s = dt * seconds_per_day;
  next.creep = state.creep;
  for (std::size_t e = 0; e < rates.size(); ++e) {
    const CreepStrain inc = dt_s * rates[e];
    next.creep[e] += inc;
    const auto& f = state.fields[e];
    const auto& c = state.creep[e];
    const double elastic = strain_norm(f.strain.xx - c.xx, f.strain.yy - c.yy, f.strain.gxy - c.gxy, -c.zz);
    if (elastic > 0.0) {
      rep.creep_increment_ratio =
        std::max(rep.creep_increment_ratio, strain_norm(inc.xx, inc.yy, inc.gxy, inc.zz) / elastic);
    }
  }
  advance_damage_field(state, next, dt, &rep);

  const Eigen::VectorXd F = scene_.external_force(next.t) + assemble_creep_forces(disc_, next.creep);
  next.u = system_->solve(F);
  next.fields = recover_fields(disc_, next.u, next.creep);
  rep.iterations = 1;
  return next;
}

SimulationState Simulator::step_implicit(const SimulationState& state, double dt, StepReport* report)
{
  StepReport local;
  StepReport& rep = report != nullptr ? *report : local;
  SimulationState next;
  next.t = state.t + dt;
  next.step = state.step + 1;
  advance_damage_field(state, next, dt, &rep);

  const double dt_s = dt * seconds_per_day;
  const Eigen::VectorXd F_ext = scene_.external_force(next.t);

  Eigen::VectorXd u = state.u;
  std::vector<CreepStrain> trial = state.creep;
  std::vector<CreepStrain> updated(state.creep.size());
  for (int it = 0; it < config_.max_iterations; ++it) {
    const auto fields = recover_fields(disc_, u, trial);
    const auto rates = creep_rates(state, fields);
    for (std::size_t e = 0; e < updated.size(); ++e) {
      updated[e] = state.creep[e];
      updated[e] += dt_s * rates[e];
    }
    const Eigen::VectorXd F = F_ext + assemble_creep_forces(disc_, updated);
    const Eigen::VectorXd R = system_->free_residual(F, u);
    Eigen::VectorXd F_free(static_cast<Eigen::Index>(system_->free_dofs().size()));
    for (std::size_t k = 0; k < system_->free_dofs().size(); ++k) {
      F_free[static_cast<Eigen::Index>(k)] = F[system_->free_dofs()[k]];
    }
    const double scale = std::max(F_free.norm(), std::numeric_limits<double>::min());
    const double relative = R.norm() / scale;
    rep.residuals.push_back(relative);
    rep.iterations = it + 1;
    if (!std::isfinite(relative) || relative > 1e6) {
      break;
    }
    if (relative < config_.residual_tolerance) {
      next.u = std::move(u);
      next.creep = std::move(updated);
      next.fields = recover_fields(disc_, next.u, next.creep);
      return next;
    }
    u = system_->solve(F);
    trial = updated;
  }
  std::ostringstream msg;
  msg << "implicit step to t = " << next.t << " day did not converge in " << rep.iterations
      << " iterations (last relative residual " << rep.residuals.back() << ")";
  throw SolverError(msg.str(), rep.residuals);
}

SimulationState Simulator::step(const SimulationState& state, double dt, StepReport* report)
{
  return config_.scheme == Scheme::Explicit ? step_explicit(state, dt, report) : step_implicit(state, dt, report);
}

SimulationState Simulator::advance(const SimulationState& state, double dt, StepReport* report)
{
  StepReport local;
  StepReport& rep = report != nullptr ? *report : local;
  if (config_.scheme == Scheme::Explicit) {
    return step_explicit(state, dt, &rep);
  }
  return advance_cut(state, dt, 0, rep);
}

SimulationState Simulator::advance_cut(const SimulationState& state, double dt, int depth, StepReport& rep)
{
  StepReport attempt;
  try {
    SimulationState next = step_implicit(state, dt, &attempt);
    rep.iterations += attempt.iterations;
    rep.residuals.insert(rep.residuals.end(), attempt.residuals.begin(), attempt.residuals.end());
    rep.failed_elements.insert(rep.failed_elements.end(), attempt.failed_elements.begin(), attempt.failed_elements.end());
    rep.cuts = std::max(rep.cuts, depth);
    return next;
  } catch (const SolverError&) {
    if (depth >= config_.max_step_cuts) {
      throw;
    }
    rep.iterations += attempt.iterations;
  }
  const SimulationState half = advance_cut(state, 0.5 * dt, depth + 1, rep);
  if (!rep.failed_elements.empty()) {
    return half;
  }
  SimulationState next = advance_cut(half, 0.5 * dt, depth + 1, rep);
  next.step = state.step + 1;
  return next;
}

std::vector<ProbeSample> Simulator::sample_probes(const SimulationState& state) const
{
  std::vector<ProbeSample> out;
  const auto& probes = scene_.mesh.probes();
  for (std::size_t p = 0; p < probes.size(); ++p) {
    const auto& where = probe_locations_[p];
    if (!where) {
      continue;
    }
    const Vec2 d = interpolate_displacement(scene_.mesh, *where, state.u);
    const auto e = static_cast<std::size_t>(where->element);
    out.push_back({state.t, probes[p].label, d.x, d.y, state.fields[e].von_mises, state.damage[e]});
  }
  return out;
}

FieldSnapshot Simulator::snapshot(const SimulationState& state) const
{
  return make_snapshot(state.t, state.u, state.fields, state.creep, state.damage, scene_.in_situ_pressure);
}

RunArtifact Simulator::run()
{
  RunArtifact art;
  const bool has_caverns = !scene_.mesh.cavern_loops().empty();
  auto record = [&](const SimulationState& s) {
    const auto samples = sample_probes(s);
    art.probes.insert(art.probes.end(), samples.begin(), samples.end());
    if (has_caverns) {
      art.volumes.push_back({s.t, cavern_volume(scene_.mesh, s.u)});
    }
  };

  SimulationState state = initial_state();
  record(state);
  art.snapshots.push_back(snapshot(state));
  double next_snapshot = config_.snapshot_interval;
  bool warned = false;
  const double eps = 1e-9 * config_.dt;

  while (state.t < config_.t_end - eps) {
    const double h = std::min(config_.dt, config_.t_end - state.t);
    StepReport rep;
    try {
      state = advance(state, h, &rep);
    } catch (const SolverError& e) {
      art.events.push_back({state.t, "solver-failure", e.what(), -1});
      throw;
    }
    if (config_.updated_geometry) {
      rebuild(&state.u);
      state.fields = recover_fields(disc_, state.u, state.creep);
    }
    art.iterations_per_step.push_back(rep.iterations);
    if (rep.cuts > 0) {
      std::ostringstream msg;
      msg << "step to t = " << state.t << " day subdivided " << rep.cuts << " time(s) to converge";
      art.events.push_back({state.t, "step-cut", msg.str(), -1});
    }
    if (config_.scheme == Scheme::Explicit && !warned && rep.creep_increment_ratio > 0.1) {
      std::ostringstream msg;
      msg << "explicit creep increment reached " << rep.creep_increment_ratio * 100.0
          << "% of the elastic strain; consider a smaller dt";
      art.events.push_back({state.t, "warning", msg.str(), -1});
      warned = true;
    }
    record(state);
    if (!rep.failed_elements.empty()) {
      for (int e : rep.failed_elements) {
        std::ostringstream msg;
        msg << "damage " << state.damage[static_cast<std::size_t>(e)] << " reached D* in element " << e;
        art.events.push_back({state.t, "element-failure", msg.str(), e});
      }
      art.status = RunArtifact::Status::DamageFailure;
      break;
    }
    if (config_.snapshot_interval > 0.0 && state.t >= next_snapshot - eps) {
      art.snapshots.push_back(snapshot(state));
      while (next_snapshot <= state.t + eps) {
        next_snapshot += config_.snapshot_interval;
      }
    }
  }
  if (art.snapshots.back().t != state.t) {
    art.snapshots.push_back(snapshot(state));
  }
  art.final_state = std::move(state);
  return art;
}

RunArtifact run_simulation(Scene scene, const IntegratorConfig& config)
{
  Simulator sim(std::move(scene), config);
  return sim.run();
}

} // namespace cavernsim
