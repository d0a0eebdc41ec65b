#include "cavernsim/constitutive.hpp"

#include "cavernsim/error.hpp"

#include <cmath>

namespace cavernsim {

double CreepStrain::equivalent() const
{
  const double exy = 0.5 * gxy;
  return std::sqrt(2.0 / 3.0 * (xx * xx + yy * yy + zz * zz + 2.0 * exy * exy));
}

double von_mises(const StressState& s)
{
  const double a = s.xx - s.yy;
  const double b = s.yy - s.zz;
  const double c = s.zz - s.xx;
  return std::sqrt(0.5 * (a * a + b * b + c * c) + 3.0 * s.xy * s.xy);
}

StressState deviatoric(const StressState& s)
{
  const double mean = (s.xx + s.yy + s.zz) / 3.0;
  return {s.xx - mean, s.yy - mean, s.xy, s.zz - mean};
}

double equivalent_creep_rate(double von_mises_pa, const CreepLaw& law, double temperature)
{
  if (von_mises_pa <= 0.0 || law.a == 0.0) {
    return 0.0;
  }
  return law.a * std::exp(-law.Q / (gas_constant * temperature)) * std::pow(von_mises_pa, law.n);
}

CreepStrain creep_strain_rate(const StressState& stress, const CreepLaw& law, double temperature, double damage)
{
  if (damage >= 1.0 - 1e-9) {
    throw DamageSaturatedError("creep rate requested at saturated damage D = " + std::to_string(damage));
  }
  const double scale = 1.0 / (1.0 - damage);
  const StressState intensified{scale * stress.xx, scale * stress.yy, scale * stress.xy, scale * stress.zz};
  const double sv = von_mises(intensified);
  if (sv == 0.0 || law.a == 0.0) {
    return {};
  }
  const StressState s = deviatoric(intensified);
  const double factor =
    1.5 * law.a * std::exp(-law.Q / (gas_constant * temperature)) * std::pow(sv, law.n - 1.0);
  // engineering shear rate is twice the tensor component
  return {factor * s.xx, factor * s.yy, 2.0 * factor * s.xy, factor * s.zz};
}

double damage_rate(double von_mises_mpa, double damage, const DamageParams& p)
{
  if (damage >= 1.0) {
    throw DamageSaturatedError("damage rate requested at D = " + std::to_string(damage));
  }
  if (von_mises_mpa <= 0.0) {
    return 0.0;
  }
  const double remaining = 1.0 - damage;
  if (p.form == DamageLawForm::ResistanceInsidePower) {
    return std::pow(von_mises_mpa / (p.B * remaining), p.r);
  }
  return std::pow(von_mises_mpa, p.r) / (p.B * std::pow(remaining, p.r));
}

namespace {

/// dD/dt = k (1 - D)^-r with k independent of D.
double rate_constant(double von_mises_mpa, const DamageParams& p)
{
  if (p.form == DamageLawForm::ResistanceInsidePower) {
    return std::pow(von_mises_mpa / p.B, p.r);
  }
  return std::pow(von_mises_mpa, p.r) / p.B;
}

} // namespace

std::optional<double> failure_time_constant_stress(double von_mises_mpa, const DamageParams& p)
{
  if (!(von_mises_mpa > 0.0)) {
    return std::nullopt;
  }
  return 1.0 / ((p.r + 1.0) * rate_constant(von_mises_mpa, p));
}

double advance_damage(double damage, double von_mises_mpa, double dt_days, const DamageParams& p)
{
  if (von_mises_mpa <= 0.0 || dt_days <= 0.0) {
    return damage;
  }
  // (1 - D)^(r+1) decreases linearly at rate (r+1) k under frozen stress
  const double y = std::pow(1.0 - damage, p.r + 1.0) - (p.r + 1.0) * rate_constant(von_mises_mpa, p) * dt_days;
  if (y <= 0.0) {
    return 1.0;
  }
  return 1.0 - std::pow(y, 1.0 / (p.r + 1.0));
}

DamageFailure integrate_damage_rk4(double von_mises_mpa, const DamageParams& p, double dt_days, double threshold)
{
  if (!(dt_days > 0.0)) {
    throw ValidationError("dt", "step must be positive");
  }
  DamageFailure out;
  if (!(von_mises_mpa > 0.0)) {
    out.time_days = std::numeric_limits<double>::infinity();
    return out;
  }
  auto f = [&](double d) { return d < 1.0 ? damage_rate(von_mises_mpa, d, p) : std::nan(""); };
  double t = 0.0;
  double d = 0.0;
  double h = dt_days;
  const double h_min = dt_days * 1e-12;
  while (d < threshold) {
    const double k1 = f(d);
    const double k2 = f(d + 0.5 * h * k1);
    const double k3 = f(d + 0.5 * h * k2);
    const double k4 = f(d + h * k3);
    const double next = d + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!std::isfinite(next) || next >= 1.0) {
      if (h <= h_min) {
        break;
      }
      h *= 0.5;
      continue;
    }
    d = next;
    t += h;
    ++out.steps;
  }
  out.time_days = t;
  return out;
}

double volumetric_strain(const StrainState& strain, double ezz)
{
  return std::abs(strain.xx + strain.yy + ezz);
}

double permeability(double eps_vol)
{
  return permeability_alpha * std::pow(eps_vol, permeability_beta);
}

} // namespace cavernsim
