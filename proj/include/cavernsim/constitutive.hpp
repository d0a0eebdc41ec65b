#pragma once

#include "cavernsim/materials.hpp"

#include <optional>

namespace cavernsim {

/// Plane-strain stress [Pa], tension positive.
struct StressState
{
  double xx = 0.0;
  double yy = 0.0;
  double xy = 0.0;
  double zz = 0.0;

  friend bool operator==(const StressState&, const StressState&) = default;
};

/// In-plane strain with engineering shear gxy = 2 exy.
struct StrainState
{
  double xx = 0.0;
  double yy = 0.0;
  double gxy = 0.0;

  friend bool operator==(const StrainState&, const StrainState&) = default;
};

/// Creep strain (or rate) including the out-of-plane normal component;
/// shear is engineering.
struct CreepStrain
{
  double xx = 0.0;
  double yy = 0.0;
  double gxy = 0.0;
  double zz = 0.0;

  CreepStrain& operator+=(const CreepStrain& o)
  {
    xx += o.xx;
    yy += o.yy;
    gxy += o.gxy;
    zz += o.zz;
    return *this;
  }
  friend CreepStrain operator*(double s, const CreepStrain& c) { return {s * c.xx, s * c.yy, s * c.gxy, s * c.zz}; }
  friend bool operator==(const CreepStrain&, const CreepStrain&) = default;

  StrainState in_plane() const { return {xx, yy, gxy}; }
  /// sqrt(2/3 e:e) with the tensor shear gxy/2.
  double equivalent() const;
};

double von_mises(const StressState& s);
StressState deviatoric(const StressState& s);

/// Deviatoric Norton flow 3/2 a exp(-Q/RT) sv^(n-1) s evaluated on the
/// damage-intensified stress sigma / (1 - D). Throws DamageSaturatedError
/// when D is within 1e-9 of 1.
CreepStrain creep_strain_rate(const StressState& stress, const CreepLaw& law, double temperature, double damage = 0.0);

/// Scalar equivalent rate a exp(-Q/RT) sv^n [1/s].
double equivalent_creep_rate(double von_mises_pa, const CreepLaw& law, double temperature);

/// Kachanov damage rate [1/day] for von Mises stress in MPa.
double damage_rate(double von_mises_mpa, double damage, const DamageParams& params);

/// Time [day] at which D reaches 1 from D = 0 under constant stress, or
/// nullopt when the stress is zero.
std::optional<double> failure_time_constant_stress(double von_mises_mpa, const DamageParams& params);

/// Damage after holding `von_mises_mpa` for `dt_days`, integrated exactly
/// for the frozen stress. Returns 1 once the step crosses failure.
double advance_damage(double damage, double von_mises_mpa, double dt_days, const DamageParams& params);

struct DamageFailure
{
  double time_days = 0.0;
  int steps = 0;
};

/// Classical RK4 on dD/dt from D = 0 with step `dt_days`, halving the step
/// whenever a stage would leave [0, 1). Stops when D >= `threshold`.
DamageFailure integrate_damage_rk4(double von_mises_mpa,
                                   const DamageParams& params,
                                   double dt_days,
                                   double threshold = 1.0 - 1e-9);

/// |exx + eyy + ezz| of a (creep) strain.
double volumetric_strain(const StrainState& strain, double ezz);

inline constexpr double permeability_alpha = 2.13e-8;
inline constexpr double permeability_beta = 3.0;

/// Dilatancy permeability alpha * eps_vol^beta [m^2].
double permeability(double eps_vol);

} // namespace cavernsim
