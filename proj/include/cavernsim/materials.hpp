#pragma once

#include <Eigen/Core>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cavernsim {

/// Universal gas constant [J/(mol K)].
inline constexpr double gas_constant = 8.314;

struct ElasticParams
{
  double youngs = 35e9;  // [Pa]
  double poisson = 0.25; // [-]

  friend bool operator==(const ElasticParams&, const ElasticParams&) = default;
};

struct LameParams
{
  double lambda = 0.0; // [Pa]
  double mu = 0.0;     // [Pa]
};

/// Norton power law with Arrhenius factor. `a` is in Pa^-n s^-1 so that
/// a * exp(-Q/RT) * sigma^n is a strain rate for sigma in Pa.
struct CreepLaw
{
  double a = 0.0;
  double n = 1.0;
  double Q = 0.0; // [J/mol]

  friend bool operator==(const CreepLaw&, const CreepLaw&) = default;
};

/// How the resistance constant enters the Kachanov rate.
enum class DamageLawForm
{
  /// dD/dt = sigma^r / (B (1 - D)^r)
  ResistanceScalesRate,
  /// dD/dt = (sigma / (B (1 - D)))^r
  ResistanceInsidePower,
};

/// Kachanov damage constants; stress in MPa and time in days.
struct DamageParams
{
  double B = 4e4;
  double r = 2.5;
  double D_star = 0.95;
  DamageLawForm form = DamageLawForm::ResistanceScalesRate;
  /// Tabulated constants l and b; carried through configuration but not
  /// part of the evolution law.
  double l = 2.5;
  double b = 7e-22;

  friend bool operator==(const DamageParams&, const DamageParams&) = default;
};

struct Material
{
  std::string name;
  double density = 2200.0; // [kg/m^3]
  ElasticParams elastic;
  std::optional<CreepLaw> creep;
  std::optional<DamageParams> damage;

  friend bool operator==(const Material&, const Material&) = default;
};

/// Throws ValidationError when the elastic invariants fail, including the
/// incompressible limit nu = 0.5.
LameParams lame_from(const ElasticParams& elastic);
ElasticParams elastic_from(const LameParams& lame);

/// Plane-strain operator acting on (exx, eyy, gxy).
Eigen::Matrix3d stiffness_matrix(const LameParams& lame);

/// Converts a law published as rate[1/day] = coefficient * sigma[MPa]^n to
/// SI, multiplied by `scale`.
CreepLaw creep_law_from_mpa_per_day(double coefficient, double n, double scale = 1.0);

/// Throws ValidationError (path "materials.<name>") on invariant violation.
void validate(const Material& material);

class MaterialCatalog
{
public:
  MaterialCatalog() = default;

  /// Inserts or replaces.
  void insert(Material material);
  bool contains(const std::string& name) const { return materials_.contains(name); }
  /// Throws ValidationError for unknown names.
  const Material& at(const std::string& name) const;
  std::vector<std::string> names() const;

  friend bool operator==(const MaterialCatalog&, const MaterialCatalog&) = default;

private:
  std::map<std::string, Material> materials_;
};

/// Factor applied to the interlayer creep coefficients for the lower
/// in-situ temperature.
inline constexpr double interlayer_temperature_scale = 1e-3;

/// halite, potash, carnallite, bischofite (temperature scaled) plus
/// carnallite-raw and bischofite-raw with the unscaled coefficients.
MaterialCatalog builtin_catalog();

} // namespace cavernsim
