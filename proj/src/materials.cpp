#include "cavernsim/materials.hpp"

#include "cavernsim/error.hpp"

#include <cmath>

namespace cavernsim {

LameParams lame_from(const ElasticParams& elastic)
{
  const double E = elastic.youngs;
  const double nu = elastic.poisson;
  if (!(E > 0.0)) {
    throw ValidationError("elastic.E", "Young's modulus must be positive");
  }
  if (nu >= 0.5) {
    throw ValidationError("elastic.nu", "Poisson ratio 0.5 is the incompressible limit");
  }
  if (!(nu >= 0.0)) {
    throw ValidationError("elastic.nu", "Poisson ratio must be in [0, 0.5)");
  }
  return {E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)), E / (2.0 * (1.0 + nu))};
}

ElasticParams elastic_from(const LameParams& lame)
{
  const double l = lame.lambda;
  const double m = lame.mu;
  return {m * (3.0 * l + 2.0 * m) / (l + m), l / (2.0 * (l + m))};
}

Eigen::Matrix3d stiffness_matrix(const LameParams& lame)
{
  const double l = lame.lambda;
  const double m = lame.mu;
  Eigen::Matrix3d C;
  C << l + 2.0 * m, l, 0.0,
       l, l + 2.0 * m, 0.0,
       0.0, 0.0, m;
  return C;
}

CreepLaw creep_law_from_mpa_per_day(double coefficient, double n, double scale)
{
  // rate[1/s] = coefficient * scale / 86400 * (sigma_Pa * 1e-6)^n
  return {coefficient * scale / 86400.0 * std::pow(1e-6, n), n, 0.0};
}

void validate(const Material& m)
{
  const std::string path = "materials." + m.name;
  if (!(m.density > 0.0)) {
    throw ValidationError(path + ".density", "must be positive");
  }
  try {
    lame_from(m.elastic);
  } catch (const ValidationError& e) {
    throw ValidationError(path + "." + e.path(), "invalid elastic parameters");
  }
  if (m.creep) {
    if (!(m.creep->a >= 0.0)) {
      throw ValidationError(path + ".creep.a", "must be >= 0");
    }
    if (!(m.creep->n >= 1.0)) {
      throw ValidationError(path + ".creep.n", "must be >= 1");
    }
    if (!(m.creep->Q >= 0.0)) {
      throw ValidationError(path + ".creep.Q", "must be >= 0");
    }
  }
  if (m.damage) {
    if (!m.creep) {
      throw ValidationError(path + ".damage", "damage requires a creep law");
    }
    if (!(m.damage->B > 0.0)) {
      throw ValidationError(path + ".damage.B", "must be positive");
    }
    if (!(m.damage->r > 0.0)) {
      throw ValidationError(path + ".damage.r", "must be positive");
    }
    if (!(m.damage->D_star > 0.0 && m.damage->D_star <= 1.0)) {
      throw ValidationError(path + ".damage.D_star", "must be in (0, 1]");
    }
  }
}

void MaterialCatalog::insert(Material material)
{
  validate(material);
  auto name = material.name;
  materials_[name] = std::move(material);
}

const Material& MaterialCatalog::at(const std::string& name) const
{
  const auto it = materials_.find(name);
  if (it == materials_.end()) {
    throw ValidationError("materials." + name, "unknown material");
  }
  return it->second;
}

std::vector<std::string> MaterialCatalog::names() const
{
  std::vector<std::string> out;
  for (const auto& [name, m] : materials_) {
    out.push_back(name);
  }
  return out;
}

MaterialCatalog builtin_catalog()
{
  MaterialCatalog cat;

  const CreepLaw halite_creep{8.10e-27, 3.5, 51600.0};
  cat.insert({"halite", 2200.0, {35e9, 0.25}, halite_creep, std::nullopt});
  cat.insert({"potash", 2200.0, {2.5e9, 0.35}, halite_creep, std::nullopt});

  cat.insert({"carnallite", 2200.0, {17e9, 0.33},
              creep_law_from_mpa_per_day(2.6804e-14, 5.0, interlayer_temperature_scale), std::nullopt});
  cat.insert({"bischofite", 2200.0, {18e9, 0.36},
              creep_law_from_mpa_per_day(1.1e-9, 4.6, interlayer_temperature_scale), std::nullopt});
  cat.insert({"carnallite-raw", 2200.0, {17e9, 0.33}, creep_law_from_mpa_per_day(2.6804e-14, 5.0), std::nullopt});
  cat.insert({"bischofite-raw", 2200.0, {18e9, 0.36}, creep_law_from_mpa_per_day(1.1e-9, 4.6), std::nullopt});
  return cat;
}

} // namespace cavernsim
