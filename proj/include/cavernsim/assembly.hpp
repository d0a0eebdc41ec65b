#pragma once

#include "cavernsim/constitutive.hpp"
#include "cavernsim/materials.hpp"
#include "cavernsim/mesh.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <memory>
#include <vector>

namespace cavernsim {

using SparseMatrix = Eigen::SparseMatrix<double>;
using ElementMatrix = Eigen::Matrix<double, 6, 6>;

/// Per-element geometry and elastic operators of a mesh, resolved once.
struct Discretization
{
  const Mesh* mesh = nullptr;
  std::vector<ElementGeometry> geometry;
  std::vector<LameParams> lame;
  std::vector<Eigen::Matrix3d> C;

  int element_count() const { return static_cast<int>(geometry.size()); }
  /// Global dof indices (2 per node) of element `e`.
  std::array<int, 6> dofs(int e) const;
};

/// Throws DegenerateElementError or ValidationError (unknown material).
Discretization discretize(const Mesh& mesh, const MaterialCatalog& catalog);

ElementMatrix element_stiffness(const ElementGeometry& geometry, const Eigen::Matrix3d& C);

/// Compressed-column matrix with the mesh connectivity pattern and, for
/// every element, the 36 offsets of its entries in the value array.
class StiffnessPattern
{
public:
  explicit StiffnessPattern(const Mesh& mesh);

  /// Zeroes the values and scatters every element block.
  void assemble(const Discretization& disc, SparseMatrix& K) const;
  SparseMatrix assemble(const Discretization& disc) const;

private:
  SparseMatrix skeleton_;
  std::vector<std::array<int, 36>> slots_;
};

/// K = sum_e B^T C B A.
SparseMatrix assemble_stiffness(const Discretization& disc);
SparseMatrix assemble_stiffness(const Mesh& mesh, const MaterialCatalog& catalog);

/// F_cr = sum_e B^T C eps_cr A using the in-plane creep components.
Eigen::VectorXd assemble_creep_forces(const Discretization& disc, const std::vector<CreepStrain>& creep);

/// Prescribed displacement components.
struct ConstraintSet
{
  std::vector<int> dofs;
  std::vector<double> values;

  void add(int dof, double value = 0.0);
  /// Sorts by dof and removes duplicates (the first value wins).
  void normalize();
};

/// Bottom fixes u_y, SymmetryAxis fixes u_x; Top and FarField stay free.
ConstraintSet constraints_from_tags(const Mesh& mesh);

/// K with the prescribed dofs eliminated and the free block factorised.
/// Throws SolverError when the free block is singular or indefinite.
class ConstrainedSystem
{
public:
  ConstrainedSystem(const SparseMatrix& K, ConstraintSet constraints);

  /// Full-length displacement with the prescribed values in place.
  Eigen::VectorXd solve(const Eigen::VectorXd& F) const;

  int free_count() const { return static_cast<int>(free_.size()); }
  const std::vector<int>& free_dofs() const { return free_; }
  /// Residual F - K u restricted to the free dofs.
  Eigen::VectorXd free_residual(const Eigen::VectorXd& F, const Eigen::VectorXd& u) const;

private:
  ConstraintSet constraints_;
  std::vector<int> free_;
  std::vector<int> free_index_;
  SparseMatrix K_ff_;
  SparseMatrix K_fc_;
  Eigen::VectorXd u_c_;
  std::shared_ptr<Eigen::SimplicialLDLT<SparseMatrix>> ldlt_;
};

struct ElementFields
{
  StrainState strain;
  StressState stress;
  double von_mises = 0.0;
};

/// Strain B u, stress C (eps - eps_cr) and the plane-strain out-of-plane
/// stress lambda (exx + eyy - tr eps_cr) - 2 mu eps_cr,zz per element.
std::vector<ElementFields> recover_fields(const Discretization& disc,
                                          const Eigen::VectorXd& u,
                                          const std::vector<CreepStrain>& creep);

} // namespace cavernsim
