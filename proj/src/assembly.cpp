#include "cavernsim/assembly.hpp"

#include "cavernsim/error.hpp"

#include <algorithm>
#include <numeric>

namespace cavernsim {

std::array<int, 6> Discretization::dofs(int e) const
{
  const auto& n = mesh->element(e).nodes;
  return {2 * n[0], 2 * n[0] + 1, 2 * n[1], 2 * n[1] + 1, 2 * n[2], 2 * n[2] + 1};
}

Discretization discretize(const Mesh& mesh, const MaterialCatalog& catalog)
{
  Discretization d;
  d.mesh = &mesh;
  const auto n = static_cast<std::size_t>(mesh.element_count());
  d.geometry.reserve(n);
  d.lame.reserve(n);
  d.C.reserve(n);
  for (int e = 0; e < mesh.element_count(); ++e) {
    d.geometry.push_back(element_geometry(mesh, e));
    const LameParams lame = lame_from(catalog.at(mesh.element(e).material).elastic);
    d.lame.push_back(lame);
    d.C.push_back(stiffness_matrix(lame));
  }
  return d;
}

ElementMatrix element_stiffness(const ElementGeometry& g, const Eigen::Matrix3d& C)
{
  return g.area * g.B.transpose() * C * g.B;
}

StiffnessPattern::StiffnessPattern(const Mesh& mesh)
{
  const int ndof = mesh.dof_count();
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(mesh.element_count()) * 36);
  auto element_dofs = [&](int e) {
    const auto& n = mesh.element(e).nodes;
    return std::array<int, 6>{2 * n[0], 2 * n[0] + 1, 2 * n[1], 2 * n[1] + 1, 2 * n[2], 2 * n[2] + 1};
  };
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto dofs = element_dofs(e);
    for (int r : dofs) {
      for (int c : dofs) {
        entries.emplace_back(r, c, 0.0);
      }
    }
  }
  skeleton_.resize(ndof, ndof);
  skeleton_.setFromTriplets(entries.begin(), entries.end());
  skeleton_.makeCompressed();

  const int* outer = skeleton_.outerIndexPtr();
  const int* inner = skeleton_.innerIndexPtr();
  slots_.resize(static_cast<std::size_t>(mesh.element_count()));
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto dofs = element_dofs(e);
    auto& slot = slots_[static_cast<std::size_t>(e)];
    for (int j = 0; j < 6; ++j) {
      const int col = dofs[static_cast<std::size_t>(j)];
      const int* first = inner + outer[col];
      const int* last = inner + outer[col + 1];
      for (int i = 0; i < 6; ++i) {
        const int* hit = std::lower_bound(first, last, dofs[static_cast<std::size_t>(i)]);
        slot[static_cast<std::size_t>(6 * j + i)] = static_cast<int>(hit - inner);
      }
    }
  }
}

void StiffnessPattern::assemble(const Discretization& disc, SparseMatrix& K) const
{
  if (K.nonZeros() != skeleton_.nonZeros() || K.rows() != skeleton_.rows()) {
    K = skeleton_;
  }
  double* values = K.valuePtr();
  std::fill(values, values + K.nonZeros(), 0.0);
  for (int e = 0; e < disc.element_count(); ++e) {
    const auto ke = element_stiffness(disc.geometry[static_cast<std::size_t>(e)], disc.C[static_cast<std::size_t>(e)]);
    const auto& slot = slots_[static_cast<std::size_t>(e)];
    for (int j = 0; j < 6; ++j) {
      for (int i = 0; i < 6; ++i) {
        values[slot[static_cast<std::size_t>(6 * j + i)]] += ke(i, j);
      }
    }
  }
}

SparseMatrix StiffnessPattern::assemble(const Discretization& disc) const
{
  SparseMatrix K = skeleton_;
  assemble(disc, K);
  return K;
}

SparseMatrix assemble_stiffness(const Discretization& disc)
{
  return StiffnessPattern(*disc.mesh).assemble(disc);
}

SparseMatrix assemble_stiffness(const Mesh& mesh, const MaterialCatalog& catalog)
{
  return assemble_stiffness(discretize(mesh, catalog));
}

Eigen::VectorXd assemble_creep_forces(const Discretization& disc, const std::vector<CreepStrain>& creep)
{
  if (static_cast<int>(creep.size()) != disc.element_count()) {
    throw ValidationError("creep", "one creep strain per element required");
  }
  Eigen::VectorXd F = Eigen::VectorXd::Zero(disc.mesh->dof_count());
  for (int e = 0; e < disc.element_count(); ++e) {
    const auto i = static_cast<std::size_t>(e);
    const Eigen::Vector3d ec(creep[i].xx, creep[i].yy, creep[i].gxy);
    if (ec.isZero(0.0)) {
      continue;
    }
    const auto& g = disc.geometry[i];
    const Eigen::Matrix<double, 6, 1> fe = g.area * g.B.transpose() * (disc.C[i] * ec);
    const auto dofs = disc.dofs(e);
    for (int k = 0; k < 6; ++k) {
      F[dofs[static_cast<std::size_t>(k)]] += fe[k];
    }
  }
  return F;
}

void ConstraintSet::add(int dof, double value)
{
  dofs.push_back(dof);
  values.push_back(value);
}

void ConstraintSet::normalize()
{
  std::vector<std::size_t> order(dofs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return dofs[a] < dofs[b]; });
  ConstraintSet out;
  for (auto k : order) {
    if (out.dofs.empty() || out.dofs.back() != dofs[k]) {
      out.add(dofs[k], values[k]);
    }
  }
  *this = std::move(out);
}

ConstraintSet constraints_from_tags(const Mesh& mesh)
{
  ConstraintSet c;
  for (const auto& seg : mesh.boundary()) {
    if (seg.tag == BoundaryTag::Bottom) {
      c.add(2 * seg.a + 1);
      c.add(2 * seg.b + 1);
    } else if (seg.tag == BoundaryTag::SymmetryAxis) {
      c.add(2 * seg.a);
      c.add(2 * seg.b);
    }
  }
  c.normalize();
  return c;
}

ConstrainedSystem::ConstrainedSystem(const SparseMatrix& K, ConstraintSet constraints)
  : constraints_(std::move(constraints))
{
  constraints_.normalize();
  const int n = static_cast<int>(K.rows());
  free_index_.assign(static_cast<std::size_t>(n), -1);
  std::vector<int> fixed_index(static_cast<std::size_t>(n), -1);
  for (std::size_t k = 0; k < constraints_.dofs.size(); ++k) {
    const int dof = constraints_.dofs[k];
    if (dof < 0 || dof >= n) {
      throw ValidationError("constraints", "dof " + std::to_string(dof) + " out of range");
    }
    fixed_index[static_cast<std::size_t>(dof)] = static_cast<int>(k);
  }
  for (int d = 0; d < n; ++d) {
    if (fixed_index[static_cast<std::size_t>(d)] < 0) {
      free_index_[static_cast<std::size_t>(d)] = static_cast<int>(free_.size());
      free_.push_back(d);
    }
  }
  u_c_ = Eigen::Map<const Eigen::VectorXd>(constraints_.values.data(), static_cast<Eigen::Index>(constraints_.values.size()));

  std::vector<Eigen::Triplet<double>> ff;
  std::vector<Eigen::Triplet<double>> fc;
  ff.reserve(static_cast<std::size_t>(K.nonZeros()));
  for (int col = 0; col < K.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(K, col); it; ++it) {
      const int r = free_index_[static_cast<std::size_t>(it.row())];
      if (r < 0) {
        continue;
      }
      const int cf = free_index_[static_cast<std::size_t>(col)];
      if (cf >= 0) {
        ff.emplace_back(r, cf, it.value());
      } else {
        fc.emplace_back(r, fixed_index[static_cast<std::size_t>(col)], it.value());
      }
    }
  }
  const auto nf = static_cast<Eigen::Index>(free_.size());
  K_ff_.resize(nf, nf);
  K_ff_.setFromTriplets(ff.begin(), ff.end());
  K_fc_.resize(nf, static_cast<Eigen::Index>(constraints_.dofs.size()));
  K_fc_.setFromTriplets(fc.begin(), fc.end());

  if (nf == 0) {
    return;
  }
  ldlt_ = std::make_shared<Eigen::SimplicialLDLT<SparseMatrix>>(K_ff_);
  if (ldlt_->info() != Eigen::Success) {
    throw SolverError("stiffness factorisation failed: singular system (insufficient constraints?)");
  }
  const Eigen::VectorXd pivots = ldlt_->vectorD();
  const double max_pivot = pivots.cwiseAbs().maxCoeff();
  if (!(pivots.minCoeff() > 1e-12 * max_pivot)) {
    throw SolverError("stiffness matrix is singular or indefinite after constraints "
                      "(free rigid-body mode; min/max pivot " +
                      std::to_string(pivots.minCoeff() / max_pivot) + ")");
  }
}

Eigen::VectorXd ConstrainedSystem::solve(const Eigen::VectorXd& F) const
{
  const auto n = static_cast<Eigen::Index>(free_index_.size());
  if (F.size() != n) {
    throw ValidationError("F", "force vector length does not match the system");
  }
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  for (std::size_t k = 0; k < constraints_.dofs.size(); ++k) {
    u[constraints_.dofs[k]] = constraints_.values[k];
  }
  if (free_.empty()) {
    return u;
  }
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(free_.size()));
  for (std::size_t k = 0; k < free_.size(); ++k) {
    rhs[static_cast<Eigen::Index>(k)] = F[free_[k]];
  }
  if (u_c_.size() > 0) {
    rhs -= K_fc_ * u_c_;
  }
  const Eigen::VectorXd uf = ldlt_->solve(rhs);
  for (std::size_t k = 0; k < free_.size(); ++k) {
    u[free_[k]] = uf[static_cast<Eigen::Index>(k)];
  }
  return u;
}

Eigen::VectorXd ConstrainedSystem::free_residual(const Eigen::VectorXd& F, const Eigen::VectorXd& u) const
{
  Eigen::VectorXd uf(static_cast<Eigen::Index>(free_.size()));
  Eigen::VectorXd r(static_cast<Eigen::Index>(free_.size()));
  for (std::size_t k = 0; k < free_.size(); ++k) {
    uf[static_cast<Eigen::Index>(k)] = u[free_[k]];
    r[static_cast<Eigen::Index>(k)] = F[free_[k]];
  }
  r -= K_ff_ * uf;
  if (u_c_.size() > 0) {
    r -= K_fc_ * u_c_;
  }
  return r;
}

std::vector<ElementFields> recover_fields(const Discretization& disc,
                                          const Eigen::VectorXd& u,
                                          const std::vector<CreepStrain>& creep)
{
  if (u.size() != disc.mesh->dof_count()) {
    throw ValidationError("u", "displacement length does not match the mesh");
  }
  std::vector<ElementFields> out(static_cast<std::size_t>(disc.element_count()));
  for (int e = 0; e < disc.element_count(); ++e) {
    const auto i = static_cast<std::size_t>(e);
    const auto dofs = disc.dofs(e);
    Eigen::Matrix<double, 6, 1> ue;
    for (int k = 0; k < 6; ++k) {
      ue[k] = u[dofs[static_cast<std::size_t>(k)]];
    }
    const Eigen::Vector3d eps = disc.geometry[i].B * ue;
    const CreepStrain ec = creep.empty() ? CreepStrain{} : creep[i];
    const Eigen::Vector3d sig = disc.C[i] * (eps - Eigen::Vector3d(ec.xx, ec.yy, ec.gxy));
    const auto& lame = disc.lame[i];
    auto& f = out[i];
    f.strain = {eps[0], eps[1], eps[2]};
    f.stress = {sig[0], sig[1], sig[2], lame.lambda * (eps[0] + eps[1] - ec.xx - ec.yy - ec.zz) - 2.0 * lame.mu * ec.zz};
    f.von_mises = von_mises(f.stress);
  }
  return out;
}

} // namespace cavernsim
