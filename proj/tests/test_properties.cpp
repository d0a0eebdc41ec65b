// Randomized checks of structural invariants. Every case uses a fixed seed
// so failures are reproducible.
#include "cavernsim/assembly.hpp"
#include "cavernsim/loads.hpp"
#include "cavernsim/mesher.hpp"
#include "cavernsim/postprocess.hpp"
#include "cavernsim/scenarios.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <random>
#include <sstream>

using namespace cavernsim;

namespace {

Mesh random_mesh(std::mt19937& rng)
{
  std::uniform_int_distribution<int> cells(2, 6);
  std::uniform_real_distribution<double> size(0.5, 3.0);
  const double w = size(rng), h = size(rng);
  const int nx = cells(rng), ny = cells(rng);
  const Mesh base = generate_rectangle({0, 0}, w, h, nx, ny);
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);
  std::vector<Vec2> nodes = base.nodes();
  for (Vec2& p : nodes) {
    if (p.x > 1e-9 && p.x < w - 1e-9 && p.y > 1e-9 && p.y < h - 1e-9) {
      p.x += jitter(rng) * w / nx;
      p.y += jitter(rng) * h / ny;
    }
  }
  return Mesh(nodes, base.elements(), base.boundary());
}

MaterialCatalog random_catalog(std::mt19937& rng)
{
  std::uniform_real_distribution<double> E(1e9, 50e9), nu(0.0, 0.45);
  MaterialCatalog cat;
  cat.insert({"halite", 2200.0, ElasticParams{E(rng), nu(rng)}, CreepLaw{8.1e-27, 3.5, 51600.0}, std::nullopt});
  return cat;
}

} // namespace

TEST_SUITE("properties")
{
  TEST_CASE("creep flow is trace-free and coaxial with the deviator")
  {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> s(-40e6, 40e6), D(0.0, 0.9), T(290.0, 340.0);
    const CreepLaw law{8.1e-27, 3.5, 51600.0};
    for (int i = 0; i < 200; ++i) {
      const StressState sig{s(rng), s(rng), s(rng), s(rng)};
      const auto r = creep_strain_rate(sig, law, T(rng), D(rng));
      CHECK(std::abs(r.xx + r.yy + r.zz) <= 1e-10 * r.equivalent());
      const auto dev = deviatoric(sig);
      // rate = k * deviator with one positive factor k
      const double k = r.xx / dev.xx;
      CHECK(k > 0.0);
      CHECK(r.yy == doctest::Approx(k * dev.yy));
      CHECK(r.gxy == doctest::Approx(2.0 * k * sig.xy));
    }
  }

  TEST_CASE("rigid modes are in the null space of random meshes")
  {
    std::mt19937 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
      const Mesh m = random_mesh(rng);
      const SparseMatrix K = assemble_stiffness(m, random_catalog(rng));
      const int n = m.node_count();
      Eigen::VectorXd tx = Eigen::VectorXd::Zero(2 * n), ty = tx, rot = tx;
      for (int i = 0; i < n; ++i) {
        tx[2 * i] = 1.0;
        ty[2 * i + 1] = 1.0;
        rot[2 * i] = -m.node(i).y;
        rot[2 * i + 1] = m.node(i).x;
      }
      const double scale = Eigen::MatrixXd(K).norm();
      CHECK((K * tx).norm() <= 1e-10 * scale);
      CHECK((K * ty).norm() <= 1e-10 * scale);
      CHECK((K * rot).norm() <= 1e-9 * scale);
    }
  }

  TEST_CASE("constrained stiffness is symmetric positive definite")
  {
    std::mt19937 rng(13);
    for (int trial = 0; trial < 20; ++trial) {
      const Mesh m = random_mesh(rng);
      const SparseMatrix K = assemble_stiffness(m, random_catalog(rng));
      const Eigen::MatrixXd dense(K);
      CHECK((dense - dense.transpose()).norm() <= 1e-12 * dense.norm());
      const ConstraintSet c = constraints_from_tags(m);
      std::vector<bool> fixed(static_cast<std::size_t>(m.dof_count()), false);
      for (int d : c.dofs) {
        fixed[static_cast<std::size_t>(d)] = true;
      }
      std::vector<int> free;
      for (int d = 0; d < m.dof_count(); ++d) {
        if (!fixed[static_cast<std::size_t>(d)]) {
          free.push_back(d);
        }
      }
      Eigen::MatrixXd Kff(free.size(), free.size());
      for (std::size_t i = 0; i < free.size(); ++i) {
        for (std::size_t j = 0; j < free.size(); ++j) {
          Kff(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = dense(free[i], free[j]);
        }
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Kff);
      CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
  }

  TEST_CASE("patch test on random meshes and materials")
  {
    std::mt19937 rng(14);
    std::uniform_real_distribution<double> s(-20e6, 20e6);
    for (int trial = 0; trial < 20; ++trial) {
      const Mesh m = random_mesh(rng);
      const Discretization disc = discretize(m, random_catalog(rng));
      const double sxx = s(rng), syy = s(rng);
      const Eigen::VectorXd F =
        boundary_traction_forces(m, {BoundaryTag::Top, BoundaryTag::FarField}, [&](const Vec2&, const Vec2& n) {
          return Vec2{sxx * n.x, syy * n.y};
        });
      const ConstrainedSystem sys(assemble_stiffness(disc), constraints_from_tags(m));
      const auto fields = recover_fields(disc, sys.solve(F), {});
      const double scale = std::max(std::abs(sxx), std::abs(syy));
      for (const auto& f : fields) {
        CHECK(std::abs(f.stress.xx - sxx) <= 1e-7 * scale);
        CHECK(std::abs(f.stress.yy - syy) <= 1e-7 * scale);
        CHECK(std::abs(f.stress.xy) <= 1e-7 * scale);
      }
    }
  }

  TEST_CASE("uniform pressure on a closed cavern has no resultant")
  {
    std::mt19937 rng(15);
    std::uniform_real_distribution<double> ctc(140.0, 320.0), p(1e5, 2e7);
    for (int trial = 0; trial < 3; ++trial) {
      const double c = ctc(rng);
      const Mesh m =
        generate_cavern_domain(twin_cavern_domain(CavernProfile::capsule(25.0, 250.0), c, 500.0, 200.0, 200.0, 300.0));
      const double pressure = p(rng);
      const Eigen::VectorXd F = traction_nodal_forces(m, [&](const Vec2& x) { return x.x > 0.5 * c ? pressure : 0.0; });
      double fx = 0.0, fy = 0.0;
      for (int n = 0; n < m.node_count(); ++n) {
        fx += F[2 * n];
        fy += F[2 * n + 1];
      }
      CHECK(std::hypot(fx, fy) <= 1e-9 * pressure * 1000.0);
    }
  }

  TEST_CASE("cyclic schedules are periodic")
  {
    std::mt19937 rng(16);
    std::uniform_real_distribution<double> lo(0.2, 0.5), hi(0.5, 0.8), period(1.0, 30.0), duty(0.1, 0.9), t(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      const auto s = PressureSchedule::cyclic(lo(rng), hi(rng), period(rng), duty(rng));
      for (int k = 0; k < 20; ++k) {
        const double x = t(rng) * s.period;
        CHECK(s.fraction_at(x + 3.0 * s.period) == s.fraction_at(x));
        const double f = s.fraction_at(x);
        CHECK((f == s.p_min || f == s.p_max));
      }
    }
  }

  TEST_CASE("runs are deterministic")
  {
    Scenario s = builtin_scenario("uniaxial-benchmark");
    s.integrator.dt = 10.0;
    s.integrator.t_end = 100.0;
    std::ostringstream a, b;
    export_probe_csv(run_scenario(s).artifact.probes, a);
    export_probe_csv(run_scenario(s).artifact.probes, b);
    CHECK(a.str() == b.str());
  }
}
