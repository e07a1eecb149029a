#include "fixtures.hpp"
#include "hexcone/hamiltonian.hpp"
#include "hexcone/lattice.hpp"
#include "hexcone/spectra.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace hexcone;

namespace {

Eigen::VectorXd eigs(const Mat6& H) {
  Eigen::SelfAdjointEigenSolver<Mat6> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace

TEST_CASE("eigen bundle residuals and clusters") {
  const MatX H = bloch_matrix(build_toy_bulk(), 0.0, 0.0);
  const EigenBundle eb = eigen_bundle(H);
  CHECK(eb.residual < 1e-10);
  CHECK((eb.vectors.adjoint() * eb.vectors - MatX::Identity(6, 6)).norm() < 1e-10);
  CHECK(eb.clusters.size() == 3);
  CHECK(eb.clusters[1].size() == 4);
}

TEST_CASE("double Dirac point of the toy model") {
  const DiracData d = locate_double_dirac(build_toy_bulk());
  CHECK(std::abs(d.lambda_star) < 1e-12);
  CHECK(d.first_band == 1);
  CHECK(d.alignment_defect < 1e-8);
  CHECK(alignment_defect(d.u) < 1e-8);
  CHECK(std::abs(d.alpha - d.alpha_fd) < 1e-6 * std::abs(d.alpha));
  // Columns are orthonormal eigenvectors at lambda*.
  const Mat6 H = bloch_matrix(build_toy_bulk(), 0.0, 0.0);
  CHECK((d.u.adjoint() * d.u - Mat4::Identity()).norm() < 1e-12);
  CHECK((H * d.u - d.lambda_star * d.u).norm() < 1e-12);
}

TEST_CASE("reflection acts on the aligned basis through rho_tilde") {
  const DiracData d = locate_double_dirac(build_blended_bulk(0.2));
  const Mat6 P = reflection_op().on_gamma();
  const MatX rf = rho_tilde().evaluate({1});
  CHECK((P * d.u - d.u * rf).norm() < 1e-8);
}

TEST_CASE("cone slopes agree with the reduced model") {
  for (const HoppingKernel& K : {build_toy_bulk(), build_blended_bulk(0.2)}) {
    const DiracData d = locate_double_dirac(K);
    for (const auto& [c1, c2] : std::vector<std::pair<double, double>>{{1.0, 0.0}, {0.6, 0.8}, {-0.2, 1.0}}) {
      const double t = 1e-3 / std::hypot(c1, c2);
      const Eigen::VectorXd ev = eigs(bloch_matrix(K, t * c1, t * c2));
      const Eigen::Vector4d ref = dispersion_det_roots(d.H1, d.H2, t * c1, t * c2);
      for (int b = 0; b < 4; ++b) {
        const double got = ev(d.first_band + b) - d.lambda_star;
        CHECK(std::abs(got - ref(b)) <= 1e-3 * std::abs(ref(b)));
      }
    }
  }
}

TEST_CASE("gap criterion and its failure mode") {
  const auto& m = testing::blended();
  CHECK(m.crit.beta1 == doctest::Approx(-m.crit.beta3).epsilon(1e-8));
  CHECK(m.crit.beta > 1e-6);
  CHECK(m.crit.offdiag < 1e-10);
  const DiracData toy = locate_double_dirac(build_toy_bulk());
  const GapCriterion ct = verify_gap_criterion(build_Hper(), toy);
  CHECK(ct.beta == doctest::Approx(2.0).epsilon(1e-10));
  try {
    verify_gap_criterion(HoppingKernel{}, toy);
    FAIL("expected NearZeroCoupling");
  } catch (const NumericError& e) {
    CHECK(e.kind() == Failure::NearZeroCoupling);
  }
}

TEST_CASE("gap width, symmetry and band inversion") {
  const auto& m = testing::blended();
  double prev_offset = 0.0;
  for (double delta : {0.1, 0.05, 0.025}) {
    const GapReport g = gap_report(m.Hb, m.crit, m.dirac, delta);
    CHECK(g.has_gap);
    CHECK(g.lo < g.hi);
    CHECK(g.predicted == doctest::Approx(2.0 * m.crit.beta * delta));
    CHECK(std::abs(g.ratio - 1.0) < (delta < 0.03 ? 0.05 : 0.10));
    CHECK(g.interval_lo >= g.lo);
    CHECK(g.interval_hi <= g.hi);
    CHECK(g.inversion.plus_lower_rho2 >= 0.99);
    CHECK(g.inversion.minus_lower_rho1 >= 0.99);
    CHECK(g.inversion.plus_lower_rho1 <= 0.01);
    CHECK(g.inversion.minus_lower_rho2 <= 0.01);
    // Midpoint offset is second order in delta.
    CHECK(std::abs(g.midpoint_offset) <= 2.0 * delta * delta);
    if (prev_offset > 0.0) CHECK(std::abs(g.midpoint_offset) <= prev_offset);
    prev_offset = std::abs(g.midpoint_offset) + 1e-15;
  }
  const GapReport g0 = gap_report(m.Hb, m.crit, m.dirac, 0.0);
  CHECK(!g0.has_gap);
}

TEST_CASE("eigenpair asymptotics at and near Gamma") {
  const auto& m = testing::blended();
  for (double delta : {0.02, 0.01}) {
    const Eigen::VectorXd ev = eigs(bloch_matrix(perturbed(m.Hb, m.crit.oriented_per, delta), 0.0, 0.0));
    const double lo = ev(m.dirac.first_band + 1), hi = ev(m.dirac.first_band + 2);
    CHECK(std::abs(lo - (m.dirac.lambda_star - m.crit.beta * delta)) < 2.0 * delta * delta);
    CHECK(std::abs(hi - (m.dirac.lambda_star + m.crit.beta * delta)) < 2.0 * delta * delta);
  }
  const AsymptoticsReport a = eigenpair_asymptotics_check(m.Hb, m.crit, m.dirac, 0.02, 0.02, 0.0);
  const AsymptoticsReport b = eigenpair_asymptotics_check(m.Hb, m.crit, m.dirac, 0.01, 0.01, 0.0);
  CHECK(b.eigenvector_residual <= a.eigenvector_residual / 2.0 * 1.5);
  CHECK(b.eigenvalue_residual <= a.eigenvalue_residual);
}

TEST_CASE("flatness of the twofold clusters") {
  const auto& m = testing::blended();
  for (double delta : {0.05, -0.05}) {
    const auto fl = flatness_check(perturbed(m.Hb, m.crit.oriented_per, delta));
    int rho1 = 0, rho2 = 0;
    for (const FlatCluster& c : fl) {
      CHECK(c.first_order_norm <= 1e-10);
      CHECK(c.score >= 0.99);
      rho1 += c.irrep == "rho1";
      rho2 += c.irrep == "rho2";
    }
    CHECK(rho1 >= 1);
    CHECK(rho2 >= 1);
  }
  // Central-difference gradient of a twofold band at Gamma.
  const HoppingKernel K = perturbed(m.Hb, m.crit.oriented_per, 0.05);
  const double h = 1e-4;
  const int b = m.dirac.first_band;
  const double g1 = (eigs(bloch_matrix(K, h, 0.0))(b) - eigs(bloch_matrix(K, -h, 0.0))(b)) / (2.0 * h);
  const double g2 = (eigs(bloch_matrix(K, 0.0, h))(b) - eigs(bloch_matrix(K, 0.0, -h))(b)) / (2.0 * h);
  CHECK(std::hypot(g1, g2) <= 1e-6);
}

TEST_CASE("gauge-fixed cone modes") {
  const auto& m = testing::blended();
  const ConeGauge g = fix_gauge_v(m.dirac);
  CHECK((g.v.adjoint() * g.v - Mat4::Identity()).norm() < 1e-12);
  const double s = m.dirac.alpha > 0 ? 1.0 : -1.0;
  const Vec6 v1 = 0.5 * (s * m.dirac.u.col(0) + s * m.dirac.u.col(1) + m.dirac.u.col(2) + m.dirac.u.col(3));
  CHECK((g.v.col(0) - v1).norm() < 1e-12);
  const Mat6 P = reflection_op().on_gamma();
  const Vec6 fv = P * g.v.col(0);
  CHECK(std::abs(std::abs(fv.dot(g.v.col(0))) - 1.0) < 1e-12);
  const double a = std::abs(m.dirac.alpha);
  CHECK((g.slopes - Eigen::Vector4d(a, a, -a, -a)).norm() < 1e-12);
}

TEST_CASE("analytic labelling along the first dual axis") {
  const auto& m = testing::blended();
  const std::vector<double> grid = default_label_grid(200, 1e-4);
  const AnalyticBands fw = analytic_label(m.Hb, m.dirac, grid, +1);
  const AnalyticBands bw = analytic_label(m.Hb, m.dirac, grid, -1);
  REQUIRE(fw.theta.size() == grid.size());
  int mismatch = 0;
  for (std::size_t s = 0; s < grid.size(); ++s) {
    // Rearrangement of the sorted spectrum.
    std::vector<double> lab(fw.mu.row(s).data(), fw.mu.row(s).data() + 6);
    for (int k = 0; k < 6; ++k) lab[k] = fw.mu(s, k);
    std::sort(lab.begin(), lab.end());
    const Eigen::VectorXd ev = eigs(bloch_matrix(m.Hb, grid[s], 0.0));
    for (int k = 0; k < 6; ++k) CHECK(std::abs(lab[k] - ev(k)) < 1e-12);
    for (int k = 0; k < 6; ++k) mismatch += fw.map[s][k] != bw.map[s][k];
  }
  CHECK(mismatch == 0);
  // Slope of the first label through the cone and the mirror relation between labels 1 and 3.
  const std::size_t n = grid.size();
  std::size_t i0 = 0;
  for (std::size_t s = 0; s < n; ++s)
    if (std::abs(grid[s]) < std::abs(grid[i0])) i0 = s;
  const std::size_t ip = grid[i0] > 0 ? i0 : i0 + 1;
  const double slope = (fw.mu(ip, 0) - m.dirac.lambda_star) / grid[ip];
  CHECK(slope == doctest::Approx(std::abs(m.dirac.alpha)).epsilon(1e-3));
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t t = 0; t < n; ++t)
      if (std::abs(grid[s] + grid[t]) < 1e-14) CHECK(std::abs(fw.mu(s, 0) - fw.mu(t, 2)) < 1e-8);
  // Divided differences stay bounded through the crossing.
  double worst = 0.0;
  for (std::size_t s = 1; s < n; ++s)
    for (int k = 0; k < 4; ++k)
      worst = std::max(worst, std::abs(fw.mu(s, k) - fw.mu(s - 1, k)) / (grid[s] - grid[s - 1]));
  CHECK(worst < 2.0);
}
