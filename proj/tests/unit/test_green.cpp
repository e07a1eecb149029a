#include "fixtures.hpp"
#include "hexcone/green.hpp"
#include "hexcone/hamiltonian.hpp"
#include "hexcone/spectra.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace hexcone;

namespace {

struct GreenSetup {
  StripSymbol bulk;
  StripSymbol plus;
  ConeGauge gauge;
  GreenKernel pv;
};

const GreenSetup& setup() {
  static const GreenSetup s = [] {
    const auto& m = testing::blended();
    GreenSetup g;
    g.bulk = strip_symbol(m.Hb, 0.0, 1);
    g.plus = strip_symbol(perturbed(m.Hb, m.crit.oriented_per, 0.05), 0.0, 1);
    g.gauge = fix_gauge_v(m.dirac);
    g.pv = physical_green_pv(g.bulk, g.gauge, 40);
    return g;
  }();
  return s;
}

}  // namespace

TEST_CASE("in-gap resolvent against the dense truncated inverse") {
  const auto& s = setup();
  const auto& m = testing::blended();
  const double lambda = m.dirac.lambda_star + 0.3 * m.crit.beta * 0.05;
  const GreenKernel G = gap_resolvent(s.plus, lambda, 12);
  const int blocks = 200;
  const MatX dense = truncated_inverse(s.plus, lambda, blocks);
  const int D = s.plus.dim();
  double worst = 0.0;
  for (int n = 90; n < 110; n += 3)
    for (int d = -12; d <= 12; ++d) {
      const MatX ref = dense.block(D * n, D * (n - d), D, D);
      worst = std::max(worst, (ref - G.at(n, n - d)).norm());
    }
  CHECK(worst <= 1e-6);
  CHECK(G.error_estimate <= 1e-6);
  // The decimation resolvent is a second independent route.
  const DecimatedResolvent dr = decimation_resolvent(s.plus, lambda);
  for (int d = -6; d <= 6; ++d) CHECK((dr.at(d) - G.at(d, 0)).norm() < 1e-8);
  // Identity on the diagonal and decay away from it.
  std::vector<int> probes{-3, 0, 5};
  CHECK(right_inverse_defect(s.plus, G, probes) < 1e-8);
  double prev = G.at(1, 0).norm();
  for (int n = 2; n <= 10; ++n) {
    const double cur = G.at(n, 0).norm();
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("gap resolvent refuses energies in the spectrum") {
  const auto& s = setup();
  try {
    gap_resolvent(s.bulk, 2.0, 4);
    FAIL("expected EnergyInSpectrum");
  } catch (const NumericError& e) {
    CHECK(e.kind() == Failure::EnergyInSpectrum);
  }
}

TEST_CASE("surface resolvents solve the half-strip equations") {
  const auto& s = setup();
  const auto& m = testing::blended();
  const double lambda = m.dirac.lambda_star + 0.02;
  const SurfaceGreen sg = surface_green(s.plus, lambda);
  const MatX Id = MatX::Identity(6, 6);
  // g_R = (diag - lambda - up g_R down)^{-1}
  const MatX rr = (s.plus.diag - lambda * Id - s.plus.up * sg.right * s.plus.down).inverse();
  CHECK((rr - sg.right).norm() < 1e-9);
  const MatX ll = (s.plus.diag - lambda * Id - s.plus.down * sg.left * s.plus.up).inverse();
  CHECK((ll - sg.left).norm() < 1e-9);
  // Dense half-strip oracle.
  const MatX T = truncate(s.plus, 120);
  const MatX inv = (T - lambda * MatX::Identity(T.rows(), T.cols())).inverse();
  CHECK((inv.topLeftCorner(6, 6) - sg.right).norm() < 1e-8);
  CHECK((inv.bottomRightCorner(6, 6) - sg.left).norm() < 1e-8);
}

TEST_CASE("physical Green operator is a right inverse") {
  const auto& s = setup();
  std::vector<int> probes;
  for (int p = -10; p < 10; ++p) probes.push_back(p);
  CHECK(right_inverse_defect(s.bulk, s.pv, probes) <= 1e-6);
  double herm = 0.0;
  for (int d = -20; d <= 20; ++d) herm = std::max(herm, (s.pv.at(d, 0) - s.pv.at(0, d).adjoint()).norm());
  CHECK(herm <= 1e-8);
}

TEST_CASE("physical Green operator: quadrature refinement stays within the error estimate") {
  const auto& s = setup();
  const GreenKernel fine = physical_green_pv(s.bulk, s.gauge, 40, {.order = 20, .levels = 0, .panels = 112});
  double worst = 0.0;
  for (int d = -40; d <= 40; ++d) worst = std::max(worst, (fine.at(d, 0) - s.pv.at(d, 0)).cwiseAbs().maxCoeff());
  CHECK(worst <= std::max(s.pv.error_estimate, 1e-12));
}

TEST_CASE("far field of the physical Green operator") {
  const auto& s = setup();
  const FarFieldReport ff = far_field_check(s.pv, s.gauge);
  CHECK(ff.rate_plus < 0.9);
  CHECK(ff.rate_minus < 0.9);
  REQUIRE(ff.residual_plus.size() > 3);
  CHECK(ff.residual_plus[3] < ff.residual_plus[0]);
  CHECK(ff.residual_minus[3] < ff.residual_minus[0]);
  // Far-field matrix written out by hand.
  const double a = s.gauge.alpha_abs;
  MatX F = MatX::Zero(6, 6);
  for (int k = 0; k < 4; ++k) F += (k < 2 ? 1.0 : -1.0) * s.gauge.v.col(k) * s.gauge.v.col(k).adjoint();
  F *= I1 / (2.0 * a);
  CHECK((far_field_matrix(s.gauge) - F).norm() < 1e-14);
  CHECK((s.pv.at(30, 0) - F).norm() < 1e-8);
  CHECK((s.pv.at(-30, 0) + F).norm() < 1e-8);
}

TEST_CASE("energy flux of the cone modes") {
  const auto& s = setup();
  const double a = s.gauge.alpha_abs;
  std::vector<BlockField> v;
  for (int k = 0; k < 4; ++k) v.push_back(bloch_field(s.gauge.v.col(k), 0.0));
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k) {
      const cplx f = energy_flux(s.bulk, v[j], v[k], 0);
      if (j == k)
        CHECK(std::abs(f - (j < 2 ? 1.0 : -1.0) * I1 * a) <= 1e-8);
      else
        CHECK(std::abs(f) <= 1e-8);
      // Antisymmetry and imaginary diagonal.
      CHECK(std::abs(f + std::conj(energy_flux(s.bulk, v[k], v[j], 0))) <= 1e-10);
    }
  std::vector<int> sites;
  for (int n = 0; n < 10; ++n) sites.push_back(n);
  for (int k = 0; k < 4; ++k) CHECK(flux_site_independence(s.bulk, v[k], v[k], sites) <= 1e-8);
}

TEST_CASE("discrete Green identity") {
  const auto& s = setup();
  const BlockField phi = [](int n) {
    VecX x(6);
    for (int i = 0; i < 6; ++i) x(i) = cplx(std::sin(0.3 * n + i), std::cos(0.7 * n - i));
    return x;
  };
  const BlockField psi = [](int n) {
    VecX x(6);
    for (int i = 0; i < 6; ++i) x(i) = cplx(1.0 / (1.0 + n * n + i), 0.1 * n);
    return x;
  };
  CHECK(green_identity_defect(s.bulk, 0.05, phi, psi, -4, 7) <= 1e-10);
  // A pair that is not an eigenmode pair generally has site-dependent flux.
  std::vector<int> sites{0, 1, 2, 3};
  CHECK(flux_site_independence(s.bulk, phi, psi, sites) > 0.0);
}

TEST_CASE("Gauss-Legendre rule integrates polynomials on (0, pi]") {
  std::vector<double> th, w;
  theta_rule(4, 3, 8, th, w);
  double s0 = 0.0, s3 = 0.0;
  for (std::size_t i = 0; i < th.size(); ++i) {
    s0 += w[i];
    s3 += w[i] * th[i] * th[i] * th[i];
  }
  CHECK(s0 == doctest::Approx(pi).epsilon(1e-14));
  CHECK(s3 == doctest::Approx(std::pow(pi, 4) / 4.0).epsilon(1e-13));
}
