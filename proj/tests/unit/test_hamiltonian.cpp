#include "fixtures.hpp"
#include "hexcone/hamiltonian.hpp"
#include "hexcone/lattice.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

using namespace hexcone;
using hexcone::testing::hand_position;

namespace {

// Reference kernel from a distance rule evaluated on hand-built positions.
Mat6 hand_block(int e1, int e2, const std::function<double(double, bool)>& rule) {
  Mat6 b = Mat6::Zero();
  for (int i = 1; i <= 6; ++i)
    for (int j = 1; j <= 6; ++j) {
      const double r = (hand_position(0, 0, i) - hand_position(e1, e2, j)).norm();
      b(i - 1, j - 1) = rule(r, e1 == 0 && e2 == 0);
    }
  return b;
}

double toy_rule(double r, bool) { return std::abs(r - 1.0 / 3.0) < 1e-9 ? 1.0 : 0.0; }
double extended_rule(double r, bool) { return r > 1.0 / 3.0 - 1e-9 && r < 1.0 + 1e-9 ? (1.0 / 3.0) / r : 0.0; }
double per_rule(double r, bool same_cell) {
  if (std::abs(r - 1.0 / 3.0) > 1e-9) return 0.0;
  return same_cell ? 1.0 : -1.0;
}

double kernel_distance(const HoppingKernel& K, const std::function<double(double, bool)>& rule) {
  double d = 0.0;
  for (int e1 = -3; e1 <= 3; ++e1)
    for (int e2 = -4; e2 <= 4; ++e2) d = std::max(d, (K.at({e1, e2}) - hand_block(e1, e2, rule)).norm());
  return d;
}

std::vector<double> sorted_eigs(const MatX& H) {
  Eigen::SelfAdjointEigenSolver<MatX> es(H, Eigen::EigenvaluesOnly);
  std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  return v;
}

}  // namespace

TEST_CASE("toy kernel entries") {
  const HoppingKernel K = build_toy_bulk();
  CHECK(K.at({0, 0})(0, 2) == cplx(1.0));
  CHECK(K.at({0, 0})(0, 5) == cplx(0.0));
  CHECK(K.at({0, 1})(0, 5) == cplx(1.0));
  CHECK(K.range1() == 1);
  CHECK(kernel_distance(K, toy_rule) < 1e-14);
}

TEST_CASE("extended kernel radial weights") {
  const HoppingKernel K = build_extended_bulk();
  CHECK(K.at({0, 0})(0, 2).real() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(K.at({0, 0})(0, 5).real() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(K.range1() == 1);
  CHECK(kernel_distance(K, extended_rule) < 1e-13);
  // Some pair sits at distance exactly 1 and carries weight 1/3.
  bool found = false;
  for (int e1 = -1; e1 <= 1; ++e1)
    for (int e2 = -2; e2 <= 2; ++e2)
      for (int i = 1; i <= 6; ++i)
        for (int j = 1; j <= 6; ++j)
          if (std::abs((hand_position(0, 0, i) - hand_position(e1, e2, j)).norm() - 1.0) < 1e-12) {
            found = true;
            CHECK(K.at({e1, e2})(i - 1, j - 1).real() == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
          }
  CHECK(found);
}

TEST_CASE("blended kernel interpolates toy and extended") {
  const HoppingKernel B = build_blended_bulk(0.2);
  const HoppingKernel ref = build_toy_bulk() + 0.2 * (build_extended_bulk() + (-1.0) * build_toy_bulk());
  for (int e1 = -2; e1 <= 2; ++e1)
    for (int e2 = -3; e2 <= 3; ++e2) CHECK((B.at({e1, e2}) - ref.at({e1, e2})).norm() < 1e-15);
  CHECK(parse_model("blended") == ModelKind::Blended);
  CHECK(model_name(parse_model("toy")) == "toy");
  CHECK_THROWS_AS(parse_model("graphene"), ModelError);
}

TEST_CASE("bond-detuning perturbation") {
  const HoppingKernel P = build_Hper();
  CHECK(P.at({0, 0})(0, 2) == cplx(1.0));
  CHECK(P.at({0, 1})(0, 5) == cplx(-1.0));
  CHECK(kernel_distance(P, per_rule) < 1e-14);
  const HoppingKernel Hp = perturbed(build_toy_bulk(), P, 0.1);
  CHECK((Hp.at({0, 0}) - (build_toy_bulk().at({0, 0}) + 0.1 * P.at({0, 0}))).norm() < 1e-15);
}

TEST_CASE("kernels are Hermitian") {
  for (const HoppingKernel& K : {build_toy_bulk(), build_extended_bulk(), build_blended_bulk(0.2), build_Hper()}) {
    CHECK(K.hermiticity_defect() < 1e-15);
    for (const auto& [e, b] : K.blocks) CHECK((K.at({-e.n1, -e.n2}) - b.adjoint()).norm() < 1e-15);
  }
}

TEST_CASE("toy Bloch matrix at Gamma: row sums and folded spectrum") {
  const Mat6 H = bloch_matrix(build_toy_bulk(), DualMomentum{0.0, 0.0});
  for (int i = 0; i < 6; ++i) CHECK(std::abs(H.row(i).sum() - 3.0) < 1e-14);
  // Gamma, K and K' of the primitive honeycomb fold onto Gamma of the hexamer cell: +-3 once, 0 four times.
  const std::vector<double> ref{-3.0, 0.0, 0.0, 0.0, 0.0, 3.0};
  const auto ev = sorted_eigs(MatX(H));
  for (int i = 0; i < 6; ++i) CHECK(std::abs(ev[i] - ref[i]) < 1e-10);
}

TEST_CASE("Bloch matrices: Hermitian, periodic and rotation covariant") {
  const HoppingKernel K = build_blended_bulk(0.2);
  const SymmetryOp r = rotation_op();
  double da = 0.0, db = 0.0;
  for (const auto& [k1, k2] : std::vector<std::pair<double, double>>{{0.1, 0.27}, {-0.33, 0.05}, {0.49, -0.21}}) {
    const Mat6 H = bloch_matrix(K, DualMomentum{k1, k2});
    CHECK((H - H.adjoint()).norm() < 1e-14);
    CHECK((bloch_matrix(K, DualMomentum{k1 + 1.0, k2 - 2.0}) - H).norm() < 1e-12);
    double t1 = 0.0, t2 = 0.0;
    const Mat6 U = r.bloch_action(2.0 * pi * k1, 2.0 * pi * k2, t1, t2);
    const Mat6 Ht = bloch_matrix(K, t1, t2);
    da = std::max(da, (U * H * U.adjoint() - Ht).norm());
    db = std::max(db, (U.adjoint() * H * U - Ht).norm());
  }
  CHECK(std::min(da, db) < 1e-10);
}

TEST_CASE("Bloch derivative matches a central difference") {
  const HoppingKernel K = build_extended_bulk();
  const double h = 1e-5;
  for (int j : {1, 2}) {
    const double a1 = 0.3, a2 = -0.8;
    const Mat6 fd = (bloch_matrix(K, a1 + (j == 1 ? h : 0), a2 + (j == 2 ? h : 0)) -
                     bloch_matrix(K, a1 - (j == 1 ? h : 0), a2 - (j == 2 ? h : 0))) /
                    (2.0 * h);
    CHECK((bloch_derivative(K, a1, a2, j) - fd).norm() < 1e-8);
  }
}

TEST_CASE("strip symbol reproduces the Bloch matrix") {
  const HoppingKernel K = build_blended_bulk(0.2);
  for (double kpar : {0.0, 0.7, pi}) {
    const StripSymbol s = strip_symbol(K, kpar, 1);
    CHECK(s.dim() == 6);
    CHECK((s.down - s.up.adjoint()).norm() < 1e-15);
    for (double th : {-2.0, 0.0, 0.4, 3.0}) CHECK((s.at(th) - MatX(bloch_matrix(K, th, kpar))).norm() < 1e-13);
  }
  // Two cells per block: the symbol spectrum is the union of the two folded Bloch spectra.
  const StripSymbol s2 = strip_symbol(K, 0.3, 2);
  CHECK(s2.dim() == 12);
  for (double th : {0.0, 1.1}) {
    std::vector<double> ref = sorted_eigs(MatX(bloch_matrix(K, th / 2.0, 0.3)));
    const auto more = sorted_eigs(MatX(bloch_matrix(K, th / 2.0 + pi, 0.3)));
    ref.insert(ref.end(), more.begin(), more.end());
    std::sort(ref.begin(), ref.end());
    const auto got = sorted_eigs(s2.at(th));
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(got[i] - ref[i]) < 1e-12);
  }
}

TEST_CASE("truncated strip spectrum fills the band slices") {
  const HoppingKernel K = build_toy_bulk();
  const StripSymbol s = strip_symbol(K, 0.0, 1);
  const auto ev = sorted_eigs(truncate(s, 80));
  for (double th = -pi; th <= pi; th += 0.25)
    for (double b : sorted_eigs(MatX(bloch_matrix(K, th, 0.0)))) {
      double best = 1e9;
      for (double e : ev) best = std::min(best, std::abs(e - b));
      CHECK(best < 0.05);
    }
}

TEST_CASE("interface strip: Hermitian, periodic away from the seam, reflection symmetric") {
  const auto& m = testing::blended();
  const InterfaceKernel ik = m.interface(0.05);
  const StripSymbol right = strip_symbol(perturbed(m.Hb, m.crit.oriented_per, 0.05), 0.0, 1);
  const StripSymbol left = strip_symbol(perturbed(m.Hb, m.crit.oriented_per, -0.05), 0.0, 1);
  const InterfaceStrip s = interface_strip(ik, 0.0);
  for (int n = -6; n <= 6; ++n)
    for (int d = -1; d <= 1; ++d) CHECK((s.block(n, n + d) - s.block(n + d, n).adjoint()).norm() < 1e-15);
  for (int n = 2; n <= 5; ++n) {
    CHECK((s.block(n, n) - right.diag).norm() == 0.0);
    CHECK((s.block(n, n + 1) - right.up).norm() == 0.0);
  }
  for (int n = -5; n <= -3; ++n) {
    CHECK((s.block(n, n) - left.diag).norm() == 0.0);
    CHECK((s.block(n, n + 1) - left.up).norm() == 0.0);
  }
  for (int n = -4; n <= 4; ++n)
    for (int d = -1; d <= 1; ++d) {
      const MatX Fn = blocked_reflection(1, 0.0, n), Fm = blocked_reflection(1, 0.0, n + d);
      CHECK((Fn * s.block(n, n + d) * Fm.adjoint() - s.block(n, n + d)).norm() < 1e-12);
    }
  // At kpar = pi the blocked reflection carries the block index.
  const InterfaceStrip sp = interface_strip(ik, pi);
  for (int n = -3; n <= 3; ++n) {
    const MatX Fn = blocked_reflection(1, pi, n), Fm = blocked_reflection(1, pi, n + 1);
    CHECK((Fn * sp.block(n, n + 1) * Fm.adjoint() - sp.block(n, n + 1)).norm() < 1e-12);
  }
  // Without inversion both half-planes carry the same bulk.
  const InterfaceStrip c = interface_strip(m.interface(0.05, false), 0.0);
  CHECK((c.block(-4, -4) - c.block(4, 4)).norm() == 0.0);
}

TEST_CASE("nonsingular hopping") {
  const NonsingularReport ext = check_nonsingular_hopping(build_extended_bulk());
  CHECK(ext.nonsingular);
  CHECK(ext.condition > 1.0);
  CHECK(!check_nonsingular_hopping(HoppingKernel{}).nonsingular);
  const NonsingularReport toy = check_nonsingular_hopping(build_toy_bulk());
  CHECK(!toy.nonsingular);  // rank 2 forward hopping
  CHECK(toy.sigma_min < 1e-12);
  const NonsingularReport bl = check_nonsingular_hopping(build_blended_bulk(0.2));
  CHECK(bl.nonsingular);
  CHECK(bl.sigma_min == doctest::Approx(3.6e-3).epsilon(0.05));
}
