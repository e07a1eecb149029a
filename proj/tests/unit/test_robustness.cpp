#include "fixtures.hpp"
#include "hexcone/lattice.hpp"
#include "hexcone/robustness.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

using namespace hexcone;

namespace {

constexpr double kDelta = 0.025;
// Boundary-matching interface levels at this delta, frozen from the direct oracle.
constexpr double kOdd = 0.051970201982064;
constexpr double kEven = 0.052713905588477;

double cell_norm(int e1, int e2) { return std::sqrt(double(e1 * e1 + e2 * e2 + e1 * e2)); }

// Independent enumeration of the compact defect support: sup over rows n1 of the summed block norms.
double compact_sup_sum(double amplitude) {
  std::map<int, int> pairs;
  for (int n1 = -4; n1 <= 4; ++n1)
    for (int n2 = -6; n2 <= 6; ++n2)
      for (int e1 = -1; e1 <= 1; ++e1)
        for (int e2 = -1; e2 <= 1; ++e2) {
          if (cell_norm(e1, e2) > 1.0 + 1e-12) continue;
          const bool near = cell_norm(n1, n2) <= 1.0 + 1e-12 || cell_norm(n1 + e1, n2 + e2) <= 1.0 + 1e-12;
          if (near) ++pairs[n1];
        }
  int best = 0;
  for (const auto& [n1, c] : pairs) best = std::max(best, c);
  return 6.0 * amplitude * best;  // an all-equal 6x6 block has spectral norm 6 * amplitude
}

struct RobustSetup {
  InterfaceKernel ik;
  Interval gap;
};

const RobustSetup& setup() {
  static const RobustSetup s = [] {
    const auto& m = testing::blended();
    return RobustSetup{m.interface(kDelta), m.interval(kDelta)};
  }();
  return s;
}

std::map<CellIndex, Vec6> sample_field() {
  std::map<CellIndex, Vec6> u;
  for (int n1 = -2; n1 <= 2; ++n1)
    for (int n2 = -2; n2 <= 2; ++n2) {
      Vec6 x;
      for (int i = 0; i < 6; ++i) x(i) = cplx(std::cos(n1 + 2.0 * n2 + i), std::sin(0.5 * n1 - n2 + 0.3 * i));
      u[{n1, n2}] = x;
    }
  return u;
}

}  // namespace

TEST_CASE("defect kernels: reflection symmetry and longitudinal norm") {
  const PerturbationW zero = build_W(DefectKind::Compact, 0.0);
  CHECK(zero.M_W == 0.0);
  const PerturbationW c = build_W(DefectKind::Compact, 1e-5);
  CHECK(c.entries.size() == 67);
  CHECK(c.M_W == doctest::Approx(compact_sup_sum(1e-5)).epsilon(1e-12));
  CHECK(c.M_W == doctest::Approx(138e-5).epsilon(1e-12));
  CHECK(reflection_defect(c) <= 1e-12);
  const double d2 = 0.05 * 0.05;
  CHECK(build_W(DefectKind::Compact, d2).M_W == doctest::Approx(138.0 * d2).epsilon(1e-12));
  const PerturbationW line = build_W(DefectKind::Line, 1e-5, 4);
  CHECK(reflection_defect(line) <= 1e-12);
  for (const auto& [nm, B] : line.entries) {
    CHECK(std::abs(nm.first.n1) <= 4);
    CHECK(std::abs(nm.second.n1) <= 4);
  }
  CHECK(parse_defect("line") == DefectKind::Line);
  CHECK(defect_name(DefectKind::Compact) == "compact");
}

TEST_CASE("periodization of the defect and of fields") {
  const RobustSetup& s = setup();
  const PerturbationW W = build_W(DefectKind::Compact, 1.0);
  const int L = 16;
  const PeriodicStrip p = restrict_periodize(s.ik, W, L, 4);
  for (const auto& [nm, B] : W.entries) {
    const auto& blk = p.wblocks.at({nm.first.n1, nm.second.n1});
    const int c = ((nm.first.n2 % L) + L) % L, d = ((nm.second.n2 % L) + L) % L;
    CHECK((blk.block(6 * c, 6 * d, 6, 6) - MatX(B)).norm() == 0.0);
  }
  // Weak action: (W^L u, v) = (W u, v) for compactly supported fields.
  const auto u = sample_field();
  const auto us = periodize_field(u, L, 4);
  cplx lhs = 0.0, rhs = 0.0;
  for (const auto& [key, blk] : p.wblocks) lhs += us[key.first + 4].dot(blk * us[key.second + 4]);
  for (const auto& [nm, B] : W.entries) {
    auto a = u.find(nm.first), b = u.find(nm.second);
    if (a != u.end() && b != u.end()) rhs += a->second.dot(B * b->second);
  }
  CHECK(std::abs(lhs - rhs) < 1e-12);
  // Restriction inverts periodization inside the window.
  const auto back = restrict_field(us, L, 4);
  for (const auto& [n, x] : u) CHECK((back.at(n) - x).norm() == 0.0);
  // An Fx-even field stays even after periodization.
  const SymmetryOp F = reflection_op();
  // The reflection is an involution on sites, so (U u)(F t) = u(t).
  std::map<CellIndex, Vec6> even = u;
  for (const auto& [n, x] : u)
    for (int i = 0; i < 6; ++i) {
      const SiteIndex t = F.apply({n, i + 1});
      auto [it, fresh] = even.try_emplace(t.cell, Vec6::Zero());
      it->second(t.sub - 1) += x(i);
    }
  const auto es = periodize_field(even, L, 4);
  for (int n1 = -4; n1 < 4; ++n1) CHECK((slice_reflection(L, n1) * es[n1 + 4] - es[n1 + 4]).norm() < 1e-12);
  // Perturbations that reach the leads are rejected.
  CHECK_THROWS_AS(restrict_periodize(s.ik, build_W(DefectKind::Line, 1.0, 6), 8, 4), ModelError);
}

TEST_CASE("parity sectors split every slice exactly") {
  for (int L : {4, 8}) {
    for (int n1 : {-3, 0, 2}) {
      const MatX Bp = parity_basis(L, n1, +1), Bm = parity_basis(L, n1, -1);
      CHECK(Bp.cols() == 3 * L);
      CHECK(Bm.cols() == 3 * L);
      MatX B(6 * L, 6 * L);
      B << Bp, Bm;
      CHECK((B.adjoint() * B - MatX::Identity(6 * L, 6 * L)).norm() < 1e-12);
      const MatX F = slice_reflection(L, n1);
      CHECK((F * Bp - Bp).norm() < 1e-12);
      CHECK((F * Bm + Bm).norm() < 1e-12);
    }
  }
  // Sector operators are the compressions of the full closed strip.
  const RobustSetup& s = setup();
  const PeriodicStrip p = restrict_periodize(s.ik, build_W(DefectKind::Compact, 1e-3), 8, 4);
  const double lam = 0.05;
  const BlockTridiagonal full = terminated_periodic(p, 0, lam);
  for (int parity : {+1, -1}) {
    const BlockTridiagonal sec = terminated_periodic(p, parity, lam);
    double worst = 0.0;
    for (int k = 0; k < full.blocks(); ++k) {
      const MatX Bk = parity_basis(8, k - p.R, parity);
      worst = std::max(worst, (Bk.adjoint() * full.diag[k] * Bk - sec.diag[k]).norm());
      if (k + 1 < full.blocks()) {
        const MatX Bn = parity_basis(8, k + 1 - p.R, parity);
        worst = std::max(worst, (Bk.adjoint() * full.upper[k] * Bn - sec.upper[k]).norm());
      }
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("lead bound states agree with a long Dirichlet chain") {
  const RobustSetup& s = setup();
  const StripSymbol left = strip_symbol(s.ik.left, 0.0, 1);
  const auto states = lead_bound_states(left, -1, 0.0, -1, s.gap);
  REQUIRE(states.size() == 2);
  CHECK(states[0].value == doctest::Approx(0.0134749).epsilon(1e-5));
  CHECK(states[0].parity == -1);
  CHECK(states[1].value == doctest::Approx(0.0654293).epsilon(1e-5));
  CHECK(states[1].parity == 1);
  Eigen::SelfAdjointEigenSolver<MatX> es(truncate(left, 400), Eigen::EigenvaluesOnly);
  for (const LeadState& st : states) {
    double best = 1e9;
    for (int i = 0; i < es.eigenvalues().size(); ++i) best = std::min(best, std::abs(es.eigenvalues()(i) - st.value));
    CHECK(best < 1e-8);
  }
}

TEST_CASE("exact-lead interface levels") {
  const RobustSetup& s = setup();
  const auto lv = interface_levels(s.ik, 0.0, s.gap, 8);
  REQUIRE(lv.size() == 2);
  CHECK(std::abs(lv[0] - kOdd) < 1e-9);
  CHECK(std::abs(lv[1] - kEven) < 1e-9);
  CHECK(interface_levels(s.ik, 0.0, s.gap, 16) == lv);
  CHECK(interface_levels(s.ik, pi, s.gap, 8).empty());
}

TEST_CASE("unperturbed sectors reproduce the interface levels") {
  const RobustSetup& s = setup();
  const PeriodicStrip p = restrict_periodize(s.ik, PerturbationW{}, 8, 8);
  SectorOptions opt;
  opt.with_W = false;
  opt.check_transverse = true;
  for (int parity : {+1, -1}) {
    const SectorResult r = strip_sector_eigen(p, parity, s.gap, opt);
    CHECK(r.unique);
    REQUIRE(r.in_gap.size() == 1);
    CHECK(std::abs(r.in_gap[0] - (parity > 0 ? kEven : kOdd)) <= 1e-8);
    CHECK(r.transverse_shift <= 1e-9);
    REQUIRE(r.mode.has_value());
    CHECK(r.mode->parity == parity);
    CHECK(r.mode->parity_defect <= 1e-8);
  }
}

TEST_CASE("perturbed sectors: localization, parity and series cross-check") {
  const RobustSetup& s = setup();
  const PerturbationW W = build_W(DefectKind::Compact, 1e-5);
  const std::vector<double> levels{kOdd, kEven};
  const BoundCheck bc = check_bound(W, levels, s.gap);
  CHECK(bc.satisfied);
  CHECK(bc.d_min == doctest::Approx(isolation_distance(kOdd, s.gap)));
  CHECK(!check_bound(build_W(DefectKind::Compact, kDelta * kDelta), levels, s.gap).satisfied);

  const PeriodicStrip p = restrict_periodize(s.ik, W, 8, 8);
  SectorOptions bare;
  bare.with_W = false;
  for (int parity : {+1, -1}) {
    const SectorResult r0 = strip_sector_eigen(p, parity, s.gap, bare);
    const SectorResult rw = strip_sector_eigen(p, parity, s.gap);
    REQUIRE(rw.unique);
    const double lz = r0.in_gap[0];
    CHECK(std::abs(rw.in_gap[0] - lz) <= 0.5 * isolation_distance(lz, s.gap));
    CHECK(rw.mode->parity == parity);
    const PersistenceReport pr = farfield_persistence(*rw.mode, *r0.mode, 8, bare.profile_R);
    CHECK(pr.outside_overlap >= 0.99);
    const PersistenceReport same = farfield_persistence(*r0.mode, *r0.mode, 8, bare.profile_R);
    CHECK(same.difference_norm == 0.0);
    const NeumannCheck nc = neumann_series_check(p, parity, s.gap);
    CHECK(nc.converged);
    CHECK(std::abs(nc.lambda_series - nc.lambda_direct) <= 1e-10);
    CHECK(nc.vector_overlap >= 1.0 - 1e-8);
  }
}

TEST_CASE("line defect: difference localized near the line") {
  const RobustSetup& s = setup();
  const PerturbationW W = build_W(DefectKind::Line, 1e-4, 4);
  const PeriodicStrip p = restrict_periodize(s.ik, W, 8, 8);
  SectorOptions bare;
  bare.with_W = false;
  const SectorResult r0 = strip_sector_eigen(p, +1, s.gap, bare);
  const SectorResult rw = strip_sector_eigen(p, +1, s.gap);
  REQUIRE(rw.unique);
  const PersistenceReport pr = farfield_persistence(*rw.mode, *r0.mode, 8, bare.profile_R);
  REQUIRE(pr.window_profile.size() >= 2);
  CHECK(pr.window_profile.back() < pr.window_profile.front());
}

TEST_CASE("interface band curve and the sampling identity") {
  const RobustSetup& s = setup();
  std::vector<double> ks;
  for (int i = 0; i <= 16; ++i) ks.push_back(-pi + 2.0 * pi * i / 16);
  const BandCurve bc = interface_band_curve(s.ik, ks, s.gap);
  CHECK(bc.empty_at_pi);
  CHECK(bc.branches.size() == 2);
  const auto& mid = bc.samples[8];
  REQUIRE(mid.values.size() == 2);
  CHECK(std::abs(mid.values[0] - kOdd) < 1e-9);
  CHECK(std::abs(mid.values[1] - kEven) < 1e-9);
  CHECK(std::isfinite(bc.max_jump_rate));
  CHECK(sampling_identity_defect(s.ik, 8, s.gap) <= 1e-8);
}

TEST_CASE("a defect that decouples a window floods the interval") {
  const RobustSetup& s = setup();
  const auto& m = testing::blended();
  // Cancel every hopping among the cells of a four-slice window and pin those sites at the cone energy.
  PerturbationW W;
  const int L = 4;
  auto kernel = [&](const CellIndex& n, const CellIndex& k) {
    const CellIndex e = k - n;
    if (n.n1 >= 0 && k.n1 >= 0) return s.ik.right.at(e);
    if (n.n1 < 0 && k.n1 < 0) return s.ik.left.at(e);
    return s.ik.seam.at(e);
  };
  for (int n1 = -2; n1 < 2; ++n1)
    for (int n2 = -2; n2 < 2; ++n2)
      for (int k1 = -2; k1 < 2; ++k1)
        for (int k2 = -2; k2 < 2; ++k2) {
          const CellIndex n{n1, n2}, k{k1, k2};
          Mat6 b = -kernel(n, k);
          if (n == k) b += m.dirac.lambda_star * Mat6::Identity();
          if (b.norm() > 0.0) W.entries[{n, k}] = b;
        }
  const PeriodicStrip p = restrict_periodize(s.ik, W, L, 4);
  SectorOptions opt;
  opt.R = 4;
  try {
    strip_sector_eigen(p, +1, s.gap, opt);
    FAIL("expected GapCollapse");
  } catch (const NumericError& e) {
    CHECK(e.kind() == Failure::GapCollapse);
  }
}
