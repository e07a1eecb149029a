#pragma once

#include "hexcone/hamiltonian.hpp"
#include "hexcone/matching.hpp"
#include "hexcone/spectra.hpp"

namespace hexcone::testing {

// The default blended kernel together with its cone data, built once per process.
struct BlendedModel {
  HoppingKernel Hb;
  DiracData dirac;
  GapCriterion crit;

  Interval interval(double delta, double c_star = 0.9) const {
    const double r = c_star * crit.beta * delta;
    return {dirac.lambda_star - r, dirac.lambda_star + r};
  }
  InterfaceKernel interface(double delta, bool inverted = true) const {
    return make_interface(Hb, crit.oriented_per, delta, inverted);
  }
};

inline const BlendedModel& blended() {
  static const BlendedModel m = [] {
    BlendedModel b;
    b.Hb = build_blended_bulk(default_blend);
    b.dirac = locate_double_dirac(b.Hb);
    b.crit = verify_gap_criterion(build_Hper(), b.dirac);
    return b;
  }();
  return m;
}

// Hexamer geometry written out by hand: positions of the six sites of cell (n1, n2).
inline Eigen::Vector2d hand_position(int n1, int n2, int sub) {
  const double s3 = std::sqrt(3.0);
  const Eigen::Vector2d l1(s3 / 2.0, 0.5), l2(0.0, 1.0);
  static const double c[6][2] = {{0, 1}, {-1, 1}, {1, 0}, {-1, 0}, {1, -1}, {0, -1}};
  return n1 * l1 + n2 * l2 + (c[sub - 1][0] * l1 + c[sub - 1][1] * l2) / 3.0;
}

}  // namespace hexcone::testing
