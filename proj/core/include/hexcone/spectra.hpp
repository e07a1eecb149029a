#pragma once

#include "hexcone/hamiltonian.hpp"
#include "hexcone/lattice.hpp"
#include "hexcone/types.hpp"

#include <array>
#include <string>
#include <vector>

namespace hexcone {

struct EigenBundle {
  Eigen::VectorXd values;
  MatX vectors;
  std::vector<std::vector<int>> clusters;
  double residual = 0.0;  // max ||H v - lambda v|| / ||H||
};

// Hermitian eigensolve with clustering at relative tolerance rel_tol of the spectral radius.
EigenBundle eigen_bundle(const MatX& H, double rel_tol = 1e-8);

struct DiracData {
  double lambda_star = 0.0;
  int first_band = 0;  // sorted index of the lowest of the four degenerate bands
  Mat64 u;             // aligned basis u1..u4
  double alpha = 0.0;  // (u1, dH/dtheta1 u3)
  double alpha_fd = 0.0;
  Mat4 H1;
  Mat4 H2;
  double alignment_defect = 0.0;
};

// Throws NumericError (NoFourFoldDegeneracy, AlignmentFailure, VanishingSlope).
DiracData locate_double_dirac(const HoppingKernel& K);
// Aligns an orthonormal basis Q (6x4) of a degenerate Gamma eigenspace to rho_tilde.
Mat64 align_u_basis(const MatX& Q);
// max_g ||P_g U - U rho_tilde(g)|| over the three generators.
double alignment_defect(const Mat64& U);

struct GapCriterion {
  double beta1 = 0.0;
  double beta3 = 0.0;
  double offdiag = 0.0;
  bool swapped = false;
  double beta = 0.0;          // |beta1|
  HoppingKernel oriented_per;  // Hper with the sign that makes beta1 positive
  Mat4 per_u;
};

GapCriterion verify_gap_criterion(const HoppingKernel& Hper, const DiracData& d);

struct GapScanOptions {
  int grid = 101;
  int refine_grid = 41;
  double refine_radius = 0.02;  // in dual coordinates around Gamma
  double c_star = 0.9;
};

struct InversionScores {
  double plus_lower_rho1 = 0.0;
  double plus_lower_rho2 = 0.0;
  double minus_lower_rho1 = 0.0;
  double minus_lower_rho2 = 0.0;
};

struct GapReport {
  double delta = 0.0;
  bool has_gap = false;
  double lo = 0.0;
  double hi = 0.0;
  double width = 0.0;
  double predicted = 0.0;  // 2 beta delta
  double ratio = 0.0;
  double midpoint_offset = 0.0;
  double interval_lo = 0.0;  // lambda* - c* beta delta
  double interval_hi = 0.0;
  InversionScores inversion;
};

InversionScores inversion_scores(const HoppingKernel& Hb, const GapCriterion& c, const DiracData& d,
                                 double delta);
GapReport gap_report(const HoppingKernel& Hb, const GapCriterion& c, const DiracData& d, double delta,
                     const GapScanOptions& opt = {});

struct AsymptoticsReport {
  double eigenvalue_residual = 0.0;
  double eigenvector_residual = 0.0;
};

// Compares H_{+delta}(theta) on the four cone bands with the 4x4 leading-order model.
AsymptoticsReport eigenpair_asymptotics_check(const HoppingKernel& Hb, const GapCriterion& c,
                                              const DiracData& d, double delta, double theta1,
                                              double theta2);

struct FlatCluster {
  double eigenvalue = 0.0;
  std::string irrep;
  double score = 0.0;
  double first_order_norm = 0.0;
};

// 2-fold Gamma clusters carrying rho1 or rho2 and the norms of their first-order matrices.
std::vector<FlatCluster> flatness_check(const HoppingKernel& K);

// Propagating modes at theta1 = 0 in the gauge of the sgn(alpha) combination.
struct ConeGauge {
  double lambda_star = 0.0;
  double alpha_abs = 0.0;
  double sign_alpha = 1.0;
  Mat64 v;
  Eigen::Vector4d slopes;  // +|alpha|, +|alpha|, -|alpha|, -|alpha|
};

ConeGauge fix_gauge_v(const DiracData& d);

struct AnalyticBands {
  std::vector<double> theta;
  Eigen::MatrixXd mu;                   // rows: theta samples, columns: analytic labels 1..6
  std::vector<std::array<int, 6>> map;  // map[s][label] = sorted index at sample s
  std::vector<Mat6> vectors;            // columns in label order
};

std::vector<double> default_label_grid(int points_per_side = 1000, double smallest = 1e-4);
// Maximal-overlap continuation along theta2 = 0; direction +1 runs left to right.
AnalyticBands analytic_label(const HoppingKernel& K, const DiracData& d,
                             const std::vector<double>& theta, int direction = +1);

}  // namespace hexcone
