#pragma once

#include "hexcone/blocktri.hpp"
#include "hexcone/hamiltonian.hpp"
#include "hexcone/lattice.hpp"
#include "hexcone/matching.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hexcone {

enum class DefectKind { Compact, Line };

// Reflection-symmetric, longitudinally localized perturbation stored on its support.
struct PerturbationW {
  DefectKind kind = DefectKind::Compact;
  double amplitude = 0.0;
  int half_width = 0;  // line defects are kept for |n1| <= half_width
  std::map<std::pair<CellIndex, CellIndex>, Mat6> entries;
  double M_W = 0.0;

  bool empty() const { return entries.empty(); }
};

DefectKind parse_defect(const std::string& name);
std::string defect_name(DefectKind k);

// Compact: all-equal 6x6 blocks on pairs |n - m| <= 1 with |n| <= 1 or |m| <= 1 (Euclidean cell distance).
// Line: the same with |n . l2| <= 1 or |m . l2| <= 1, truncated to |n1|, |m1| <= half_width.
PerturbationW build_W(DefectKind kind, double amplitude, int half_width = 6);
// sup over n1 of the summed block norms.
double longitudinal_sup_sum(const PerturbationW& W);
// max |W(Fx n, Fx m)[sigma i, sigma j] - W(n, m)[i, j]|
double reflection_defect(const PerturbationW& W);

// L-periodic strip along l2 with slices n1 in [-R, R); slice basis index 6 c + (i - 1), c = n2 mod L.
struct PeriodicStrip {
  int L = 8;
  int R = 8;
  InterfaceKernel ik;
  std::map<std::pair<int, int>, MatX> wblocks;  // periodized perturbation, slice pair -> 6L x 6L

  int slice_dim() const { return 6 * L; }
  double kpar(int j) const { return 2.0 * pi * j / L; }
};

// W^L = s^L W r^L assembled on the slice window. Throws ModelError if W reaches outside [-R, R).
PeriodicStrip restrict_periodize(const InterfaceKernel& ik, const PerturbationW& W, int L, int R);
// Periodization of a finitely supported field onto slices, and restriction back to the window |n . l2| < L/2.
std::vector<VecX> periodize_field(const std::map<CellIndex, Vec6>& u, int L, int R);
std::map<CellIndex, Vec6> restrict_field(const std::vector<VecX>& slices, int L, int R);

// Bulk plus seam slice block H(n1, m1) without the perturbation.
MatX slice_block(const PeriodicStrip& p, int n1, int m1);
// Reflection on the slice at n1: (F u)(c, i) = u((-n1 - c) mod L, sigma(i)).
MatX slice_reflection(int L, int n1);
// Orthonormal basis (6L x 3L) of the parity-+1 or parity-(-1) subspace of slice n1.
MatX parity_basis(int L, int n1, int parity);

// Exact lead self-energies -Hs(R-1, R) g(lambda) Hs(R, R-1) for a 6-dimensional strip symbol.
MatX lead_self_energy_right(const StripSymbol& s, double lambda);
MatX lead_self_energy_left(const StripSymbol& s, double lambda);

// H_eff(lambda) of the interface strip at fixed kpar on blocks [-R, R) closed by exact leads.
BlockTridiagonal terminated_interface(const InterfaceStrip& s, int R, double lambda);
// Full periodic strip (parity 0) or one parity sector, closed by exact leads at energy lambda.
BlockTridiagonal terminated_periodic(const PeriodicStrip& p, int parity, double lambda, bool with_W = true);

// Bound states of a half-infinite lead in the interval: side +1 occupies blocks first, first + 1, ... and side -1
// occupies first, first - 1, .... They are the energies where the decaying transfer solutions admit the
// Dirichlet condition at the cut, located to about 1e-8. parity is the blocked-reflection eigenvalue at kpar in
// {0, pi}, else 0.
struct LeadState {
  double value = 0.0;
  int parity = 0;
};
std::vector<LeadState> lead_bound_states(const StripSymbol& s, int side, double kpar, int first, const Interval& gap,
                                         int grid = 400);

// Eigenvalues of H_eff(lambda) x = lambda x in (lo, hi) by inertia bisection. The full count below lambda is the
// Schur-complement inertia plus the lead bound states below lambda, where the self-energy has its poles.
std::vector<EigenCluster> nonlinear_eigenvalues_in(const std::function<BlockTridiagonal(double)>& Heff, double lo,
                                                   double hi, const std::vector<double>& lead_poles = {},
                                                   double abs_tol = 1e-13);

struct SectorMode {
  double lambda = 0.0;
  int parity = 0;
  double parity_defect = 0.0;
  std::vector<VecX> slices;  // full 6L slice vectors for n1 in [-R, R), unit norm
};

struct SectorResult {
  int L = 0;
  int parity = 0;
  std::vector<double> in_gap;  // all eigenvalues in the interval, with multiplicity
  bool unique = false;
  std::optional<SectorMode> mode;  // present when unique
  double transverse_shift = 0.0;   // eigenvalue change when R is doubled
};

struct SectorOptions {
  int R = 8;
  int profile_R = 40;
  bool with_W = true;
  bool check_transverse = false;
  double collapse_fraction = 0.25;  // GapCollapse when more than this many per slice dimension fall in the interval
};

// Throws GapCollapse when the perturbed sector spectrum fills the interval, ModelError if the
// perturbation is not inside the window [-opt.R, opt.R).
SectorResult strip_sector_eigen(const PeriodicStrip& p, int parity, const Interval& gap,
                                const SectorOptions& opt = {});

// Series construction of the perturbed sector mode from the unperturbed one:
// x = x0 - R_perp (W - Delta D0) x with D0 = 1 - dSigma/dlambda at lambda0, iterated until increments < tol.
struct NeumannCheck {
  double lambda_unperturbed = 0.0;
  double lambda_series = 0.0;
  double lambda_direct = 0.0;
  int terms = 0;
  bool converged = false;
  double vector_overlap = 0.0;  // |<x_series, x_direct>| for unit vectors
};
NeumannCheck neumann_series_check(const PeriodicStrip& p, int parity, const Interval& gap,
                                  const SectorOptions& opt = {}, double tol = 1e-10, int max_terms = 60);

struct BoundCheck {
  double M_W = 0.0;
  double d_min = 0.0;
  double c_W = 0.25;
  bool satisfied = false;
};
// d_zig = distance from lambda_zig to the complement of the interval.
double isolation_distance(double lambda_zig, const Interval& gap);
BoundCheck check_bound(const PerturbationW& W, const std::vector<double>& lambda_zig, const Interval& gap,
                       double c_W = 0.25);

struct PersistenceReport {
  double outside_overlap = 0.0;  // |<u_W, u_0>| / (|u_W| |u_0|) restricted to |n| > exclusion
  double difference_norm = 0.0;
  std::vector<double> window_profile;  // l2 norm of u_W - u_0 per band 2k <= |n . l2| < 2k + 2
  double exclusion_radius = 0.0;
};
PersistenceReport farfield_persistence(const SectorMode& perturbed, const SectorMode& reference, int L, int R,
                                       double exclusion_radius = 3.0);

struct BandSample {
  double kpar = 0.0;
  std::vector<double> values;  // in-gap eigenvalues, ascending
};
struct BandCurve {
  std::vector<BandSample> samples;
  std::vector<std::vector<double>> branches;  // branch k value per sample (NaN once outside the interval)
  bool empty_at_pi = false;
  double max_jump_rate = 0.0;  // max |jump| / step along tracked branches
};

// In-gap eigenvalues of the exact-lead interface strip at one quasi-momentum.
std::vector<double> interface_levels(const InterfaceKernel& ik, double kpar, const Interval& gap, int R = 8);
// Throws BranchLost if a branch matched over at least two samples disappears away from the interval ends.
BandCurve interface_band_curve(const InterfaceKernel& ik, const std::vector<double>& kpar, const Interval& gap,
                               int R = 8);

// max over matched values of |strip eigenvalue - curve sample| for kpar in {2 pi j / L}; infinity on count mismatch.
double sampling_identity_defect(const InterfaceKernel& ik, int L, const Interval& gap, int R = 8);

}  // namespace hexcone
