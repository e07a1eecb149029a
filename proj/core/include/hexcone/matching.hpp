#pragma once

#include "hexcone/blocktri.hpp"
#include "hexcone/green.hpp"
#include "hexcone/hamiltonian.hpp"
#include "hexcone/spectra.hpp"

#include <vector>

namespace hexcone {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return x > lo && x < hi; }
};

enum class ResolventMethod { Quadrature, Decimation };

struct MatchingOptions {
  ResolventMethod method = ResolventMethod::Quadrature;
  QuadratureOptions quad{.order = 16, .levels = 14, .panels = 0, .estimate_error = false};
};

struct MatchingPair {
  double lambda = 0.0;
  double delta = 0.0;
  MatX M;    // 12N x 12N, acts on (a, b) = (u(0), u(-1))
  MatX aux;  // fixed-point matrix of the layer potential restricted to n = 0, -1
};

// Throws EnergyOutsideGap if lambda is not inside `gap`.
MatchingPair assemble_matching(const InterfaceStrip& s, double lambda, const Interval& gap,
                               const MatchingOptions& opt = {});

struct LimitPieces {
  double alpha_abs = 0.0;
  double beta = 0.0;
  MatX Mpv;
  MatX A;
  MatX aux_pv;
  MatX aux1;
  MatX aux2;
  MatX kernel;  // columns (v_k, v_k), k = 1..4, the boundary data of the cone modes
  Eigen::VectorXd mpv_singular_values;  // descending
  GreenKernel green;

  double xi(double h) const;
  double eta(double h) const;
  MatX limit(double h) const { return Mpv + xi(h) * A; }
  MatX aux_limit(double h, double eta_sign = 1.0) const { return aux_pv + xi(h) * aux1 + eta_sign * eta(h) * aux2; }
};

// Limits of M and M^aux as delta -> 0 for the bulk strip symbol at kpar = 0 (one cell per block).
LimitPieces limit_pieces(const StripSymbol& bulk, const ConeGauge& g, double beta,
                         QuadratureOptions opt = {.order = 20, .levels = 0});

struct SearchOptions {
  int grid = 201;
  double c_star = 0.9;
  double null_rel_tol = 1e-7;   // singular values <= tol * ||M|| count toward multiplicity
  double golden_tol = 1e-13;
  double aux_tol = 1e-6;        // |mu - 1| for the fixed-point filter
  int mode_window = 120;        // initial layer-potential window for reconstructed modes
  MatchingOptions matching;
};

struct CharacteristicValue {
  double h = 0.0;
  double lambda = 0.0;
  double sigma_min = 0.0;
  int multiplicity = 0;
  MatX null_space;                     // 12N x multiplicity
  std::vector<cplx> aux_eigenvalues;   // of the null-space compression of M^aux
  MatX modes;                          // boundary data with M^aux x = x
};

struct SearchResult {
  double delta = 0.0;
  std::vector<double> h_grid;
  std::vector<double> sigma_min;
  std::vector<CharacteristicValue> values;
  int characteristic_count() const;  // with multiplicity
  int mode_count() const;            // fixed points of M^aux
};

// Scans sigma_min(M(lambda* + delta h)) over the open interval |h| < c* beta.
// Throws NoCharacteristicValue when no local minimum reaches the tolerance.
SearchResult characteristic_search(const InterfaceStrip& s, double lambda_star, double delta, double beta,
                                   const SearchOptions& opt = {});

struct InterfaceMode {
  double lambda = 0.0;
  double h = 0.0;
  VecX boundary;  // (a, b)
  int first_block = 0;
  std::vector<VecX> profile;  // u(n) for n = first_block, first_block + 1, ...
  double residual = 0.0;      // max interior |(H - lambda) u| with ||u|| = 1
  int parity = 0;
  double parity_defect = 0.0;
  double decay_right = 1.0;   // fitted |u(n + 1)| / |u(n)| for n > 0
  double decay_left = 1.0;
  double tail = 0.0;          // norm carried by the outermost block on each side

  const VecX& at(int n) const { return profile.at(static_cast<std::size_t>(n - first_block)); }
};

// Layer-potential reconstruction from boundary data (a, b); window grows until the tail is below 1e-10.
// Throws DegenerateBoundaryData if M^aux (a, b) vanishes.
InterfaceMode mode_from_boundary(const InterfaceStrip& s, double lambda, const VecX& boundary, const MatX& aux,
                                 int window = 120);

struct ModeCount {
  int characteristic = 0;
  int modes = 0;
  std::vector<InterfaceMode> found;  // even mode first
  SearchResult search;
  bool no_characteristic_value = false;
};

ModeCount count_interface_modes(const InterfaceStrip& s, double lambda_star, double delta, double beta,
                                const SearchOptions& opt = {});

// Dirichlet truncation with `blocks_per_side` blocks on each side of the seam.
BlockTridiagonal interface_block_matrix(const InterfaceStrip& s, int blocks_per_side);

struct OracleLevel {
  double lambda = 0.0;
  double central_weight = 0.0;
  int parity = 0;
};
// In-gap eigenvalues of the truncated interface strip whose weight in the central half exceeds min_weight.
std::vector<OracleLevel> direct_oracle(const InterfaceStrip& s, const Interval& window, int blocks_per_side = 200,
                                       double min_weight = 0.9);

}  // namespace hexcone
