#pragma once

#include "hexcone/hamiltonian.hpp"
#include "hexcone/spectra.hpp"
#include "hexcone/types.hpp"

#include <functional>
#include <map>
#include <vector>

namespace hexcone {

struct QuadratureOptions {
  int order = 16;          // Gauss-Legendre points per panel
  int levels = 14;         // dyadic refinement levels toward theta = 0 inside the first panel
  int panels = 0;          // uniform panels on (0, pi]; 0 means 16 + max offset
  bool estimate_error = true;
};

// Translation-covariant strip Green kernel, blocks[d] = G(n, m) with d = n - m.
struct GreenKernel {
  double lambda = 0.0;
  int max_offset = 0;
  std::map<int, MatX> blocks;
  int nodes = 0;
  int panels = 0;
  int levels = 0;
  int order = 0;
  double error_estimate = 0.0;

  const MatX& at(int n, int m) const;
};

// Nodes and weights on (0, pi]: `panels` uniform panels, the first one refined dyadically `levels` times.
void theta_rule(int panels, int levels, int order, std::vector<double>& theta, std::vector<double>& weight);

// (Hs - lambda)^{-1} for lambda in a spectral gap of the strip symbol, by theta quadrature of the
// eigen-expansion. Throws EnergyInSpectrum if a band of the symbol crosses lambda or comes within 1e-10 of it.
GreenKernel gap_resolvent(const StripSymbol& s, double lambda, int max_offset, QuadratureOptions opt = {});

// Principal-value Green kernel at the cone energy; the pole model sum_k v_k v_k^H / (mu_k' theta)
// is subtracted and the remainder integrated with paired +-theta nodes.
// Throws GaugeMissing if g does not hold orthonormal eigenvectors of Hs(0) at lambda*.
GreenKernel physical_green_pv(const StripSymbol& s, const ConeGauge& g, int max_offset,
                              QuadratureOptions opt = {.order = 20, .levels = 0});

// Exact half-strip surface resolvents (H_semi - lambda)^{-1} by decimation.
struct SurfaceGreen {
  MatX right;  // chain n = 0, 1, 2, ... seen from n = 0
  MatX left;   // chain n = 0, -1, -2, ... seen from n = 0
  int iterations = 0;
};
SurfaceGreen surface_green(const StripSymbol& s, double lambda);

// Bulk resolvent from the decaying transfer maps: G(d) = PhiR^d G0 (d >= 0), PhiL^{-d} G0 (d < 0).
struct DecimatedResolvent {
  double lambda = 0.0;
  MatX phi_right;
  MatX phi_left;
  MatX g0;
  MatX at(int d) const;
};
DecimatedResolvent decimation_resolvent(const StripSymbol& s, double lambda);

// Dense inverse of the Dirichlet truncation on `blocks` blocks.
MatX truncated_inverse(const StripSymbol& s, double lambda, int blocks);

// max over probe offsets p of |sum_d hop(d) G(p + d) - lambda G(p) - [p == 0] I|.
double right_inverse_defect(const StripSymbol& s, const GreenKernel& g, const std::vector<int>& probes);

struct FarFieldReport {
  std::vector<double> residual_plus;   // |G(n, 0) - F| for n = 1..
  std::vector<double> residual_minus;  // |G(-n, 0) + F|
  double rate_plus = 1.0;
  double rate_minus = 1.0;
};
// F = (i / 2|alpha|)(v1 v1^H + v2 v2^H - v3 v3^H - v4 v4^H); rates are fitted per block while residuals exceed floor.
FarFieldReport far_field_check(const GreenKernel& pv, const ConeGauge& g, double floor = 1e-9);
MatX far_field_matrix(const ConeGauge& g);

using BlockField = std::function<VecX(int)>;
BlockField bloch_field(const VecX& v, double theta);

// a(phi, psi; n) = (Hs(1,0) phi(n-1), psi(n)) - (Hs(0,1) phi(n), psi(n-1)), with (x, y) = y^H x.
cplx energy_flux(const StripSymbol& s, const BlockField& phi, const BlockField& psi, int n);
double flux_site_independence(const StripSymbol& s, const BlockField& phi, const BlockField& psi,
                              const std::vector<int>& sites);
// |sum_{n=a}^{b} [((H - lambda) phi, psi)(n) - (phi, (H - lambda) psi)(n)] - (a(a) - a(b + 1))|
double green_identity_defect(const StripSymbol& s, double lambda, const BlockField& phi,
                             const BlockField& psi, int a, int b);

}  // namespace hexcone
