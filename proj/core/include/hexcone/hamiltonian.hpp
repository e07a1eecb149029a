#pragma once

#include "hexcone/lattice.hpp"
#include "hexcone/types.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hexcone {

// Translation-invariant kernel: blocks[e] = H(n, n + e).
class HoppingKernel {
 public:
  std::map<CellIndex, Mat6> blocks;

  Mat6 at(const CellIndex& e) const;
  // Largest |e1| among nonzero blocks; this is the blocking size along l1.
  int range1() const;
  double hermiticity_defect() const;
  HoppingKernel& add(const HoppingKernel& other, double scale = 1.0);
  void prune(double tol = 0.0);
};

HoppingKernel operator+(HoppingKernel a, const HoppingKernel& b);
HoppingKernel operator*(double s, HoppingKernel a);

// Kernel from a pair rule evaluated on all site pairs with cell offsets |e1| <= 2, |e2| <= 3.
HoppingKernel kernel_from_rule(const std::function<double(double dist, const CellIndex& e, int i, int j)>& rule);

HoppingKernel build_toy_bulk();
HoppingKernel build_extended_bulk();
// toy + t * (extended - toy)
HoppingKernel build_blended_bulk(double t);
HoppingKernel build_Hper();

enum class ModelKind { Toy, Extended, Blended };
ModelKind parse_model(const std::string& name);
std::string model_name(ModelKind m);
HoppingKernel build_bulk(ModelKind m, double blend = 0.2);

inline constexpr double default_blend = 0.2;

// H_b + delta * H_per
HoppingKernel perturbed(const HoppingKernel& Hb, const HoppingKernel& Hper, double delta);

// H(theta) = sum_e exp(i theta.e) K(e), theta_j = 2 pi k_j.
Mat6 bloch_matrix(const HoppingKernel& K, double theta1, double theta2);
Mat6 bloch_matrix(const HoppingKernel& K, const DualMomentum& k);
// d/d theta_j of the Bloch matrix, j in {1, 2}.
Mat6 bloch_derivative(const HoppingKernel& K, double theta1, double theta2, int j);

// Operator-norm bound (Schur test) of U_g H U_g^{-1} - H on l^2(sites).
double commutator_norm(const HoppingKernel& K, const SymmetryOp& g);
// Norm of P H P^{-1} - H on X_0, with P = g.on_gamma().
double commutator_norm_gamma(const Mat6& H0, const SymmetryOp& g);

struct NonsingularReport {
  bool nonsingular = false;
  double sigma_min = 0.0;
  double condition = 0.0;
};
NonsingularReport check_nonsingular_hopping(const HoppingKernel& K, double tol = 1e-10);

// Blocked strip symbol with quasi-momentum kpar along l2 and blocks of N cells along l1:
// hop(d) = Htilde(n, n + d) for d in {-1, 0, 1}.
struct StripSymbol {
  int cells_per_block = 1;
  MatX down;  // Htilde(n, n-1)
  MatX diag;  // Htilde(n, n)
  MatX up;    // Htilde(n, n+1)

  int dim() const { return static_cast<int>(diag.rows()); }
  const MatX& hop(int d) const;
  // sum_d exp(i theta d) hop(d)
  MatX at(double theta) const;
  MatX derivative(double theta) const;
};

StripSymbol strip_symbol(const HoppingKernel& K, double kpar, int cells_per_block = 0);

// Interface operator: H_{+delta} for n, m >= 0, H_{-delta} for n, m < 0, seam otherwise.
struct InterfaceKernel {
  HoppingKernel right;
  HoppingKernel left;
  HoppingKernel seam;
  double delta = 0.0;
  bool inverted = true;
};

// With inverted = false both half-planes carry H_{+delta}.
InterfaceKernel make_interface(const HoppingKernel& Hb, const HoppingKernel& Hper, double delta,
                               bool inverted = true,
                               const std::optional<HoppingKernel>& seam_extra = std::nullopt);

struct InterfaceStrip {
  StripSymbol right;
  StripSymbol left;
  StripSymbol seam;
  double delta = 0.0;
  bool inverted = true;
  double kpar = 0.0;

  int dim() const { return right.dim(); }
  // Block Htilde_zig(n, m) for |n - m| <= 1.
  MatX block(int n, int m) const;
};

InterfaceStrip interface_strip(const InterfaceKernel& ik, double kpar, int cells_per_block = 0);

// Dense truncation of the blocked interface operator on blocks [first, first + count).
MatX truncate(const InterfaceStrip& s, int first, int count);
MatX truncate(const StripSymbol& s, int count);

// The internal matrix of Fx applied blockwise at kpar in {0, pi}; block index n enters at kpar = pi.
MatX blocked_reflection(int cells_per_block, double kpar, int block);

}  // namespace hexcone
