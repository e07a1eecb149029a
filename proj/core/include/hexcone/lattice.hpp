#pragma once

#include "hexcone/types.hpp"

#include <array>
#include <compare>
#include <string>
#include <vector>

namespace hexcone {

struct CellIndex {
  int n1 = 0;
  int n2 = 0;
  auto operator<=>(const CellIndex&) const = default;
  CellIndex operator+(const CellIndex& o) const { return {n1 + o.n1, n2 + o.n2}; }
  CellIndex operator-(const CellIndex& o) const { return {n1 - o.n1, n2 - o.n2}; }
};

// sub is 1-based, matching the hexagon labels.
struct SiteIndex {
  CellIndex cell;
  int sub = 1;
  auto operator<=>(const SiteIndex&) const = default;
};

Eigen::Vector2d ell1();
Eigen::Vector2d ell2();
// Columns are ell1, ell2.
Eigen::Matrix2d lattice_basis();
Eigen::Vector2d sublattice_offset(int sub);
Eigen::Vector2d real_position(const SiteIndex& s);

// Momentum in dual-basis coordinates; theta_j = 2*pi*k_j is the phase per lattice step.
struct DualMomentum {
  double k1 = 0.0;
  double k2 = 0.0;
  DualMomentum canonical() const;
  double theta1() const { return 2.0 * pi * k1; }
  double theta2() const { return 2.0 * pi * k2; }
};

// Pullback site map (U u)(n, i) = u(A n + s_i, sigma(i)).
struct SymmetryOp {
  std::string name;
  Eigen::Matrix2i cells = Eigen::Matrix2i::Identity();
  std::array<int, 6> perm{0, 1, 2, 3, 4, 5};  // 0-based sigma
  std::array<CellIndex, 6> shift{};

  SiteIndex apply(const SiteIndex& s) const;
  // Active geometric action on real positions.
  Eigen::Matrix2d ext() const;
  // Matrix on the periodic Bloch space X_0: (P v)_i = v_{sigma(i)}.
  Mat6 on_gamma() const;
  // Maps X_theta to X_{A^T theta}; returns the target phases and the 6x6 intertwiner.
  Mat6 bloch_action(double theta1, double theta2, double& out1, double& out2) const;
  // Operator product this * other, i.e. apply other's pullback after this one's.
  SymmetryOp then(const SymmetryOp& other) const;
  bool is_pure_translation() const;
};

SymmetryOp identity_op();
SymmetryOp rotation_op();     // rotation by +60 degrees about the cell centre
SymmetryOp reflection_op();   // reflection y -> -y
SymmetryOp supersymmetry_op();
SymmetryOp reflection_y_op(); // rotation^3 composed with reflection_op

struct GroupElement {
  SymmetryOp op;
  std::vector<int> word;  // generator indices, leftmost acts first as an operator product
  Mat6 gamma;
};

// Generators: 0 = rotation, 1 = reflection, 2 = supersymmetry (when included).
std::vector<GroupElement> generate_group(bool include_supersymmetry);
// Index of the element whose X_0 matrix equals m, or -1.
int find_element(const std::vector<GroupElement>& group, const Mat6& m, double tol = 1e-12);

// Irreducible representation given on generators, evaluated on words.
struct Representation {
  std::string name;
  std::vector<MatX> generators;
  MatX evaluate(const std::vector<int>& word) const;
  int dim() const { return static_cast<int>(generators.front().rows()); }
};

cplx tau();
Representation rho1();
Representation rho2();
Representation rho_tilde();
// All six irreducible representations of C6v in the generator convention above.
std::vector<Representation> c6v_irreps();

// Max over pairs of |rho(gh) - rho(g) rho(h)|, using X_0 matrices to identify gh.
double homomorphism_defect(const std::vector<GroupElement>& group, const Representation& rep);
// Defects of R^6 = F^2 = 1 and R F = F R^{-1} (plus T^3 = 1, F T = T F, R T = T^{-1} R for rho_tilde).
double relation_defect(const Representation& rep);

// P = (d/|G|) sum_g conj(chi(g)) U_g on X_0.
Mat6 isotypic_projector(const std::vector<GroupElement>& group, const Representation& rep);

// Eigenvalues of k1 H1 + k2 H2, sorted ascending.
Eigen::Vector4d dispersion_det_roots(const Mat4& H1, const Mat4& H2, double k1, double k2);

}  // namespace hexcone
