#pragma once

#include "hexcone/types.hpp"

#include <vector>

namespace hexcone {

// Hermitian block-tridiagonal matrix: diag[k] = H(k, k), upper[k] = H(k, k + 1).
struct BlockTridiagonal {
  std::vector<MatX> diag;
  std::vector<MatX> upper;

  int blocks() const { return static_cast<int>(diag.size()); }
  int block_dim() const { return diag.empty() ? 0 : static_cast<int>(diag.front().rows()); }
  int dim() const { return blocks() * block_dim(); }
  MatX dense() const;
  VecX apply(const VecX& x) const;
};

// Number of eigenvalues strictly below x (Sylvester inertia of the block LDL^H factorization).
int count_below(const BlockTridiagonal& H, double x);

struct EigenCluster {
  double value = 0.0;
  int multiplicity = 0;
};

// Eigenvalues in (lo, hi) by inertia bisection, resolved to abs_tol.
std::vector<EigenCluster> eigenvalues_in(const BlockTridiagonal& H, double lo, double hi,
                                         double abs_tol = 1e-14);

// Orthonormal basis (dim x m) of the eigenspace at mu by block inverse iteration.
MatX inverse_iteration(const BlockTridiagonal& H, double mu, int m, int sweeps = 4);

}  // namespace hexcone
