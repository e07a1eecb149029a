#include "hexcone/blocktri.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <functional>

namespace hexcone {

MatX BlockTridiagonal::dense() const {
  const int D = block_dim();
  MatX out = MatX::Zero(dim(), dim());
  for (int k = 0; k < blocks(); ++k) {
    out.block(D * k, D * k, D, D) = diag[k];
    if (k + 1 < blocks()) {
      out.block(D * k, D * (k + 1), D, D) = upper[k];
      out.block(D * (k + 1), D * k, D, D) = upper[k].adjoint();
    }
  }
  return out;
}

VecX BlockTridiagonal::apply(const VecX& x) const {
  const int D = block_dim();
  VecX y = VecX::Zero(dim());
  for (int k = 0; k < blocks(); ++k) {
    y.segment(D * k, D) += diag[k] * x.segment(D * k, D);
    if (k + 1 < blocks()) {
      y.segment(D * k, D) += upper[k] * x.segment(D * (k + 1), D);
      y.segment(D * (k + 1), D) += upper[k].adjoint() * x.segment(D * k, D);
    }
  }
  return y;
}

int count_below(const BlockTridiagonal& H, double x) {
  const int D = H.block_dim();
  const MatX Id = MatX::Identity(D, D);
  int neg = 0;
  // Each pivot is inverted through the same eigendecomposition whose signs were counted, which keeps
  // the count consistent when a pivot is nearly singular.
  MatX V;
  Eigen::VectorXd inv;
  for (int k = 0; k < H.blocks(); ++k) {
    MatX cur = H.diag[k] - x * Id;
    if (k > 0) {
      const MatX W = V.adjoint() * H.upper[k - 1];
      cur -= W.adjoint() * inv.asDiagonal() * W;
    }
    cur = 0.5 * (cur + cur.adjoint());
    Eigen::SelfAdjointEigenSolver<MatX> es(cur);
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double floor = 1e-300;
    inv.resize(D);
    for (int i = 0; i < D; ++i) {
      double e = ev(i);
      if (e < 0.0) ++neg;
      if (std::abs(e) < floor) e = e < 0.0 ? -floor : floor;
      inv(i) = 1.0 / e;
    }
    V = es.eigenvectors();
  }
  return neg;
}

std::vector<EigenCluster> eigenvalues_in(const BlockTridiagonal& H, double lo, double hi, double abs_tol) {
  std::vector<EigenCluster> out;
  std::function<void(double, int, double, int)> split = [&](double a, int ca, double b, int cb) {
    if (cb == ca) return;
    if (b - a <= abs_tol) {
      out.push_back({0.5 * (a + b), cb - ca});
      return;
    }
    const double m = 0.5 * (a + b);
    const int cm = count_below(H, m);
    split(a, ca, m, cm);
    split(m, cm, b, cb);
  };
  split(lo, count_below(H, lo), hi, count_below(H, hi));
  return out;
}

namespace {

// LU with partial pivoting of a band matrix with kl sub- and ku super-diagonals, stored column-wise with
// room for the fill-in of row interchanges (the layout of LAPACK gbtrf).
class BandLU {
 public:
  BandLU(const BlockTridiagonal& H, double mu) {
    const int D = H.block_dim();
    n_ = H.dim();
    kl_ = 2 * D - 1;
    ku_ = 2 * D - 1;
    kv_ = kl_ + ku_;
    ab_ = MatX::Zero(2 * kl_ + ku_ + 1, n_);
    for (int k = 0; k < H.blocks(); ++k)
      for (int a = 0; a < D; ++a)
        for (int b = 0; b < D; ++b) {
          at(D * k + a, D * k + b) = H.diag[k](a, b) - (a == b ? mu : 0.0);
          if (k + 1 < H.blocks()) {
            at(D * k + a, D * (k + 1) + b) = H.upper[k](a, b);
            at(D * (k + 1) + b, D * k + a) = std::conj(H.upper[k](a, b));
          }
        }
    double scale = 0.0;
    for (int j = 0; j < n_; ++j) scale = std::max(scale, ab_.col(j).cwiseAbs().maxCoeff());
    const double tiny = std::max(scale, 1.0) * 1e-16;
    piv_.resize(n_);
    int ju = 0;
    for (int j = 0; j < n_; ++j) {
      const int km = std::min(kl_, n_ - 1 - j);
      int jp = 0;
      for (int i = 1; i <= km; ++i)
        if (std::abs(at(j + i, j)) > std::abs(at(j + jp, j))) jp = i;
      piv_[j] = j + jp;
      if (std::abs(at(j + jp, j)) == 0.0) at(j + jp, j) = tiny;
      ju = std::max(ju, std::min(j + ku_ + jp, n_ - 1));
      if (jp != 0)
        for (int c = j; c <= ju; ++c) std::swap(at(j, c), at(j + jp, c));
      const cplx p = at(j, j);
      for (int i = 1; i <= km; ++i) at(j + i, j) /= p;
      for (int c = j + 1; c <= ju; ++c) {
        const cplx u = at(j, c);
        if (u == 0.0) continue;
        for (int i = 1; i <= km; ++i) at(j + i, c) -= at(j + i, j) * u;
      }
    }
  }

  MatX solve(MatX x) const {
    for (int j = 0; j < n_; ++j) {
      if (piv_[j] != j) x.row(j).swap(x.row(piv_[j]));
      const int km = std::min(kl_, n_ - 1 - j);
      for (int i = 1; i <= km; ++i) x.row(j + i) -= at(j + i, j) * x.row(j);
    }
    for (int j = n_ - 1; j >= 0; --j) {
      x.row(j) /= at(j, j);
      const int top = std::max(0, j - kv_);
      for (int i = top; i < j; ++i) x.row(i) -= at(i, j) * x.row(j);
    }
    return x;
  }

 private:
  cplx& at(int i, int j) { return ab_(kv_ + i - j, j); }
  const cplx& at(int i, int j) const { return ab_(kv_ + i - j, j); }

  int n_ = 0, kl_ = 0, ku_ = 0, kv_ = 0;
  MatX ab_;
  std::vector<int> piv_;
};

}  // namespace

MatX inverse_iteration(const BlockTridiagonal& H, double mu, int m, int sweeps) {
  const int n = H.dim();
  const BandLU lu(H, mu);
  MatX X(n, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i)
      X(i, j) = cplx(std::cos(0.37 * (i + 1) * (j + 1)), std::sin(0.11 * (i + 3) * (j + 2)));
  for (int s = 0; s < sweeps; ++s) {
    X = lu.solve(X);
    Eigen::HouseholderQR<MatX> qr(X);
    X = qr.householderQ() * MatX::Identity(n, m);
  }
  return X;
}

}  // namespace hexcone
