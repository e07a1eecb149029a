#include "hexcone/spectra.hpp"

#include "hexcone/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hexcone {

EigenBundle eigen_bundle(const MatX& H, double rel_tol) {
  Eigen::SelfAdjointEigenSolver<MatX> es(0.5 * (H + H.adjoint()));
  EigenBundle b;
  b.values = es.eigenvalues();
  b.vectors = es.eigenvectors();
  const int n = static_cast<int>(b.values.size());
  const double scale = std::max(b.values.cwiseAbs().maxCoeff(), 1e-300);
  std::vector<int> cur{0};
  for (int k = 1; k < n; ++k) {
    if (b.values(k) - b.values(k - 1) <= rel_tol * scale) {
      cur.push_back(k);
    } else {
      b.clusters.push_back(cur);
      cur = {k};
    }
  }
  if (n > 0) b.clusters.push_back(cur);
  const double hn = std::max(H.cwiseAbs().maxCoeff(), 1e-300);
  for (int k = 0; k < n; ++k)
    b.residual = std::max(b.residual, (H * b.vectors.col(k) - b.values(k) * b.vectors.col(k)).norm() / hn);
  return b;
}

Mat64 align_u_basis(const MatX& Q) {
  const Mat6 PR = rotation_op().on_gamma();
  const Mat6 PF = reflection_op().on_gamma();
  const Mat6 PT = supersymmetry_op().on_gamma();
  const MatX Rr = Q.adjoint() * PR * Q;
  if ((PR * Q - Q * Rr).norm() > 1e-8)
    throw NumericError(Failure::AlignmentFailure, "eigenspace is not rotation invariant");
  Eigen::ComplexEigenSolver<MatX> es(Rr);
  int best = 0;
  for (int k = 1; k < es.eigenvalues().size(); ++k)
    if (std::abs(es.eigenvalues()(k) - tau()) < std::abs(es.eigenvalues()(best) - tau())) best = k;
  if (std::abs(es.eigenvalues()(best) - tau()) > 1e-8)
    throw NumericError(Failure::AlignmentFailure, "no tau eigenvector of the rotation");
  Vec6 u1 = Q * es.eigenvectors().col(best);
  u1.normalize();
  int big = 0;
  for (int i = 1; i < 6; ++i)
    if (std::abs(u1(i)) > std::abs(u1(big)) + 1e-12) big = i;
  u1 *= std::conj(u1(big)) / std::abs(u1(big));

  Mat64 U;
  U.col(0) = u1;
  U.col(1) = PF * u1;
  U.col(3) = (PT * u1 + 0.5 * u1) / (I1 * (sqrt3 / 2.0));
  U.col(2) = PF * U.col(3);
  if (alignment_defect(U) > 1e-8 || (U.adjoint() * U - Mat4::Identity()).norm() > 1e-8)
    throw NumericError(Failure::AlignmentFailure, "eigenspace does not carry the four-dimensional irrep");
  return U;
}

double alignment_defect(const Mat64& U) {
  const Representation rep = rho_tilde();
  const std::array<SymmetryOp, 3> gens{rotation_op(), reflection_op(), supersymmetry_op()};
  double w = 0.0;
  for (int g = 0; g < 3; ++g) {
    const MatX lhs = gens[g].on_gamma() * U;
    const MatX rhs = U * rep.generators[g];
    w = std::max(w, (lhs - rhs).cwiseAbs().maxCoeff());
  }
  return w;
}

DiracData locate_double_dirac(const HoppingKernel& K) {
  for (const SymmetryOp& g : {rotation_op(), reflection_op(), supersymmetry_op()}) {
    if (commutator_norm(K, g) > 1e-10)
      throw NumericError(Failure::AlignmentFailure, "kernel does not commute with " + g.name);
  }
  const Mat6 H0 = bloch_matrix(K, 0.0, 0.0);
  const EigenBundle b = eigen_bundle(H0);
  int first = -1;
  for (const auto& c : b.clusters)
    if (c.size() == 4) first = c.front();
  if (first < 0) throw NumericError(Failure::NoFourFoldDegeneracy, "no 4-fold cluster at Gamma");

  DiracData d;
  d.first_band = first;
  d.lambda_star = b.values.segment(first, 4).mean();
  d.u = align_u_basis(b.vectors.middleCols(first, 4));
  d.alignment_defect = alignment_defect(d.u);
  d.H1 = d.u.adjoint() * bloch_derivative(K, 0.0, 0.0, 1) * d.u;
  d.H2 = d.u.adjoint() * bloch_derivative(K, 0.0, 0.0, 2) * d.u;
  const cplx a = d.H1(0, 2);
  if (std::abs(a.imag()) > 1e-10 * std::max(1.0, std::abs(a)))
    throw NumericError(Failure::AlignmentFailure, "cone slope is not real");
  d.alpha = a.real();

  auto fd = [&](double h) {
    const Mat4 D = d.u.adjoint() * (bloch_matrix(K, h, 0.0) - bloch_matrix(K, -h, 0.0)) * d.u;
    return D(0, 2).real() / (2.0 * h);
  };
  const double h = 1e-5;
  d.alpha_fd = (4.0 * fd(h / 2.0) - fd(h)) / 3.0;
  if (std::abs(d.alpha) < 1e-8) throw NumericError(Failure::VanishingSlope, "|alpha*| < 1e-8");
  return d;
}

GapCriterion verify_gap_criterion(const HoppingKernel& Hper, const DiracData& d) {
  GapCriterion c;
  const Mat4 P = d.u.adjoint() * bloch_matrix(Hper, 0.0, 0.0) * d.u;
  c.beta1 = P(0, 0).real();
  c.beta3 = P(2, 2).real();
  double off = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j) off = std::max(off, std::abs(P(i, j)));
  c.offdiag = off;
  if (std::abs(c.beta1) <= 1e-6)
    throw NumericError(Failure::NearZeroCoupling, "perturbation does not split the 4-fold eigenspace");
  if (std::abs(c.beta1 + c.beta3) > 1e-8)
    throw ModelError("perturbation diagonal is not of the form (beta, beta, -beta, -beta)");
  c.swapped = c.beta1 < 0.0;
  const double s = c.swapped ? -1.0 : 1.0;
  c.beta = std::abs(c.beta1);
  c.oriented_per = s * Hper;
  c.per_u = s * P;
  return c;
}

namespace {

struct IrrepProjectors {
  Mat6 rho1;
  Mat6 rho2;
};

IrrepProjectors projectors() {
  const auto group = generate_group(false);
  return {isotypic_projector(group, rho1()), isotypic_projector(group, rho2())};
}

double score(const Mat6& P, const MatX& W) {
  return (P * W).squaredNorm() / static_cast<double>(W.cols());
}

}  // namespace

InversionScores inversion_scores(const HoppingKernel& Hb, const GapCriterion& c, const DiracData& d,
                                 double delta) {
  const IrrepProjectors pr = projectors();
  InversionScores s;
  for (int sign : {+1, -1}) {
    const EigenBundle b = eigen_bundle(bloch_matrix(perturbed(Hb, c.oriented_per, sign * delta), 0.0, 0.0));
    const MatX W = b.vectors.middleCols(d.first_band, 2);
    if (sign > 0) {
      s.plus_lower_rho1 = score(pr.rho1, W);
      s.plus_lower_rho2 = score(pr.rho2, W);
    } else {
      s.minus_lower_rho1 = score(pr.rho1, W);
      s.minus_lower_rho2 = score(pr.rho2, W);
    }
  }
  return s;
}

GapReport gap_report(const HoppingKernel& Hb, const GapCriterion& c, const DiracData& d, double delta,
                     const GapScanOptions& opt) {
  GapReport r;
  r.delta = delta;
  r.predicted = 2.0 * c.beta * delta;
  r.interval_lo = d.lambda_star - opt.c_star * c.beta * delta;
  r.interval_hi = d.lambda_star + opt.c_star * c.beta * delta;

  std::vector<std::pair<double, double>> samples;
  const int g = std::max(2, opt.grid);
  for (int a = 0; a < g; ++a)
    for (int b = 0; b < g; ++b)
      samples.emplace_back(-0.5 + static_cast<double>(a) / (g - 1), -0.5 + static_cast<double>(b) / (g - 1));
  const int rg = std::max(2, opt.refine_grid);
  for (int a = 0; a < rg; ++a)
    for (int b = 0; b < rg; ++b)
      samples.emplace_back(opt.refine_radius * (-1.0 + 2.0 * a / (rg - 1)),
                           opt.refine_radius * (-1.0 + 2.0 * b / (rg - 1)));

  const int fb = d.first_band;
  for (int sign : {+1, -1}) {
    const HoppingKernel K = perturbed(Hb, c.oriented_per, sign * delta);
    const Eigen::VectorXd ev0 = eigen_bundle(bloch_matrix(K, 0.0, 0.0)).values;
    if (delta > 0.0 && !(ev0(fb + 2) - ev0(fb + 1) > 1e-12))
      throw NumericError(Failure::GridTooCoarse, "bands 2 and 3 of the cone are not separated at Gamma");
    std::vector<double> lo(samples.size()), hi(samples.size());
    parallel_for(samples.size(), [&](std::size_t i) {
      const DualMomentum k{samples[i].first, samples[i].second};
      Eigen::SelfAdjointEigenSolver<Mat6> es(bloch_matrix(K, k), Eigen::EigenvaluesOnly);
      lo[i] = es.eigenvalues()(fb + 1);
      hi[i] = es.eigenvalues()(fb + 2);
    });
    const double l = *std::max_element(lo.begin(), lo.end());
    const double h = *std::min_element(hi.begin(), hi.end());
    if (sign > 0) {
      r.lo = l;
      r.hi = h;
    } else {
      r.lo = std::max(r.lo, l);
      r.hi = std::min(r.hi, h);
    }
  }
  r.has_gap = r.hi - r.lo > 1e-12;
  r.width = r.has_gap ? r.hi - r.lo : 0.0;
  r.ratio = r.predicted > 0.0 ? r.width / r.predicted : 0.0;
  r.midpoint_offset = 0.5 * (r.lo + r.hi) - d.lambda_star;
  r.inversion = inversion_scores(Hb, c, d, delta);
  return r;
}

AsymptoticsReport eigenpair_asymptotics_check(const HoppingKernel& Hb, const GapCriterion& c,
                                              const DiracData& d, double delta, double theta1,
                                              double theta2) {
  const HoppingKernel K = perturbed(Hb, c.oriented_per, delta);
  const EigenBundle b = eigen_bundle(bloch_matrix(K, theta1, theta2));
  const int fb = d.first_band;
  const double s = std::abs(d.alpha) * std::abs(theta1 + std::conj(tau() * tau()) * theta2);
  const double e = std::sqrt(c.beta * c.beta * delta * delta + s * s);
  const std::array<double, 4> model{d.lambda_star - e, d.lambda_star - e, d.lambda_star + e,
                                    d.lambda_star + e};
  AsymptoticsReport r;
  for (int k = 0; k < 4; ++k)
    r.eigenvalue_residual = std::max(r.eigenvalue_residual, std::abs(b.values(fb + k) - model[k]));

  const Mat4 Heff = theta1 * d.H1 + theta2 * d.H2 + delta * c.per_u;
  Eigen::SelfAdjointEigenSolver<Mat4> es(0.5 * (Heff + Heff.adjoint()));
  const MatX Y = d.u * es.eigenvectors().leftCols(2);
  const MatX W = b.vectors.middleCols(fb, 2);
  const MatX rest = Y - W * (W.adjoint() * Y);
  r.eigenvector_residual = Eigen::JacobiSVD<MatX>(rest).singularValues()(0);
  return r;
}

std::vector<FlatCluster> flatness_check(const HoppingKernel& K) {
  const IrrepProjectors pr = projectors();
  const EigenBundle b = eigen_bundle(bloch_matrix(K, 0.0, 0.0));
  const Mat6 D1 = bloch_derivative(K, 0.0, 0.0, 1);
  const Mat6 D2 = bloch_derivative(K, 0.0, 0.0, 2);
  std::vector<FlatCluster> out;
  for (const auto& c : b.clusters) {
    if (c.size() != 2) continue;
    const MatX W = b.vectors.middleCols(c.front(), 2);
    const double s1 = score(pr.rho1, W);
    const double s2 = score(pr.rho2, W);
    if (std::max(s1, s2) < 0.99) continue;
    FlatCluster f;
    f.eigenvalue = b.values(c.front());
    f.irrep = s1 >= s2 ? "rho1" : "rho2";
    f.score = std::max(s1, s2);
    f.first_order_norm = std::max((W.adjoint() * D1 * W).cwiseAbs().maxCoeff(),
                                  (W.adjoint() * D2 * W).cwiseAbs().maxCoeff());
    out.push_back(f);
  }
  return out;
}

ConeGauge fix_gauge_v(const DiracData& d) {
  ConeGauge g;
  g.lambda_star = d.lambda_star;
  g.alpha_abs = std::abs(d.alpha);
  g.sign_alpha = d.alpha < 0.0 ? -1.0 : 1.0;
  const double s = g.sign_alpha;
  const auto& u = d.u;
  g.v.col(0) = 0.5 * (s * u.col(0) + s * u.col(1) + u.col(2) + u.col(3));
  g.v.col(1) = 0.5 * (s * u.col(0) - s * u.col(1) + u.col(2) - u.col(3));
  g.v.col(2) = 0.5 * (-s * u.col(0) - s * u.col(1) + u.col(2) + u.col(3));
  g.v.col(3) = 0.5 * (s * u.col(0) - s * u.col(1) - u.col(2) + u.col(3));
  g.slopes << g.alpha_abs, g.alpha_abs, -g.alpha_abs, -g.alpha_abs;
  return g;
}

std::vector<double> default_label_grid(int points_per_side, double smallest) {
  std::vector<double> pos(points_per_side);
  for (int k = 0; k < points_per_side; ++k) {
    const double t = points_per_side > 1 ? static_cast<double>(k) / (points_per_side - 1) : 1.0;
    pos[k] = pi * std::pow(smallest, 1.0 - t);
  }
  std::vector<double> out;
  for (auto it = pos.rbegin(); it != pos.rend(); ++it) out.push_back(-*it);
  out.insert(out.end(), pos.begin(), pos.end());
  return out;
}

AnalyticBands analytic_label(const HoppingKernel& K, const DiracData& d, const std::vector<double>& theta,
                             int direction) {
  const std::size_t n = theta.size();
  std::vector<Eigen::Matrix<double, 6, 1>> vals(n);
  std::vector<Mat6> vecs(n);
  parallel_for(n, [&](std::size_t i) {
    Eigen::SelfAdjointEigenSolver<Mat6> es(bloch_matrix(K, theta[i], 0.0));
    vals[i] = es.eigenvalues();
    vecs[i] = es.eigenvectors();
  });

  std::array<int, 6> base{};
  std::iota(base.begin(), base.end(), 0);
  std::vector<std::array<int, 6>> perms;
  do perms.push_back(base);
  while (std::next_permutation(base.begin(), base.end()));

  std::vector<std::array<int, 6>> map(n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (direction < 0) std::reverse(order.begin(), order.end());
  std::iota(map[order[0]].begin(), map[order[0]].end(), 0);
  for (std::size_t s = 1; s < n; ++s) {
    const std::size_t a = order[s - 1], b = order[s];
    Eigen::Matrix<double, 6, 6> O;
    for (int l = 0; l < 6; ++l)
      for (int j = 0; j < 6; ++j) O(l, j) = std::norm(vecs[a].col(map[a][l]).dot(vecs[b].col(j)));
    double best = -1.0, second = -1.0;
    std::size_t arg = 0;
    for (std::size_t p = 0; p < perms.size(); ++p) {
      double w = 0.0;
      for (int l = 0; l < 6; ++l) w += O(l, perms[p][l]);
      if (w > best) {
        second = best;
        best = w;
        arg = p;
      } else if (w > second) {
        second = w;
      }
    }
    if (best - second <= 1e-6)
      throw NumericError(Failure::ContinuationAmbiguity,
                         "overlap tie at theta1 = " + std::to_string(theta[b]));
    map[b] = perms[arg];
  }

  // Rename labels: cone branches first (ascending at 0+ : +slope pair, -slope pair), others after.
  std::size_t s0 = n;
  for (std::size_t i = 0; i < n; ++i)
    if (theta[i] > 0.0 && (s0 == n || theta[i] < theta[s0])) s0 = i;
  if (s0 == n) throw std::invalid_argument("label grid needs positive samples");
  const ConeGauge gauge = fix_gauge_v(d);
  std::array<int, 6> byval{};
  std::iota(byval.begin(), byval.end(), 0);
  std::sort(byval.begin(), byval.end(), [&](int x, int y) {
    return std::abs(vals[s0](map[s0][x]) - d.lambda_star) < std::abs(vals[s0](map[s0][y]) - d.lambda_star);
  });
  std::vector<int> up, down, other;
  for (int k = 0; k < 6; ++k) {
    const int l = byval[k];
    if (k >= 4)
      other.push_back(l);
    else if (vals[s0](map[s0][l]) > d.lambda_star)
      up.push_back(l);
    else
      down.push_back(l);
  }
  if (up.size() != 2 || down.size() != 2)
    throw NumericError(Failure::ContinuationAmbiguity, "cone branches are not split 2 + 2 near 0");
  auto overlap = [&](int l, int k) { return std::norm(gauge.v.col(k).dot(vecs[s0].col(map[s0][l]))); };
  if (overlap(up[1], 0) > overlap(up[0], 0)) std::swap(up[0], up[1]);
  if (overlap(down[1], 2) > overlap(down[0], 2)) std::swap(down[0], down[1]);
  if (vals[s0](map[s0][other[1]]) < vals[s0](map[s0][other[0]])) std::swap(other[0], other[1]);
  const std::array<int, 6> rename{up[0], up[1], down[0], down[1], other[0], other[1]};

  AnalyticBands out;
  out.theta = theta;
  out.mu.resize(static_cast<Eigen::Index>(n), 6);
  out.map.resize(n);
  out.vectors.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int l = 0; l < 6; ++l) {
      const int idx = map[i][rename[l]];
      out.map[i][l] = idx;
      out.mu(static_cast<Eigen::Index>(i), l) = vals[i](idx);
      out.vectors[i].col(l) = vecs[i].col(idx);
    }
  }
  return out;
}

}  // namespace hexcone
