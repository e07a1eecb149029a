#include "hexcone/matching.hpp"

#include "hexcone/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>

namespace hexcone {

namespace {

// G(d) for d in {-1, 0, 1}, d = n - m.
std::array<MatX, 3> near_resolvent(const StripSymbol& s, double lambda, const MatchingOptions& opt) {
  std::array<MatX, 3> g;
  if (opt.method == ResolventMethod::Decimation) {
    const DecimatedResolvent r = decimation_resolvent(s, lambda);
    for (int d = -1; d <= 1; ++d) g[d + 1] = r.at(d);
  } else {
    const GreenKernel k = gap_resolvent(s, lambda, 1, opt.quad);
    for (int d = -1; d <= 1; ++d) g[d + 1] = k.blocks.at(d);
  }
  return g;
}

MatX stack2x2(const MatX& a, const MatX& b, const MatX& c, const MatX& d) {
  const int D = static_cast<int>(a.rows());
  MatX out(2 * D, 2 * D);
  out << a, b, c, d;
  return out;
}

double fitted_ratio(const std::vector<double>& r) {
  std::vector<double> ys;
  for (double v : r) {
    if (v <= 1e-13) break;
    ys.push_back(std::log(v));
  }
  if (ys.size() < 3) return 0.0;
  const double n = static_cast<double>(ys.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < ys.size(); ++k) {
    const double x = static_cast<double>(k);
    sx += x;
    sy += ys[k];
    sxx += x * x;
    sxy += x * ys[k];
  }
  return std::exp((n * sxy - sx * sy) / (n * sxx - sx * sx));
}

}  // namespace

MatchingPair assemble_matching(const InterfaceStrip& s, double lambda, const Interval& gap,
                               const MatchingOptions& opt) {
  if (!gap.contains(lambda))
    throw NumericError(Failure::EnergyOutsideGap, "lambda = " + std::to_string(lambda) + " is outside the gap");
  const auto Gp = near_resolvent(s.right, lambda, opt);
  const auto Gm = near_resolvent(s.left, lambda, opt);
  auto gp = [&](int d) -> const MatX& { return Gp[d + 1]; };
  auto gm = [&](int d) -> const MatX& { return Gm[d + 1]; };

  const MatX& Hp01 = s.right.down;
  const MatX& Hp10 = s.right.up;
  const MatX& Hm01 = s.left.down;
  const MatX& Hm10 = s.left.up;
  const MatX& Hz01 = s.seam.down;
  const MatX& Hz10 = s.seam.up;

  MatchingPair out;
  out.lambda = lambda;
  out.delta = s.delta;
  out.M = stack2x2(-Hp01 * gp(0) * Hp10 - Hz01 * gm(0) * Hz10,
                   -Hz01 + Hp01 * gp(-1) * Hz01 + Hz01 * gm(-1) * Hm01,
                   -Hz10 + Hm10 * gm(1) * Hz10 + Hz10 * gp(1) * Hp10,
                   -Hm10 * gm(0) * Hm01 - Hz10 * gp(0) * Hz01);
  out.aux = stack2x2(gp(1) * Hp10, -gp(0) * Hz01, -gm(0) * Hz10, gm(-1) * Hm01);
  return out;
}

double LimitPieces::xi(double h) const { return h / (alpha_abs * std::sqrt(beta * beta - h * h)); }
double LimitPieces::eta(double h) const { return beta / (alpha_abs * std::sqrt(beta * beta - h * h)); }

LimitPieces limit_pieces(const StripSymbol& bulk, const ConeGauge& g, double beta, QuadratureOptions opt) {
  LimitPieces p;
  p.alpha_abs = g.alpha_abs;
  p.beta = beta;
  p.green = physical_green_pv(bulk, g, 2, opt);
  auto G = [&](int d) -> const MatX& { return p.green.blocks.at(d); };
  const MatX& H01 = bulk.down;
  const MatX& H10 = bulk.up;
  const int D = bulk.dim();

  p.Mpv = stack2x2(-2.0 * H01 * G(0) * H10, -H01 + 2.0 * H01 * G(-1) * H01,
                   -H10 + 2.0 * H10 * G(1) * H10, -2.0 * H10 * G(0) * H01);
  p.aux_pv = stack2x2(G(1) * H10, -G(0) * H01, -G(0) * H10, G(-1) * H01);

  p.A = MatX::Zero(2 * D, 2 * D);
  p.aux1 = MatX::Zero(2 * D, 2 * D);
  p.aux2 = MatX::Zero(2 * D, 2 * D);
  p.kernel = MatX::Zero(2 * D, 4);
  const std::array<int, 4> perm{2, 3, 0, 1};
  for (int k = 0; k < 4; ++k) {
    const VecX v = g.v.col(k);
    const VecX x = H01 * v;
    const VecX y = H10 * v;
    p.A += stack2x2(-x * x.adjoint(), x * y.adjoint(), y * x.adjoint(), -y * y.adjoint());
    p.aux1 += 0.5 * stack2x2(v * x.adjoint(), -v * y.adjoint(), -v * x.adjoint(), v * y.adjoint());
    const VecX vp = g.v.col(perm[k]);
    const VecX xp = H01 * vp;
    const VecX yp = H10 * vp;
    const double sk = ((k + 1) % 2 == 0) ? 1.0 : -1.0;
    p.aux2 += 0.5 * sk * stack2x2(v * xp.adjoint(), -v * yp.adjoint(), v * xp.adjoint(), -v * yp.adjoint());
    p.kernel.col(k) << v, v;
  }
  p.mpv_singular_values = Eigen::JacobiSVD<MatX>(p.Mpv).singularValues();
  return p;
}

int SearchResult::characteristic_count() const {
  int c = 0;
  for (const auto& v : values) c += v.multiplicity;
  return c;
}

int SearchResult::mode_count() const {
  int c = 0;
  for (const auto& v : values) c += static_cast<int>(v.modes.cols());
  return c;
}

SearchResult characteristic_search(const InterfaceStrip& s, double lambda_star, double delta, double beta,
                                   const SearchOptions& opt) {
  const double radius = opt.c_star * beta;
  const Interval gap{lambda_star - radius * delta, lambda_star + radius * delta};
  auto sigma = [&](double h) {
    const MatchingPair mp = assemble_matching(s, lambda_star + delta * h, gap, opt.matching);
    return Eigen::JacobiSVD<MatX>(mp.M).singularValues();
  };

  SearchResult r;
  r.delta = delta;
  const int n = std::max(3, opt.grid);
  r.h_grid.resize(n);
  r.sigma_min.resize(n);
  std::vector<double> scale(n);
  for (int i = 0; i < n; ++i) r.h_grid[i] = radius * (-1.0 + 2.0 * (i + 0.5) / n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    const Eigen::VectorXd sv = sigma(r.h_grid[i]);
    r.sigma_min[i] = sv(sv.size() - 1);
    scale[i] = sv(0);
  });

  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto smin = [&](double h) {
    const Eigen::VectorXd sv = sigma(h);
    return sv(sv.size() - 1);
  };
  // Each coarse minimum is rescanned on a fine grid over two coarse steps per side, so that two
  // characteristic values closer than the coarse spacing are both bracketed.
  const int fine = 32;
  std::vector<std::pair<double, double>> brackets;
  for (int i = 1; i + 1 < n; ++i) {
    if (!(r.sigma_min[i] < r.sigma_min[i - 1] && r.sigma_min[i] <= r.sigma_min[i + 1])) continue;
    const double lo = r.h_grid[std::max(0, i - 2)], hi = r.h_grid[std::min(n - 1, i + 2)];
    std::vector<double> fh(fine + 1), fs(fine + 1);
    for (int k = 0; k <= fine; ++k) fh[k] = lo + (hi - lo) * k / fine;
    parallel_for(static_cast<std::size_t>(fine + 1), [&](std::size_t k) { fs[k] = smin(fh[k]); });
    for (int k = 1; k < fine; ++k)
      if (fs[k] < fs[k - 1] && fs[k] <= fs[k + 1]) brackets.emplace_back(fh[k - 1], fh[k + 1]);
  }
  std::vector<double> found;
  for (auto [a, b] : brackets) {
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    double fc = smin(c), fd = smin(d);
    while (b - a > opt.golden_tol) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - invphi * (b - a);
        fc = smin(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + invphi * (b - a);
        fd = smin(d);
      }
    }
    const double h = 0.5 * (a + b);
    if (std::any_of(found.begin(), found.end(), [&](double x) { return std::abs(x - h) < 1e-9; })) continue;
    const double lambda = lambda_star + delta * h;
    const MatchingPair mp = assemble_matching(s, lambda, gap, opt.matching);
    Eigen::JacobiSVD<MatX> svd(mp.M, Eigen::ComputeFullV);
    const Eigen::VectorXd sv = svd.singularValues();
    const double tol = opt.null_rel_tol * sv(0);
    int mult = 0;
    for (int k = 0; k < sv.size(); ++k)
      if (sv(k) <= tol) ++mult;
    if (mult == 0) continue;
    found.push_back(h);

    CharacteristicValue cv;
    cv.h = h;
    cv.lambda = lambda;
    cv.sigma_min = sv(sv.size() - 1);
    cv.multiplicity = mult;
    cv.null_space = svd.matrixV().rightCols(mult);
    const MatX B = cv.null_space.adjoint() * mp.aux * cv.null_space;
    Eigen::ComplexEigenSolver<MatX> es(B);
    std::vector<VecX> fixed;
    for (int k = 0; k < mult; ++k) {
      const cplx mu = es.eigenvalues()(k);
      cv.aux_eigenvalues.push_back(mu);
      if (std::abs(mu - 1.0) > opt.aux_tol) continue;
      VecX x = cv.null_space * es.eigenvectors().col(k);
      x.normalize();
      if ((mp.aux * x - x).norm() <= opt.aux_tol) fixed.push_back(x);
    }
    cv.modes = MatX(mp.M.rows(), static_cast<Eigen::Index>(fixed.size()));
    for (std::size_t k = 0; k < fixed.size(); ++k) cv.modes.col(static_cast<Eigen::Index>(k)) = fixed[k];
    r.values.push_back(std::move(cv));
  }
  if (r.values.empty())
    throw NumericError(Failure::NoCharacteristicValue,
                       "sigma_min(M) stays above " + std::to_string(opt.null_rel_tol) + " * ||M|| on J");
  return r;
}

InterfaceMode mode_from_boundary(const InterfaceStrip& s, double lambda, const VecX& boundary, const MatX& aux,
                                 int window) {
  const int D = s.dim();
  const VecX image = aux * boundary;
  if (image.norm() <= 1e-8 * boundary.norm())
    throw NumericError(Failure::DegenerateBoundaryData, "M^aux annihilates the boundary data");
  const VecX a = boundary.head(D);
  const VecX b = boundary.tail(D);
  const DecimatedResolvent Gp = decimation_resolvent(s.right, lambda);
  const DecimatedResolvent Gm = decimation_resolvent(s.left, lambda);
  const VecX ra = s.right.up * a, rb = s.seam.down * b;
  const VecX la = s.seam.up * a, lb = s.left.down * b;

  InterfaceMode mode;
  mode.lambda = lambda;
  mode.boundary = boundary;
  for (int W = window;; W *= 2) {
    std::vector<VecX> right(W), left(W);
    // u(n) = G+(n + 1) ra - G+(n) rb for n >= 0 and -G-(n + 1) la + G-(n) lb for n < 0.
    VecX pa = Gp.g0 * ra, pb = Gp.g0 * rb;  // G+(d) applied, d = 0
    VecX next_a = Gp.phi_right * pa;        // G+(1) ra
    right[0] = next_a - pb;
    for (int n = 1; n < W; ++n) {
      pb = Gp.phi_right * pb;
      next_a = Gp.phi_right * next_a;
      right[n] = next_a - pb;
    }
    VecX qa = Gm.g0 * la, qb = Gm.g0 * lb;  // d = 0
    // n = -1: -G-(0) la + G-(-1) lb
    qb = Gm.phi_left * qb;
    left[0] = -qa + qb;
    for (int n = 1; n < W; ++n) {
      qa = Gm.phi_left * qa;
      qb = Gm.phi_left * qb;
      left[n] = -qa + qb;
    }
    double total = 0.0;
    for (const auto& v : right) total += v.squaredNorm();
    for (const auto& v : left) total += v.squaredNorm();
    total = std::sqrt(total);
    const double tail = std::max(right.back().norm(), left.back().norm()) / total;
    if (tail < 1e-10 || W >= 8 * window) {
      mode.first_block = -W;
      mode.profile.clear();
      for (int n = W - 1; n >= 0; --n) mode.profile.push_back(left[n] / total);
      for (int n = 0; n < W; ++n) mode.profile.push_back(right[n] / total);
      mode.tail = tail;
      break;
    }
  }

  const int first = mode.first_block;
  const int last = first + static_cast<int>(mode.profile.size()) - 1;
  for (int n = first + 1; n < last; ++n) {
    VecX r = -lambda * mode.at(n);
    for (int d = -1; d <= 1; ++d) r += s.block(n, n + d) * mode.at(n + d);
    mode.residual = std::max(mode.residual, r.norm());
  }

  cplx overlap = 0.0;
  double defect = 0.0;
  const MatX F = blocked_reflection(D / 6, 0.0, 0);
  for (int n = first; n <= last; ++n) overlap += mode.at(n).dot(F * mode.at(n));
  mode.parity = overlap.real() >= 0.0 ? 1 : -1;
  for (int n = first; n <= last; ++n)
    defect += (blocked_reflection(D / 6, s.kpar, n) * mode.at(n) - mode.parity * mode.at(n)).squaredNorm();
  mode.parity_defect = std::sqrt(defect);

  std::vector<double> rn, ln;
  for (int n = 1; n <= last; ++n) rn.push_back(mode.at(n).norm());
  for (int n = -2; n >= first; --n) ln.push_back(mode.at(n).norm());
  mode.decay_right = fitted_ratio(rn);
  mode.decay_left = fitted_ratio(ln);
  return mode;
}

ModeCount count_interface_modes(const InterfaceStrip& s, double lambda_star, double delta, double beta,
                                const SearchOptions& opt) {
  ModeCount c;
  try {
    c.search = characteristic_search(s, lambda_star, delta, beta, opt);
  } catch (const NumericError& e) {
    if (e.kind() != Failure::NoCharacteristicValue) throw;
    c.no_characteristic_value = true;
    return c;
  }
  c.characteristic = c.search.characteristic_count();
  const double radius = opt.c_star * beta;
  const Interval gap{lambda_star - radius * delta, lambda_star + radius * delta};
  for (const auto& cv : c.search.values) {
    if (cv.modes.cols() == 0) continue;
    const MatchingPair mp = assemble_matching(s, cv.lambda, gap, opt.matching);
    for (Eigen::Index k = 0; k < cv.modes.cols(); ++k) {
      InterfaceMode m = mode_from_boundary(s, cv.lambda, cv.modes.col(k), mp.aux, opt.mode_window);
      m.h = cv.h;
      c.found.push_back(std::move(m));
    }
  }
  std::stable_sort(c.found.begin(), c.found.end(),
                   [](const InterfaceMode& x, const InterfaceMode& y) { return x.parity > y.parity; });
  c.modes = static_cast<int>(c.found.size());
  return c;
}

BlockTridiagonal interface_block_matrix(const InterfaceStrip& s, int P) {
  BlockTridiagonal H;
  for (int n = -P; n < P; ++n) {
    H.diag.push_back(s.block(n, n));
    if (n + 1 < P) H.upper.push_back(s.block(n, n + 1));
  }
  return H;
}

std::vector<OracleLevel> direct_oracle(const InterfaceStrip& s, const Interval& window, int P, double min_weight) {
  const BlockTridiagonal H = interface_block_matrix(s, P);
  const int D = H.block_dim();
  const MatX F = blocked_reflection(D / 6, 0.0, 0);
  std::vector<OracleLevel> out;
  for (const EigenCluster& c : eigenvalues_in(H, window.lo, window.hi, 1e-13)) {
    MatX X = inverse_iteration(H, c.value, c.multiplicity);
    MatX Pm = MatX::Zero(X.cols(), X.cols());
    for (int k = 0; k < H.blocks(); ++k)
      Pm += X.middleRows(D * k, D).adjoint() * F * X.middleRows(D * k, D);
    Eigen::SelfAdjointEigenSolver<MatX> es(0.5 * (Pm + Pm.adjoint()));
    X = X * es.eigenvectors();
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      const double w = X.col(j).segment(D * (P / 2), D * P).squaredNorm() / X.col(j).squaredNorm();
      if (w <= min_weight) continue;
      out.push_back({c.value, w, es.eigenvalues()(j) >= 0.0 ? 1 : -1});
    }
  }
  return out;
}

}  // namespace hexcone
