#include "hexcone/robustness.hpp"

#include "hexcone/green.hpp"
#include "hexcone/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hexcone {

namespace {

int pmod(int a, int L) { return ((a % L) + L) % L; }

double cell_y(const CellIndex& n) { return 0.5 * n.n1 + n.n2; }

double cell_radius(const CellIndex& n) { return (n.n1 * ell1() + n.n2 * ell2()).norm(); }

const HoppingKernel& region_kernel(const InterfaceKernel& ik, int n1, int m1) {
  if (n1 >= 0 && m1 >= 0) return ik.right;
  if (n1 < 0 && m1 < 0) return ik.left;
  return ik.seam;
}

// Fourier-diagonal lead data of a periodic strip: one 6-dimensional strip symbol per kpar = 2 pi j / L.
struct LeadSet {
  std::vector<StripSymbol> right, left;

  LeadSet(const InterfaceKernel& ik, int L) {
    for (int j = 0; j < L; ++j) {
      right.push_back(strip_symbol(ik.right, 2.0 * pi * j / L, 1));
      left.push_back(strip_symbol(ik.left, 2.0 * pi * j / L, 1));
    }
  }

  // Full-slice self-energies at both ends.
  std::pair<MatX, MatX> at(double lambda) const {
    const int L = static_cast<int>(right.size());
    std::vector<MatX> sr(L), sl(L);
    parallel_for(static_cast<std::size_t>(L), [&](std::size_t j) {
      sr[j] = lead_self_energy_right(right[j], lambda);
      sl[j] = lead_self_energy_left(left[j], lambda);
    });
    MatX R = MatX::Zero(6 * L, 6 * L), Lm = MatX::Zero(6 * L, 6 * L);
    for (int j = 0; j < L; ++j) {
      const double k = 2.0 * pi * j / L;
      for (int c = 0; c < L; ++c)
        for (int c2 = 0; c2 < L; ++c2) {
          const cplx ph = std::polar(1.0 / L, k * (c - c2));
          R.block(6 * c, 6 * c2, 6, 6) += ph * sr[j];
          Lm.block(6 * c, 6 * c2, 6, 6) += ph * sl[j];
        }
    }
    return {R, Lm};
  }
};

// Caches the energy-independent part of the exact-lead periodic strip operator.
class PeriodicAssembler {
 public:
  PeriodicAssembler(const PeriodicStrip& p, int parity, bool with_W) : p_(p), parity_(parity), leads_(p.ik, p.L) {
    const int R = p.R;
    for (int n1 = -R; n1 < R; ++n1) {
      MatX d = slice_block(p, n1, n1);
      MatX u = slice_block(p, n1, n1 + 1);
      if (with_W) {
        if (auto it = p.wblocks.find({n1, n1}); it != p.wblocks.end()) d += it->second;
        if (auto it = p.wblocks.find({n1, n1 + 1}); it != p.wblocks.end()) u += it->second;
      }
      if (parity != 0) {
        const MatX Q = parity_basis(p.L, n1, parity);
        const MatX Qn = parity_basis(p.L, n1 + 1, parity);
        d = Q.adjoint() * d * Q;
        u = Q.adjoint() * u * Qn;
      }
      base_.diag.push_back(d);
      if (n1 + 1 < R) base_.upper.push_back(u);
    }
    if (parity != 0) {
      q_first_ = parity_basis(p.L, -R, parity);
      q_last_ = parity_basis(p.L, R - 1, parity);
    }
  }

  BlockTridiagonal at(double lambda) const {
    BlockTridiagonal H = base_;
    auto [sr, sl] = leads_.at(lambda);
    if (parity_ != 0) {
      sr = q_last_.adjoint() * sr * q_last_;
      sl = q_first_.adjoint() * sl * q_first_;
    }
    H.diag.back() += sr;
    H.diag.front() += sl;
    return H;
  }

  // Self-energy poles seen by this sector: lead bound states at kpar = 2 pi j / L, where the pair j, L - j
  // contributes one state to each parity and j in {0, L / 2} only to its own parity.
  std::vector<double> lead_poles(const Interval& gap) const {
    const int L = p_.L;
    const int R = p_.R;
    std::vector<int> js;
    for (int j = 0; j <= L / 2; ++j) js.push_back(j);
    std::vector<std::vector<double>> per(js.size());
    parallel_for(js.size(), [&](std::size_t idx) {
      const int j = js[idx];
      const double k = p_.kpar(j);
      const bool self_paired = j == 0 || 2 * j == L;
      std::vector<LeadState> st = lead_bound_states(leads_.right[j], +1, k, R, gap);
      const std::vector<LeadState> sl = lead_bound_states(leads_.left[j], -1, k, -R - 1, gap);
      st.insert(st.end(), sl.begin(), sl.end());
      for (const LeadState& b : st) {
        if (self_paired) {
          if (parity_ == 0 || b.parity == parity_) per[idx].push_back(b.value);
        } else {
          per[idx].push_back(b.value);
          if (parity_ == 0) per[idx].push_back(b.value);
        }
      }
    });
    std::vector<double> out;
    for (const auto& v : per) out.insert(out.end(), v.begin(), v.end());
    return out;
  }

  MatX basis(int n1) const {
    return parity_ == 0 ? MatX(MatX::Identity(6 * p_.L, 6 * p_.L)) : parity_basis(p_.L, n1, parity_);
  }

 private:
  const PeriodicStrip& p_;
  int parity_;
  LeadSet leads_;
  BlockTridiagonal base_;
  MatX q_first_, q_last_;
};

std::vector<double> expand(const std::vector<EigenCluster>& cl) {
  std::vector<double> out;
  for (const auto& c : cl)
    for (int k = 0; k < c.multiplicity; ++k) out.push_back(c.value);
  return out;
}

}  // namespace

DefectKind parse_defect(const std::string& name) {
  if (name == "compact") return DefectKind::Compact;
  if (name == "line") return DefectKind::Line;
  throw std::invalid_argument("unknown defect kind: " + name);
}

std::string defect_name(DefectKind k) { return k == DefectKind::Compact ? "compact" : "line"; }

PerturbationW build_W(DefectKind kind, double amplitude, int half_width) {
  PerturbationW W;
  W.kind = kind;
  W.amplitude = amplitude;
  W.half_width = half_width;
  constexpr double eps = 1e-9;
  auto near = [&](const CellIndex& n) {
    return kind == DefectKind::Compact ? cell_radius(n) <= 1.0 + eps : std::abs(cell_y(n)) <= 1.0 + eps;
  };
  std::vector<CellIndex> cand;
  const int h1 = kind == DefectKind::Compact ? 3 : half_width;
  for (int n1 = -h1; n1 <= h1; ++n1)
    for (int n2 = -h1 - 4; n2 <= h1 + 4; ++n2) {
      const CellIndex n{n1, n2};
      if (kind == DefectKind::Compact ? cell_radius(n) <= 2.0 + eps : std::abs(cell_y(n)) <= 2.0 + eps)
        cand.push_back(n);
    }
  const Mat6 block = Mat6::Constant(cplx(amplitude, 0.0));
  for (const auto& n : cand)
    for (const auto& m : cand) {
      if (cell_radius(n - m) > 1.0 + eps) continue;
      if (!near(n) && !near(m)) continue;
      W.entries[{n, m}] = block;
    }
  W.M_W = longitudinal_sup_sum(W);
  return W;
}

double longitudinal_sup_sum(const PerturbationW& W) {
  std::map<int, double> row;
  for (const auto& [nm, B] : W.entries) {
    const Eigen::JacobiSVD<MatX> svd{MatX(B)};
    row[nm.first.n1] += svd.singularValues()(0);
  }
  double best = 0.0;
  for (const auto& [n1, s] : row) best = std::max(best, s);
  return best;
}

double reflection_defect(const PerturbationW& W) {
  const SymmetryOp F = reflection_op();
  double worst = 0.0;
  for (const auto& [nm, B] : W.entries)
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        const SiteIndex x = F.apply({nm.first, i + 1});
        const SiteIndex y = F.apply({nm.second, j + 1});
        auto it = W.entries.find({x.cell, y.cell});
        const cplx mapped = it == W.entries.end() ? cplx(0.0) : it->second(x.sub - 1, y.sub - 1);
        worst = std::max(worst, std::abs(mapped - B(i, j)));
      }
  return worst;
}

PeriodicStrip restrict_periodize(const InterfaceKernel& ik, const PerturbationW& W, int L, int R) {
  if (std::max({ik.right.range1(), ik.left.range1(), ik.seam.range1()}) > 1)
    throw ModelError("periodic strips need kernels of range 1 along l1");
  PeriodicStrip p;
  p.L = L;
  p.R = R;
  p.ik = ik;
  const int D = 6 * L;
  for (const auto& [nm, B] : W.entries) {
    const auto& [n, m] = nm;
    if (n.n1 < -R || n.n1 >= R || m.n1 < -R || m.n1 >= R)
      throw ModelError("perturbation reaches outside the strip window; increase R or truncate the defect");
    const double y = cell_y(n);
    if (y < -0.5 * L || y >= 0.5 * L) continue;
    auto [it, fresh] = p.wblocks.try_emplace({n.n1, m.n1}, MatX::Zero(D, D));
    it->second.block(6 * pmod(n.n2, L), 6 * pmod(m.n2, L), 6, 6) += B;
  }
  return p;
}

std::vector<VecX> periodize_field(const std::map<CellIndex, Vec6>& u, int L, int R) {
  std::vector<VecX> out(2 * R, VecX::Zero(6 * L));
  for (const auto& [n, v] : u) {
    if (n.n1 < -R || n.n1 >= R) continue;
    out[n.n1 + R].segment(6 * pmod(n.n2, L), 6) += v;
  }
  return out;
}

std::map<CellIndex, Vec6> restrict_field(const std::vector<VecX>& slices, int L, int R) {
  std::map<CellIndex, Vec6> out;
  for (int n1 = -R; n1 < R; ++n1) {
    const int first = static_cast<int>(std::ceil(-0.5 * L - 0.5 * n1));
    for (int c = 0; c < L; ++c) {
      const int n2 = first + pmod(c - first, L);
      out[{n1, n2}] = slices[n1 + R].segment(6 * c, 6);
    }
  }
  return out;
}

MatX slice_block(const PeriodicStrip& p, int n1, int m1) {
  const int L = p.L;
  MatX B = MatX::Zero(6 * L, 6 * L);
  for (const auto& [e, K] : region_kernel(p.ik, n1, m1).blocks) {
    if (e.n1 != m1 - n1) continue;
    for (int c = 0; c < L; ++c) B.block(6 * c, 6 * pmod(c + e.n2, L), 6, 6) += K;
  }
  return B;
}

MatX slice_reflection(int L, int n1) {
  const auto sigma = reflection_op().perm;
  MatX F = MatX::Zero(6 * L, 6 * L);
  for (int c = 0; c < L; ++c)
    for (int i = 0; i < 6; ++i) F(6 * c + i, 6 * pmod(-n1 - c, L) + sigma[i]) = 1.0;
  return F;
}

MatX parity_basis(int L, int n1, int parity) {
  if (parity != 1 && parity != -1) throw std::invalid_argument("parity must be +1 or -1");
  const auto sigma = reflection_op().perm;
  MatX Q = MatX::Zero(6 * L, 3 * L);
  int col = 0;
  const double r = 1.0 / std::sqrt(2.0);
  for (int c = 0; c < L; ++c)
    for (int i = 0; i < 6; ++i) {
      const int x = 6 * c + i;
      const int y = 6 * pmod(-n1 - c, L) + sigma[i];
      if (y <= x) continue;
      Q(x, col) = r;
      Q(y, col) = parity * r;
      ++col;
    }
  return Q;
}

MatX lead_self_energy_right(const StripSymbol& s, double lambda) {
  const SurfaceGreen g = surface_green(s, lambda);
  return -(s.up * g.right * s.down);
}

MatX lead_self_energy_left(const StripSymbol& s, double lambda) {
  const SurfaceGreen g = surface_green(s, lambda);
  return -(s.down * g.left * s.up);
}

BlockTridiagonal terminated_interface(const InterfaceStrip& s, int R, double lambda) {
  BlockTridiagonal H = interface_block_matrix(s, R);
  H.diag.back() += lead_self_energy_right(s.right, lambda);
  H.diag.front() += lead_self_energy_left(s.left, lambda);
  return H;
}

BlockTridiagonal terminated_periodic(const PeriodicStrip& p, int parity, double lambda, bool with_W) {
  return PeriodicAssembler(p, parity, with_W).at(lambda);
}

namespace {

// Orthonormal basis (2D x D) of the transfer-matrix solutions (u(0), u(1)) that decay toward side.
MatX decaying_subspace(const StripSymbol& s, double lambda, int side) {
  const int D = s.dim();
  const Eigen::PartialPivLU<MatX> up(s.up);
  MatX T = MatX::Zero(2 * D, 2 * D);
  T.topRightCorner(D, D) = MatX::Identity(D, D);
  T.bottomLeftCorner(D, D) = -up.solve(s.down);
  T.bottomRightCorner(D, D) = -up.solve(s.diag - lambda * MatX::Identity(D, D));
  const Eigen::ComplexEigenSolver<MatX> es(T);
  MatX basis(2 * D, D);
  int k = 0;
  for (Eigen::Index j = 0; j < 2 * D; ++j) {
    const double r = std::abs(es.eigenvalues()(j));
    if ((side > 0 && r < 1.0) || (side < 0 && r > 1.0)) {
      if (k == D) throw NumericError(Failure::EnergyInSpectrum, "transfer spectrum is not split by the unit circle");
      basis.col(k++) = es.eigenvectors().col(j);
    }
  }
  if (k != D) throw NumericError(Failure::EnergyInSpectrum, "transfer spectrum is not split by the unit circle");
  const Eigen::HouseholderQR<MatX> qr(basis);
  return qr.householderQ() * MatX::Identity(2 * D, D);
}

}  // namespace

std::vector<LeadState> lead_bound_states(const StripSymbol& s, int side, double kpar, int first, const Interval& gap,
                                         int grid) {
  const int D = s.dim();
  if (Eigen::JacobiSVD<MatX>(s.up).singularValues().minCoeff() < 1e-10)
    throw NumericError(Failure::SingularHopping, "strip hopping block is singular");
  // Right lead: Dirichlet at the block before `first`, so (u(first - 1), u(first)) has u(first - 1) = 0.
  // Left lead: u(first + 1) = 0 for solutions decaying to the left.
  auto dirichlet_block = [&](double x) {
    const MatX Q = decaying_subspace(s, x, side);
    return side > 0 ? MatX(Q.topRows(D)) : MatX(Q.bottomRows(D));
  };
  auto f = [&](double x) { return Eigen::JacobiSVD<MatX>(dirichlet_block(x)).singularValues()(D - 1); };
  std::vector<double> xs(grid), fs(grid);
  for (int i = 0; i < grid; ++i) {
    xs[i] = gap.lo + (gap.hi - gap.lo) * (i + 0.5) / grid;
    fs[i] = f(xs[i]);
  }
  const bool symmetric = std::abs(std::sin(kpar)) < 1e-12;
  std::vector<LeadState> out;
  for (int i = 0; i < grid; ++i) {
    const double left = i > 0 ? fs[i - 1] : f(gap.lo + 1e-12);
    const double right = i + 1 < grid ? fs[i + 1] : f(gap.hi - 1e-12);
    if (!(fs[i] <= left && fs[i] < right)) continue;
    const double a = i > 0 ? xs[i - 1] : gap.lo + 1e-12;
    const double b = i + 1 < grid ? xs[i + 1] : gap.hi - 1e-12;
    const auto [xm, fm] = boost::math::tools::brent_find_minima(f, a, b, 52);
    if (fm > 1e-7) continue;
    const MatX Q = decaying_subspace(s, xm, side);
    const MatX Db = side > 0 ? MatX(Q.topRows(D)) : MatX(Q.bottomRows(D));
    const Eigen::JacobiSVD<MatX> svd(Db, Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    int nullity = 0;
    for (int j = D - 1; j >= 0 && sv(j) <= std::max(1e-6, 1e3 * fm); --j) ++nullity;
    for (int j = 0; j < nullity; ++j) {
      int parity = 0;
      if (symmetric) {
        const VecX c = svd.matrixV().col(D - 1 - j);
        // The boundary block of the bound state: u(first) for the right lead, u(first) for the left lead.
        const VecX u = side > 0 ? VecX(Q.bottomRows(D) * c) : VecX(Q.topRows(D) * c);
        const MatX F = blocked_reflection(s.cells_per_block, kpar, first);
        parity = (u.dot(F * u)).real() >= 0.0 ? 1 : -1;
      }
      out.push_back({xm, parity});
    }
  }
  return out;
}

std::vector<EigenCluster> nonlinear_eigenvalues_in(const std::function<BlockTridiagonal(double)>& Heff, double lo,
                                                   double hi, const std::vector<double>& lead_poles, double abs_tol) {
  std::vector<double> poles = lead_poles;
  std::sort(poles.begin(), poles.end());
  auto count = [&](double x) {
    const auto below = std::lower_bound(poles.begin(), poles.end(), x) - poles.begin();
    return count_below(Heff(x), x) + static_cast<int>(below);
  };
  std::vector<EigenCluster> out;
  std::function<void(double, int, double, int)> split = [&](double a, int ca, double b, int cb) {
    if (cb == ca) return;
    if (b - a <= abs_tol) {
      out.push_back({0.5 * (a + b), cb - ca});
      return;
    }
    const double m = 0.5 * (a + b);
    const int cm = count(m);
    split(a, ca, m, cm);
    split(m, cm, b, cb);
  };
  split(lo, count(lo), hi, count(hi));
  return out;
}

SectorResult strip_sector_eigen(const PeriodicStrip& p, int parity, const Interval& gap, const SectorOptions& opt) {
  for (const auto& [nm, B] : p.wblocks)
    if (opt.with_W && (std::min(nm.first, nm.second) < -opt.R || std::max(nm.first, nm.second) >= opt.R))
      throw ModelError("perturbation reaches the exact leads; increase the window half-width");
  SectorResult res;
  res.L = p.L;
  res.parity = parity;
  auto solve = [&](int R) {
    PeriodicStrip q = p;
    q.R = R;
    PeriodicAssembler as(q, parity, opt.with_W);
    return expand(nonlinear_eigenvalues_in([&](double x) { return as.at(x); }, gap.lo, gap.hi, as.lead_poles(gap)));
  };
  res.in_gap = solve(opt.R);
  const int sector_dim = parity == 0 ? 6 * p.L : 3 * p.L;
  if (opt.with_W && static_cast<double>(res.in_gap.size()) > std::max(4.0, opt.collapse_fraction * sector_dim))
    throw NumericError(Failure::GapCollapse, std::to_string(res.in_gap.size()) + " levels in the interval at L = " +
                                                 std::to_string(p.L));
  if (opt.check_transverse) {
    const std::vector<double> wide = solve(2 * opt.R);
    if (wide.size() != res.in_gap.size()) {
      res.transverse_shift = std::numeric_limits<double>::infinity();
    } else {
      for (std::size_t k = 0; k < wide.size(); ++k)
        res.transverse_shift = std::max(res.transverse_shift, std::abs(wide[k] - res.in_gap[k]));
    }
  }
  res.unique = res.in_gap.size() == 1;
  if (!res.unique || parity == 0) return res;

  PeriodicStrip q = p;
  q.R = opt.profile_R;
  PeriodicAssembler as(q, parity, opt.with_W);
  SectorMode mode;
  mode.lambda = res.in_gap.front();
  mode.parity = parity;
  const BlockTridiagonal H = as.at(mode.lambda);
  const VecX x = inverse_iteration(H, mode.lambda, 1).col(0);
  const int d = H.block_dim();
  double nrm = 0.0, defect = 0.0;
  for (int n1 = -q.R; n1 < q.R; ++n1) {
    mode.slices.push_back(as.basis(n1) * x.segment(d * (n1 + q.R), d));
    nrm += mode.slices.back().squaredNorm();
  }
  nrm = std::sqrt(nrm);
  for (int n1 = -q.R; n1 < q.R; ++n1) {
    VecX& v = mode.slices[n1 + q.R];
    v /= nrm;
    defect = std::max(defect, (slice_reflection(q.L, n1) * v - parity * v).norm());
  }
  mode.parity_defect = defect;
  res.mode = std::move(mode);
  return res;
}

NeumannCheck neumann_series_check(const PeriodicStrip& p, int parity, const Interval& gap, const SectorOptions& opt,
                                  double tol, int max_terms) {
  PeriodicStrip q = p;
  q.R = opt.R;
  const PeriodicAssembler bare(q, parity, false);
  const PeriodicAssembler full(q, parity, true);
  const std::vector<double> l0 =
      expand(nonlinear_eigenvalues_in([&](double x) { return bare.at(x); }, gap.lo, gap.hi, bare.lead_poles(gap)));
  if (l0.size() != 1) throw NumericError(Failure::GapCollapse, "unperturbed sector level is not unique");
  const std::vector<double> lw =
      expand(nonlinear_eigenvalues_in([&](double x) { return full.at(x); }, gap.lo, gap.hi, full.lead_poles(gap)));
  if (lw.size() != 1) throw NumericError(Failure::GapCollapse, "perturbed sector level is not unique");

  NeumannCheck out;
  out.lambda_unperturbed = l0.front();
  out.lambda_direct = lw.front();
  const double lam = out.lambda_unperturbed;
  const MatX H0 = bare.at(lam).dense();
  const int n = static_cast<int>(H0.rows());
  const MatX Id = MatX::Identity(n, n);
  const MatX T0 = H0 - lam * Id;
  const MatX W = full.at(lam).dense() - H0;
  constexpr double h = 1e-6;
  const MatX D0 = Id - (bare.at(lam + h).dense() - bare.at(lam - h).dense()) / (2.0 * h);

  auto null_vector = [](const MatX& T) {
    Eigen::SelfAdjointEigenSolver<MatX> es(0.5 * (T + T.adjoint()));
    Eigen::Index k = 0;
    es.eigenvalues().cwiseAbs().minCoeff(&k);
    return VecX(es.eigenvectors().col(k));
  };
  const VecX x0 = null_vector(T0);
  const VecX dx0 = D0 * x0;
  MatX B = MatX::Zero(n + 1, n + 1);
  B.topLeftCorner(n, n) = T0;
  B.topRightCorner(n, 1) = dx0;
  B.bottomLeftCorner(1, n) = dx0.adjoint();
  const Eigen::PartialPivLU<MatX> lu(B);

  VecX y = VecX::Zero(n);
  double delta = 0.0;
  for (int k = 0; k < max_terms; ++k) {
    const VecX x = x0 + y;
    delta = (x0.dot(W * x) / x0.dot(D0 * x)).real();
    VecX rhs = VecX::Zero(n + 1);
    rhs.head(n) = -(W * x - delta * (D0 * x));
    const VecX next = lu.solve(rhs).head(n);
    const double step = (next - y).norm();
    y = next;
    out.terms = k + 1;
    if (step < tol) {
      out.converged = true;
      break;
    }
  }
  out.lambda_series = lam + delta;
  const VecX xs = (x0 + y).normalized();
  const VecX xd = null_vector(full.at(out.lambda_direct).dense() - out.lambda_direct * Id);
  out.vector_overlap = std::abs(xs.dot(xd));
  return out;
}

double isolation_distance(double lambda_zig, const Interval& gap) {
  return std::max(0.0, std::min(lambda_zig - gap.lo, gap.hi - lambda_zig));
}

BoundCheck check_bound(const PerturbationW& W, const std::vector<double>& lambda_zig, const Interval& gap, double c_W) {
  BoundCheck b;
  b.M_W = W.M_W;
  b.c_W = c_W;
  b.d_min = std::numeric_limits<double>::infinity();
  for (double l : lambda_zig) b.d_min = std::min(b.d_min, isolation_distance(l, gap));
  b.satisfied = !lambda_zig.empty() && b.M_W <= c_W * b.d_min;
  return b;
}

PersistenceReport farfield_persistence(const SectorMode& perturbed, const SectorMode& reference, int L, int R,
                                       double exclusion_radius) {
  if (perturbed.slices.size() != reference.slices.size() || perturbed.slices.size() != static_cast<std::size_t>(2 * R))
    throw std::invalid_argument("modes must share the slice window");
  const auto uw = restrict_field(perturbed.slices, L, R);
  const auto u0 = restrict_field(reference.slices, L, R);
  cplx z = 0.0;
  for (const auto& [n, v] : u0) z += v.dot(uw.at(n));
  const cplx phase = std::abs(z) > 0.0 ? std::conj(z) / std::abs(z) : cplx(1.0);
  PersistenceReport rep;
  rep.exclusion_radius = exclusion_radius;
  cplx out_dot = 0.0;
  double out_w = 0.0, out_0 = 0.0, diff = 0.0;
  std::vector<double> bands(static_cast<std::size_t>(L / 4 + 1), 0.0);
  for (const auto& [n, v0] : u0) {
    const Vec6 vw = uw.at(n) * phase;
    const double dn = (vw - v0).squaredNorm();
    diff += dn;
    const auto k = static_cast<std::size_t>(std::abs(cell_y(n)) / 2.0);
    if (k < bands.size()) bands[k] += dn;
    if (cell_radius(n) <= exclusion_radius) continue;
    out_dot += v0.dot(vw);
    out_w += vw.squaredNorm();
    out_0 += v0.squaredNorm();
  }
  rep.outside_overlap = std::abs(out_dot) / std::sqrt(out_w * out_0);
  rep.difference_norm = std::sqrt(diff);
  for (double b : bands) rep.window_profile.push_back(std::sqrt(b));
  return rep;
}

std::vector<double> interface_levels(const InterfaceKernel& ik, double kpar, const Interval& gap, int R) {
  const InterfaceStrip s = interface_strip(ik, kpar);
  std::vector<double> poles;
  for (const LeadState& b : lead_bound_states(s.right, +1, kpar, R, gap)) poles.push_back(b.value);
  for (const LeadState& b : lead_bound_states(s.left, -1, kpar, -R - 1, gap)) poles.push_back(b.value);
  return expand(
      nonlinear_eigenvalues_in([&](double x) { return terminated_interface(s, R, x); }, gap.lo, gap.hi, poles));
}

BandCurve interface_band_curve(const InterfaceKernel& ik, const std::vector<double>& kpar, const Interval& gap, int R) {
  BandCurve bc;
  bc.samples.resize(kpar.size());
  parallel_for(kpar.size(), [&](std::size_t i) { bc.samples[i] = {kpar[i], interface_levels(ik, kpar[i], gap, R)}; });
  bc.empty_at_pi = interface_levels(ik, pi, gap, R).empty();

  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double width = gap.hi - gap.lo;
  struct Active {
    std::size_t branch;
    double last;
    double step;  // NaN until the branch has been matched once
  };
  std::vector<Active> active;
  for (std::size_t i = 0; i < bc.samples.size(); ++i) {
    const auto& vals = bc.samples[i].values;
    const double dk = i > 0 ? std::abs(kpar[i] - kpar[i - 1]) : 0.0;
    std::vector<bool> used(vals.size(), false);
    std::vector<Active> next;
    // Greedy nearest matching between predicted branch values and new samples.
    std::vector<bool> matched(active.size(), false);
    for (std::size_t round = 0; round < std::min(active.size(), vals.size()); ++round) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t ba = 0, bv = 0;
      for (std::size_t a = 0; a < active.size(); ++a) {
        if (matched[a]) continue;
        for (std::size_t v = 0; v < vals.size(); ++v) {
          if (used[v]) continue;
          const double pred = active[a].last + (std::isnan(active[a].step) ? 0.0 : active[a].step);
          const double dist = std::abs(vals[v] - pred);
          if (dist < best) best = dist, ba = a, bv = v;
        }
      }
      matched[ba] = true;
      used[bv] = true;
      const double step = vals[bv] - active[ba].last;
      if (dk > 0.0) bc.max_jump_rate = std::max(bc.max_jump_rate, std::abs(step) / dk);
      bc.branches[active[ba].branch][i] = vals[bv];
      next.push_back({active[ba].branch, vals[bv], step});
    }
    for (std::size_t a = 0; a < active.size(); ++a) {
      if (matched[a] || std::isnan(active[a].step)) continue;
      const double edge = std::min(active[a].last - gap.lo, gap.hi - active[a].last);
      if (edge > std::max(3.0 * std::abs(active[a].step), 0.05 * width))
        throw NumericError(Failure::BranchLost, "branch at " + std::to_string(active[a].last) +
                                                    " vanished inside the interval near kpar = " +
                                                    std::to_string(kpar[i]));
    }
    for (std::size_t v = 0; v < vals.size(); ++v) {
      if (used[v]) continue;
      bc.branches.emplace_back(bc.samples.size(), nan);
      bc.branches.back()[i] = vals[v];
      next.push_back({bc.branches.size() - 1, vals[v], nan});
    }
    active = std::move(next);
  }
  return bc;
}

double sampling_identity_defect(const InterfaceKernel& ik, int L, const Interval& gap, int R) {
  const PeriodicStrip p = restrict_periodize(ik, PerturbationW{}, L, R);
  SectorOptions opt;
  opt.R = R;
  opt.with_W = false;
  std::vector<double> strip = strip_sector_eigen(p, 1, gap, opt).in_gap;
  const std::vector<double> odd = strip_sector_eigen(p, -1, gap, opt).in_gap;
  strip.insert(strip.end(), odd.begin(), odd.end());
  std::vector<std::vector<double>> per(static_cast<std::size_t>(L));
  parallel_for(per.size(), [&](std::size_t j) { per[j] = interface_levels(ik, p.kpar(static_cast<int>(j)), gap, R); });
  std::vector<double> curve;
  for (const auto& v : per) curve.insert(curve.end(), v.begin(), v.end());
  std::sort(strip.begin(), strip.end());
  std::sort(curve.begin(), curve.end());
  if (strip.size() != curve.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t k = 0; k < strip.size(); ++k) worst = std::max(worst, std::abs(strip[k] - curve[k]));
  return worst;
}

}  // namespace hexcone
