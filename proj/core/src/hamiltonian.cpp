#include "hexcone/hamiltonian.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hexcone {

Mat6 HoppingKernel::at(const CellIndex& e) const {
  auto it = blocks.find(e);
  return it == blocks.end() ? Mat6::Zero() : it->second;
}

int HoppingKernel::range1() const {
  int r = 0;
  for (const auto& [e, B] : blocks)
    if (B.cwiseAbs().maxCoeff() > 0.0) r = std::max(r, std::abs(e.n1));
  return r;
}

double HoppingKernel::hermiticity_defect() const {
  double w = 0.0;
  for (const auto& [e, B] : blocks) {
    const Mat6 partner = at({-e.n1, -e.n2});
    w = std::max(w, (B - partner.adjoint()).cwiseAbs().maxCoeff());
  }
  return w;
}

HoppingKernel& HoppingKernel::add(const HoppingKernel& other, double scale) {
  for (const auto& [e, B] : other.blocks) {
    auto it = blocks.find(e);
    if (it == blocks.end())
      blocks.emplace(e, scale * B);
    else
      it->second += scale * B;
  }
  return *this;
}

void HoppingKernel::prune(double tol) {
  for (auto it = blocks.begin(); it != blocks.end();) {
    if (it->second.cwiseAbs().maxCoeff() <= tol)
      it = blocks.erase(it);
    else
      ++it;
  }
}

HoppingKernel operator+(HoppingKernel a, const HoppingKernel& b) {
  a.add(b);
  return a;
}

HoppingKernel operator*(double s, HoppingKernel a) {
  for (auto& [e, B] : a.blocks) B *= s;
  return a;
}

HoppingKernel kernel_from_rule(
    const std::function<double(double dist, const CellIndex& e, int i, int j)>& rule) {
  HoppingKernel K;
  for (int e1 = -2; e1 <= 2; ++e1) {
    for (int e2 = -3; e2 <= 3; ++e2) {
      const CellIndex e{e1, e2};
      Mat6 B = Mat6::Zero();
      for (int i = 1; i <= 6; ++i) {
        for (int j = 1; j <= 6; ++j) {
          const double dist = (real_position({{0, 0}, i}) - real_position({e, j})).norm();
          B(i - 1, j - 1) = rule(dist, e, i, j);
        }
      }
      if (B.cwiseAbs().maxCoeff() > 0.0) K.blocks.emplace(e, B);
    }
  }
  return K;
}

namespace {
constexpr double geo_tol = 1e-9;
}

HoppingKernel build_toy_bulk() {
  return kernel_from_rule([](double r, const CellIndex&, int, int) {
    return std::abs(r - 1.0 / 3.0) < geo_tol ? 1.0 : 0.0;
  });
}

HoppingKernel build_extended_bulk() {
  return kernel_from_rule([](double r, const CellIndex&, int, int) {
    return (r > 1.0 / 3.0 - geo_tol && r < 1.0 + geo_tol) ? (1.0 / 3.0) / r : 0.0;
  });
}

HoppingKernel build_blended_bulk(double t) {
  HoppingKernel K = build_toy_bulk();
  K.add(build_extended_bulk(), t);
  K.add(build_toy_bulk(), -t);
  K.prune();
  return K;
}

HoppingKernel build_Hper() {
  return kernel_from_rule([](double r, const CellIndex& e, int, int) {
    if (std::abs(r - 1.0 / 3.0) >= geo_tol) return 0.0;
    return (e.n1 == 0 && e.n2 == 0) ? 1.0 : -1.0;
  });
}

ModelKind parse_model(const std::string& name) {
  if (name == "toy") return ModelKind::Toy;
  if (name == "extended") return ModelKind::Extended;
  if (name == "blended") return ModelKind::Blended;
  throw ModelError("unknown model '" + name + "' (expected toy, extended or blended)");
}

std::string model_name(ModelKind m) {
  switch (m) {
    case ModelKind::Toy: return "toy";
    case ModelKind::Extended: return "extended";
    case ModelKind::Blended: return "blended";
  }
  return "unknown";
}

HoppingKernel build_bulk(ModelKind m, double blend) {
  switch (m) {
    case ModelKind::Toy: return build_toy_bulk();
    case ModelKind::Extended: return build_extended_bulk();
    case ModelKind::Blended: return build_blended_bulk(blend);
  }
  throw ModelError("unknown model");
}

HoppingKernel perturbed(const HoppingKernel& Hb, const HoppingKernel& Hper, double delta) {
  HoppingKernel K = Hb;
  K.add(Hper, delta);
  return K;
}

Mat6 bloch_matrix(const HoppingKernel& K, double t1, double t2) {
  Mat6 H = Mat6::Zero();
  for (const auto& [e, B] : K.blocks) H += std::polar(1.0, t1 * e.n1 + t2 * e.n2) * B;
  return H;
}

Mat6 bloch_matrix(const HoppingKernel& K, const DualMomentum& k) {
  return bloch_matrix(K, k.theta1(), k.theta2());
}

Mat6 bloch_derivative(const HoppingKernel& K, double t1, double t2, int j) {
  Mat6 H = Mat6::Zero();
  for (const auto& [e, B] : K.blocks) {
    const double ej = (j == 1) ? e.n1 : e.n2;
    if (ej == 0.0) continue;
    H += (I1 * ej) * std::polar(1.0, t1 * e.n1 + t2 * e.n2) * B;
  }
  return H;
}

double commutator_norm(const HoppingKernel& K, const SymmetryOp& g) {
  double worst = 0.0;
  for (int i = 1; i <= 6; ++i) {
    const SiteIndex x{{0, 0}, i};
    const SiteIndex gx = g.apply(x);
    double row = 0.0;
    for (int e1 = -4; e1 <= 4; ++e1) {
      for (int e2 = -6; e2 <= 6; ++e2) {
        for (int j = 1; j <= 6; ++j) {
          const SiteIndex y{{e1, e2}, j};
          const SiteIndex gy = g.apply(y);
          const cplx mapped = K.at(gy.cell - gx.cell)(gx.sub - 1, gy.sub - 1);
          const cplx orig = K.at(y.cell)(i - 1, j - 1);
          row += std::abs(mapped - orig);
        }
      }
    }
    worst = std::max(worst, row);
  }
  return worst;
}

double commutator_norm_gamma(const Mat6& H0, const SymmetryOp& g) {
  const Mat6 P = g.on_gamma();
  const Mat6 D = P * H0 * P.adjoint() - H0;
  return Eigen::JacobiSVD<Mat6>(D).singularValues()(0);
}

NonsingularReport check_nonsingular_hopping(const HoppingKernel& K, double tol) {
  const int N = std::max(1, K.range1());
  Mat6 S = Mat6::Zero();
  for (const auto& [e, B] : K.blocks)
    if (e.n1 == N) S += B;
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Mat6>(S).singularValues();
  NonsingularReport r;
  r.sigma_min = sv(5);
  r.condition = sv(5) > 0.0 ? sv(0) / sv(5) : std::numeric_limits<double>::infinity();
  r.nonsingular = sv(0) > 0.0 && sv(5) > tol * std::max(1.0, sv(0));
  return r;
}

const MatX& StripSymbol::hop(int d) const {
  switch (d) {
    case -1: return down;
    case 0: return diag;
    case 1: return up;
    default: throw std::out_of_range("strip symbol is block-tridiagonal");
  }
}

MatX StripSymbol::at(double theta) const {
  return diag + std::polar(1.0, theta) * up + std::polar(1.0, -theta) * down;
}

MatX StripSymbol::derivative(double theta) const {
  return I1 * std::polar(1.0, theta) * up - I1 * std::polar(1.0, -theta) * down;
}

StripSymbol strip_symbol(const HoppingKernel& K, double kpar, int N) {
  if (N <= 0) N = std::max(1, K.range1());
  if (K.range1() > N) throw std::invalid_argument("block size smaller than kernel range");
  // Ktilde(e1) = sum_e2 K(e1, e2) exp(i kpar e2)
  std::map<int, Mat6> kt;
  for (const auto& [e, B] : K.blocks) {
    auto [it, fresh] = kt.try_emplace(e.n1, Mat6::Zero());
    it->second += std::polar(1.0, kpar * e.n2) * B;
  }
  auto ktilde = [&](int e1) -> Mat6 {
    auto it = kt.find(e1);
    return it == kt.end() ? Mat6::Zero() : it->second;
  };
  StripSymbol s;
  s.cells_per_block = N;
  const int D = 6 * N;
  for (int d = -1; d <= 1; ++d) {
    MatX B = MatX::Zero(D, D);
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b) B.block(6 * a, 6 * b, 6, 6) = ktilde(d * N + b - a);
    if (d == -1) s.down = B;
    if (d == 0) s.diag = B;
    if (d == 1) s.up = B;
  }
  return s;
}

InterfaceKernel make_interface(const HoppingKernel& Hb, const HoppingKernel& Hper, double delta,
                               bool inverted, const std::optional<HoppingKernel>& seam_extra) {
  InterfaceKernel ik;
  ik.delta = delta;
  ik.inverted = inverted;
  ik.right = perturbed(Hb, Hper, delta);
  ik.left = perturbed(Hb, Hper, inverted ? -delta : delta);
  ik.seam = Hb;
  if (seam_extra) ik.seam.add(*seam_extra, delta);
  return ik;
}

MatX InterfaceStrip::block(int n, int m) const {
  const int d = m - n;
  if (std::abs(d) > 1) return MatX::Zero(dim(), dim());
  if (n >= 0 && m >= 0) return right.hop(d);
  if (n < 0 && m < 0) return left.hop(d);
  return seam.hop(d);
}

InterfaceStrip interface_strip(const InterfaceKernel& ik, double kpar, int N) {
  if (N <= 0) N = std::max({1, ik.right.range1(), ik.left.range1(), ik.seam.range1()});
  InterfaceStrip s;
  s.right = strip_symbol(ik.right, kpar, N);
  s.left = strip_symbol(ik.left, kpar, N);
  s.seam = strip_symbol(ik.seam, kpar, N);
  s.delta = ik.delta;
  s.inverted = ik.inverted;
  s.kpar = kpar;
  return s;
}

MatX truncate(const InterfaceStrip& s, int first, int count) {
  const int D = s.dim();
  MatX H = MatX::Zero(D * count, D * count);
  for (int a = 0; a < count; ++a) {
    for (int b = std::max(0, a - 1); b <= std::min(count - 1, a + 1); ++b)
      H.block(D * a, D * b, D, D) = s.block(first + a, first + b);
  }
  return H;
}

MatX truncate(const StripSymbol& s, int count) {
  const int D = s.dim();
  MatX H = MatX::Zero(D * count, D * count);
  for (int a = 0; a < count; ++a) {
    H.block(D * a, D * a, D, D) = s.diag;
    if (a + 1 < count) {
      H.block(D * a, D * (a + 1), D, D) = s.up;
      H.block(D * (a + 1), D * a, D, D) = s.down;
    }
  }
  return H;
}

MatX blocked_reflection(int N, double kpar, int block) {
  const Mat6 F = reflection_op().on_gamma();
  MatX out = MatX::Zero(6 * N, 6 * N);
  for (int a = 0; a < N; ++a) {
    const int n1 = block * N + a;
    out.block(6 * a, 6 * a, 6, 6) = std::polar(1.0, -kpar * n1) * F;
  }
  return out;
}

}  // namespace hexcone
