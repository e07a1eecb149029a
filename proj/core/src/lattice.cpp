#include "hexcone/lattice.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <deque>

namespace hexcone {

const char* failure_name(Failure f) {
  switch (f) {
    case Failure::NoFourFoldDegeneracy: return "NoFourFoldDegeneracy";
    case Failure::AlignmentFailure: return "AlignmentFailure";
    case Failure::VanishingSlope: return "VanishingSlope";
    case Failure::NearZeroCoupling: return "NearZeroCoupling";
    case Failure::GridTooCoarse: return "GridTooCoarse";
    case Failure::ContinuationAmbiguity: return "ContinuationAmbiguity";
    case Failure::EnergyInSpectrum: return "EnergyInSpectrum";
    case Failure::GaugeMissing: return "GaugeMissing";
    case Failure::EnergyOutsideGap: return "EnergyOutsideGap";
    case Failure::NoCharacteristicValue: return "NoCharacteristicValue";
    case Failure::DegenerateBoundaryData: return "DegenerateBoundaryData";
    case Failure::GapCollapse: return "GapCollapse";
    case Failure::BranchLost: return "BranchLost";
    case Failure::SingularHopping: return "SingularHopping";
    case Failure::NoCommonGap: return "NoCommonGap";
  }
  return "UnknownFailure";
}

Eigen::Vector2d ell1() { return {sqrt3 / 2.0, 0.5}; }
Eigen::Vector2d ell2() { return {0.0, 1.0}; }

Eigen::Matrix2d lattice_basis() {
  Eigen::Matrix2d L;
  L.col(0) = ell1();
  L.col(1) = ell2();
  return L;
}

Eigen::Vector2d sublattice_offset(int sub) {
  const Eigen::Vector2d a = ell1() / 3.0, b = ell2() / 3.0;
  switch (sub) {
    case 1: return b;
    case 2: return b - a;
    case 3: return a;
    case 4: return -a;
    case 5: return a - b;
    case 6: return -b;
    default: throw std::out_of_range("sublattice index must be in 1..6");
  }
}

Eigen::Vector2d real_position(const SiteIndex& s) {
  return s.cell.n1 * ell1() + s.cell.n2 * ell2() + sublattice_offset(s.sub);
}

DualMomentum DualMomentum::canonical() const {
  auto wrap = [](double k) { return k - std::floor(k + 0.5); };
  return {wrap(k1), wrap(k2)};
}

SiteIndex SymmetryOp::apply(const SiteIndex& s) const {
  const int i = s.sub - 1;
  const Eigen::Vector2i n(s.cell.n1, s.cell.n2);
  const Eigen::Vector2i m = cells * n;
  return {{m(0) + shift[i].n1, m(1) + shift[i].n2}, perm[i] + 1};
}

Eigen::Matrix2d SymmetryOp::ext() const {
  const Eigen::Matrix2d L = lattice_basis();
  return L * cells.cast<double>().inverse() * L.inverse();
}

Mat6 SymmetryOp::on_gamma() const {
  Mat6 P = Mat6::Zero();
  for (int i = 0; i < 6; ++i) P(i, perm[i]) = 1.0;
  return P;
}

Mat6 SymmetryOp::bloch_action(double t1, double t2, double& out1, double& out2) const {
  const Eigen::Vector2d th(t1, t2);
  const Eigen::Vector2d out = cells.cast<double>().transpose() * th;
  out1 = out(0);
  out2 = out(1);
  Mat6 D = Mat6::Zero();
  for (int i = 0; i < 6; ++i) {
    const double ph = t1 * shift[i].n1 + t2 * shift[i].n2;
    D(i, perm[i]) = std::polar(1.0, ph);
  }
  return D;
}

SymmetryOp SymmetryOp::then(const SymmetryOp& o) const {
  SymmetryOp r;
  r.name = name + "*" + o.name;
  r.cells = o.cells * cells;
  for (int i = 0; i < 6; ++i) {
    const Eigen::Vector2i s(shift[i].n1, shift[i].n2);
    const Eigen::Vector2i t = o.cells * s;
    const CellIndex so = o.shift[perm[i]];
    r.shift[i] = {t(0) + so.n1, t(1) + so.n2};
    r.perm[i] = o.perm[perm[i]];
  }
  return r;
}

bool SymmetryOp::is_pure_translation() const {
  if (cells != Eigen::Matrix2i::Identity()) return false;
  for (int i = 0; i < 6; ++i)
    if (perm[i] != i || shift[i] != shift[0]) return false;
  return true;
}

SymmetryOp identity_op() {
  SymmetryOp op;
  op.name = "E";
  return op;
}

SymmetryOp rotation_op() {
  SymmetryOp op;
  op.name = "R6";
  op.cells << 1, 1, -1, 0;
  op.perm = {2, 0, 4, 1, 5, 3};
  return op;
}

SymmetryOp reflection_op() {
  SymmetryOp op;
  op.name = "Fx";
  op.cells << 1, 0, -1, -1;
  op.perm = {5, 3, 4, 1, 2, 0};
  return op;
}

SymmetryOp supersymmetry_op() {
  SymmetryOp op;
  op.name = "T";
  op.perm = {4, 5, 1, 0, 3, 2};
  op.shift = {CellIndex{-1, 1}, CellIndex{-1, 1}, CellIndex{0, 0},
              CellIndex{-1, 0}, CellIndex{0, 0}, CellIndex{-1, 0}};
  return op;
}

SymmetryOp reflection_y_op() {
  const SymmetryOp r = rotation_op();
  SymmetryOp fy = r.then(r).then(r).then(reflection_op());
  fy.name = "Fy";
  return fy;
}

int find_element(const std::vector<GroupElement>& group, const Mat6& m, double tol) {
  for (std::size_t k = 0; k < group.size(); ++k)
    if ((group[k].gamma - m).cwiseAbs().maxCoeff() <= tol) return static_cast<int>(k);
  return -1;
}

std::vector<GroupElement> generate_group(bool include_supersymmetry) {
  std::vector<SymmetryOp> gens{rotation_op(), reflection_op()};
  if (include_supersymmetry) gens.push_back(supersymmetry_op());

  std::vector<GroupElement> out;
  out.push_back({identity_op(), {}, identity_op().on_gamma()});
  std::deque<std::size_t> queue{0};
  while (!queue.empty()) {
    const std::size_t cur = queue.front();
    queue.pop_front();
    for (std::size_t k = 0; k < gens.size(); ++k) {
      SymmetryOp next = out[cur].op.then(gens[k]);
      const Mat6 g = next.on_gamma();
      if (find_element(out, g) >= 0) continue;
      std::vector<int> word = out[cur].word;
      word.push_back(static_cast<int>(k));
      out.push_back({std::move(next), std::move(word), g});
      queue.push_back(out.size() - 1);
    }
  }
  return out;
}

MatX Representation::evaluate(const std::vector<int>& word) const {
  MatX m = MatX::Identity(dim(), dim());
  for (int k : word) m = m * generators.at(k);
  return m;
}

cplx tau() { return std::polar(1.0, pi / 3.0); }

namespace {

MatX diag2(cplx a, cplx b) {
  MatX m = MatX::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

MatX swap2() {
  MatX m = MatX::Zero(2, 2);
  m(0, 1) = m(1, 0) = 1.0;
  return m;
}

MatX scalar1(double v) { return MatX::Constant(1, 1, v); }

}  // namespace

Representation rho1() {
  const cplx t = tau();
  return {"rho1", {diag2(t, std::conj(t)), swap2()}};
}

Representation rho2() {
  const cplx t2 = tau() * tau();
  return {"rho2", {diag2(t2, std::conj(t2)), swap2()}};
}

Representation rho_tilde() {
  const cplx t = tau();
  MatX R = MatX::Zero(4, 4);
  R(0, 0) = t;
  R(1, 1) = std::conj(t);
  R(2, 2) = t * t;
  R(3, 3) = std::conj(t * t);
  MatX F = MatX::Zero(4, 4);
  F(0, 1) = F(1, 0) = F(2, 3) = F(3, 2) = 1.0;
  MatX T = MatX::Zero(4, 4);
  const cplx s = I1 * (sqrt3 / 2.0);
  for (int k = 0; k < 4; ++k) T(k, k) = -0.5;
  T(0, 3) = T(3, 0) = T(1, 2) = T(2, 1) = s;
  return {"rho_tilde", {R, F, T}};
}

std::vector<Representation> c6v_irreps() {
  return {
      {"A1", {scalar1(1), scalar1(1)}},
      {"A2", {scalar1(1), scalar1(-1)}},
      {"B1", {scalar1(-1), scalar1(1)}},
      {"B2", {scalar1(-1), scalar1(-1)}},
      rho1(),
      rho2(),
  };
}

double homomorphism_defect(const std::vector<GroupElement>& group, const Representation& rep) {
  double worst = 0.0;
  for (const auto& g : group) {
    const MatX rg = rep.evaluate(g.word);
    for (const auto& h : group) {
      const int k = find_element(group, g.gamma * h.gamma);
      if (k < 0) return std::numeric_limits<double>::infinity();
      const MatX diff = rep.evaluate(group[k].word) - rg * rep.evaluate(h.word);
      worst = std::max(worst, diff.cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

double relation_defect(const Representation& rep) {
  const int d = rep.dim();
  const MatX Id = MatX::Identity(d, d);
  const MatX& R = rep.generators.at(0);
  const MatX& F = rep.generators.at(1);
  auto pw = [&](const MatX& m, int p) {
    MatX r = Id;
    for (int k = 0; k < p; ++k) r = r * m;
    return r;
  };
  const MatX Rinv = pw(R, 5);
  double w = 0.0;
  w = std::max(w, (pw(R, 6) - Id).cwiseAbs().maxCoeff());
  w = std::max(w, (F * F - Id).cwiseAbs().maxCoeff());
  w = std::max(w, (R * F - F * Rinv).cwiseAbs().maxCoeff());
  if (rep.generators.size() > 2) {
    const MatX& T = rep.generators[2];
    w = std::max(w, (pw(T, 3) - Id).cwiseAbs().maxCoeff());
    w = std::max(w, (F * T - T * F).cwiseAbs().maxCoeff());
    w = std::max(w, (R * T - pw(T, 2) * R).cwiseAbs().maxCoeff());
  }
  return w;
}

Mat6 isotypic_projector(const std::vector<GroupElement>& group, const Representation& rep) {
  Mat6 P = Mat6::Zero();
  for (const auto& g : group) P += std::conj(rep.evaluate(g.word).trace()) * g.gamma;
  return P * (static_cast<double>(rep.dim()) / static_cast<double>(group.size()));
}

Eigen::Vector4d dispersion_det_roots(const Mat4& H1, const Mat4& H2, double k1, double k2) {
  const Mat4 H = k1 * H1 + k2 * H2;
  Eigen::SelfAdjointEigenSolver<Mat4> es(0.5 * (H + H.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace hexcone
