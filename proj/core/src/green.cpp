#include "hexcone/green.hpp"

#include "hexcone/parallel.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hexcone {

const MatX& GreenKernel::at(int n, int m) const {
  auto it = blocks.find(n - m);
  if (it == blocks.end()) throw std::out_of_range("offset outside the stored Green kernel");
  return it->second;
}

namespace {

template <unsigned N>
void gl_fill(std::vector<double>& x, std::vector<double>& w) {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& a = G::abscissa();
  const auto& b = G::weights();
  x.clear();
  w.clear();
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] == 0.0) {
      x.push_back(0.0);
      w.push_back(b[k]);
    } else {
      x.push_back(a[k]);
      w.push_back(b[k]);
      x.push_back(-a[k]);
      w.push_back(b[k]);
    }
  }
}

void gauss_legendre(int order, std::vector<double>& x, std::vector<double>& w) {
  switch (order) {
    case 8: gl_fill<8>(x, w); break;
    case 12: gl_fill<12>(x, w); break;
    case 16: gl_fill<16>(x, w); break;
    case 20: gl_fill<20>(x, w); break;
    case 24: gl_fill<24>(x, w); break;
    case 32: gl_fill<32>(x, w); break;
    default: throw std::invalid_argument("supported Gauss-Legendre orders: 8, 12, 16, 20, 24, 32");
  }
}

int auto_panels(const QuadratureOptions& opt, int max_offset) {
  return opt.panels > 0 ? opt.panels : 16 + max_offset;
}

// Integrates f(theta) + f(-theta) over (0, pi] and divides by 2 pi; f returns one matrix per offset.
std::map<int, MatX> paired_integral(int dim, int max_offset, int panels, int levels, int order,
                                    const std::function<void(double, std::map<int, MatX>&)>& both_sides,
                                    int& nodes) {
  std::vector<double> th, wt;
  theta_rule(panels, levels, order, th, wt);
  nodes = static_cast<int>(th.size());
  std::vector<std::map<int, MatX>> parts(th.size());
  parallel_for(th.size(), [&](std::size_t i) {
    std::map<int, MatX> local;
    for (int d = -max_offset; d <= max_offset; ++d) local.emplace(d, MatX::Zero(dim, dim));
    both_sides(th[i], local);
    for (auto& [d, B] : local) B *= wt[i] / (2.0 * pi);
    parts[i] = std::move(local);
  });
  std::map<int, MatX> out;
  for (int d = -max_offset; d <= max_offset; ++d) out.emplace(d, MatX::Zero(dim, dim));
  for (const auto& p : parts)
    for (const auto& [d, B] : p) out[d] += B;
  return out;
}

double max_diff(const std::map<int, MatX>& a, const std::map<int, MatX>& b) {
  double w = 0.0;
  for (const auto& [d, B] : a) w = std::max(w, (B - b.at(d)).cwiseAbs().maxCoeff());
  return w;
}

}  // namespace

void theta_rule(int panels, int levels, int order, std::vector<double>& theta, std::vector<double>& weight) {
  std::vector<double> x, w;
  gauss_legendre(order, x, w);
  std::vector<double> edges{0.0};
  const double first = pi / panels;
  for (int j = levels; j >= 1; --j) edges.push_back(first / std::ldexp(1.0, j));
  for (int p = 1; p <= panels; ++p) edges.push_back(pi * p / panels);
  theta.clear();
  weight.clear();
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    const double a = edges[e], b = edges[e + 1];
    for (std::size_t k = 0; k < x.size(); ++k) {
      theta.push_back(0.5 * (b - a) * x[k] + 0.5 * (b + a));
      weight.push_back(0.5 * (b - a) * w[k]);
    }
  }
}

GreenKernel gap_resolvent(const StripSymbol& s, double lambda, int max_offset, QuadratureOptions opt) {
  const int dim = s.dim();
  const int panels = auto_panels(opt, max_offset);
  std::vector<double> gaps;
  auto run = [&](int p, int lv, std::vector<double>* closest, std::vector<int>* below) {
    std::vector<double> th, wt;
    theta_rule(p, lv, opt.order, th, wt);
    std::vector<double> near(th.size(), 0.0);
    std::vector<int> count(th.size(), 0);
    std::vector<std::map<int, MatX>> parts(th.size());
    parallel_for(th.size(), [&](std::size_t i) {
      std::map<int, MatX> local;
      double dist = std::numeric_limits<double>::infinity();
      for (double t : {th[i], -th[i]}) {
        Eigen::SelfAdjointEigenSolver<MatX> es(s.at(t));
        const Eigen::VectorXd inv = (es.eigenvalues().array() - lambda).inverse();
        dist = std::min(dist, (es.eigenvalues().array() - lambda).abs().minCoeff());
        count[i] += static_cast<int>((es.eigenvalues().array() < lambda).count());
        const MatX R = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
        for (int d = -max_offset; d <= max_offset; ++d) {
          auto [it, fresh] = local.try_emplace(d, MatX::Zero(dim, dim));
          it->second += (wt[i] / (2.0 * pi)) * std::polar(1.0, t * d) * R;
        }
      }
      near[i] = dist;
      parts[i] = std::move(local);
    });
    if (closest) *closest = near;
    if (below) *below = count;
    std::map<int, MatX> out;
    for (int d = -max_offset; d <= max_offset; ++d) out.emplace(d, MatX::Zero(dim, dim));
    for (const auto& part : parts)
      for (const auto& [d, B] : part) out[d] += B;
    return std::make_pair(out, static_cast<int>(th.size()));
  };

  std::vector<double> closest;
  std::vector<int> below;
  auto [blocks, nodes] = run(panels, opt.levels, &closest, &below);
  if (*std::min_element(closest.begin(), closest.end()) < 1e-10)
    throw NumericError(Failure::EnergyInSpectrum, "Bloch eigenvalue within 1e-10 of lambda");
  // A band that crosses lambda changes the eigenvalue count below lambda between nodes.
  if (*std::min_element(below.begin(), below.end()) != *std::max_element(below.begin(), below.end()))
    throw NumericError(Failure::EnergyInSpectrum, "lambda lies inside a band of the strip symbol");
  GreenKernel g;
  g.lambda = lambda;
  g.max_offset = max_offset;
  g.nodes = 2 * nodes;
  g.panels = panels;
  g.levels = opt.levels;
  g.order = opt.order;
  if (opt.estimate_error) {
    auto fine = run(2 * panels, opt.levels + 1, nullptr, nullptr);
    g.error_estimate = 2.0 * max_diff(blocks, fine.first) + 1e-14;
  }
  g.blocks = std::move(blocks);
  return g;
}

GreenKernel physical_green_pv(const StripSymbol& s, const ConeGauge& gauge, int max_offset,
                              QuadratureOptions opt) {
  const int dim = s.dim();
  if (dim != 6 || gauge.alpha_abs <= 0.0)
    throw NumericError(Failure::GaugeMissing, "cone gauge not fixed for this strip");
  const MatX H0 = s.at(0.0);
  const MatX V = gauge.v;
  if ((V.adjoint() * V - MatX::Identity(4, 4)).cwiseAbs().maxCoeff() > 1e-8 ||
      (H0 * V - gauge.lambda_star * V).cwiseAbs().maxCoeff() > 1e-8)
    throw NumericError(Failure::GaugeMissing, "v-basis is not an orthonormal cone eigenbasis");

  MatX S = MatX::Zero(dim, dim);
  for (int k = 0; k < 4; ++k) S += V.col(k) * V.col(k).adjoint() / gauge.slopes(k);
  const double lambda = gauge.lambda_star;

  auto integrand = [&](double t, std::map<int, MatX>& out) {
    for (double side : {1.0, -1.0}) {
      const double th = side * t;
      const MatX R = (s.at(th) - lambda * MatX::Identity(dim, dim)).inverse();
      for (auto& [d, B] : out) B += std::polar(1.0, th * d) * R - S / th;
    }
  };
  const int panels = auto_panels(opt, max_offset);
  GreenKernel g;
  int nodes = 0;
  g.blocks = paired_integral(dim, max_offset, panels, opt.levels, opt.order, integrand, nodes);
  g.lambda = lambda;
  g.max_offset = max_offset;
  g.nodes = 2 * nodes;
  g.panels = panels;
  g.levels = opt.levels;
  g.order = opt.order;
  if (opt.estimate_error) {
    int n2 = 0;
    const auto fine = paired_integral(dim, max_offset, 2 * panels, opt.levels, opt.order, integrand, n2);
    g.error_estimate = 2.0 * max_diff(g.blocks, fine) + 1e-14;
  }
  return g;
}

SurfaceGreen surface_green(const StripSymbol& s, double lambda) {
  const int D = s.dim();
  const MatX Id = MatX::Identity(D, D);
  auto decimate = [&](const MatX& fwd, const MatX& bwd, int& iters) {
    MatX es = s.diag, e = s.diag, al = fwd, be = bwd;
    int it = 0;
    for (; it < 200; ++it) {
      const MatX g = (e - lambda * Id).inverse();
      const MatX agb = al * g * be;
      es -= agb;
      e -= agb + be * g * al;
      const MatX al2 = -(al * g * al);
      const MatX be2 = -(be * g * be);
      al = al2;
      be = be2;
      if (al.cwiseAbs().maxCoeff() < 1e-15 && be.cwiseAbs().maxCoeff() < 1e-15) break;
    }
    iters = std::max(iters, it);
    return MatX((es - lambda * Id).inverse());
  };
  SurfaceGreen out;
  out.right = decimate(s.up, s.down, out.iterations);
  out.left = decimate(s.down, s.up, out.iterations);
  return out;
}

MatX DecimatedResolvent::at(int d) const {
  MatX r = g0;
  const MatX& phi = d >= 0 ? phi_right : phi_left;
  for (int k = 0; k < std::abs(d); ++k) r = phi * r;
  return r;
}

DecimatedResolvent decimation_resolvent(const StripSymbol& s, double lambda) {
  const SurfaceGreen sg = surface_green(s, lambda);
  DecimatedResolvent r;
  r.lambda = lambda;
  r.phi_right = -sg.right * s.down;
  r.phi_left = -sg.left * s.up;
  const MatX Id = MatX::Identity(s.dim(), s.dim());
  r.g0 = (s.diag - lambda * Id + s.up * r.phi_right + s.down * r.phi_left).inverse();
  return r;
}

MatX truncated_inverse(const StripSymbol& s, double lambda, int blocks) {
  MatX H = truncate(s, blocks);
  H.diagonal().array() -= lambda;
  return H.inverse();
}

double right_inverse_defect(const StripSymbol& s, const GreenKernel& g, const std::vector<int>& probes) {
  const int D = s.dim();
  double w = 0.0;
  for (int p : probes) {
    MatX r = -g.lambda * g.at(p, 0);
    for (int d = -1; d <= 1; ++d) r += s.hop(d) * g.at(p + d, 0);
    if (p == 0) r -= MatX::Identity(D, D);
    w = std::max(w, r.cwiseAbs().maxCoeff());
  }
  return w;
}

MatX far_field_matrix(const ConeGauge& g) {
  MatX F = MatX::Zero(6, 6);
  for (int k = 0; k < 4; ++k) F += (k < 2 ? 1.0 : -1.0) * g.v.col(k) * g.v.col(k).adjoint();
  return (I1 / (2.0 * g.alpha_abs)) * F;
}

namespace {

double fitted_rate(const std::vector<double>& r, double floor) {
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (r[k] <= floor) break;
    xs.push_back(static_cast<double>(k));
    ys.push_back(std::log(r[k]));
  }
  if (xs.size() < 3) return 0.0;
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sx += xs[k];
    sy += ys[k];
    sxx += xs[k] * xs[k];
    sxy += xs[k] * ys[k];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return std::exp(slope);
}

}  // namespace

FarFieldReport far_field_check(const GreenKernel& pv, const ConeGauge& g, double floor) {
  const MatX F = far_field_matrix(g);
  FarFieldReport r;
  for (int n = 1; n <= pv.max_offset; ++n) {
    r.residual_plus.push_back((pv.at(n, 0) - F).cwiseAbs().maxCoeff());
    r.residual_minus.push_back((pv.at(-n, 0) + F).cwiseAbs().maxCoeff());
  }
  r.rate_plus = fitted_rate(r.residual_plus, floor);
  r.rate_minus = fitted_rate(r.residual_minus, floor);
  return r;
}

BlockField bloch_field(const VecX& v, double theta) {
  return [v, theta](int n) -> VecX { return std::polar(1.0, theta * n) * v; };
}

cplx energy_flux(const StripSymbol& s, const BlockField& phi, const BlockField& psi, int n) {
  const VecX a = s.down * phi(n - 1);
  const VecX b = s.up * phi(n);
  return psi(n).dot(a) - psi(n - 1).dot(b);
}

double flux_site_independence(const StripSymbol& s, const BlockField& phi, const BlockField& psi,
                              const std::vector<int>& sites) {
  if (sites.empty()) return 0.0;
  const cplx ref = energy_flux(s, phi, psi, sites.front());
  double w = 0.0;
  for (int n : sites) w = std::max(w, std::abs(energy_flux(s, phi, psi, n) - ref));
  return w;
}

double green_identity_defect(const StripSymbol& s, double lambda, const BlockField& phi,
                             const BlockField& psi, int a, int b) {
  auto apply = [&](const BlockField& f, int n) -> VecX {
    return s.down * f(n - 1) + s.diag * f(n) + s.up * f(n + 1) - lambda * f(n);
  };
  cplx lhs = 0.0;
  for (int n = a; n <= b; ++n) lhs += psi(n).dot(apply(phi, n)) - apply(psi, n).dot(phi(n));
  const cplx rhs = energy_flux(s, phi, psi, a) - energy_flux(s, phi, psi, b + 1);
  return std::abs(lhs - rhs);
}

}  // namespace hexcone
