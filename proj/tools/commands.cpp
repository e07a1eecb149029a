#include "commands.hpp"

#include "hexcone/green.hpp"
#include "hexcone/hamiltonian.hpp"
#include "hexcone/lattice.hpp"
#include "hexcone/matching.hpp"
#include "hexcone/robustness.hpp"
#include "hexcone/spectra.hpp"

#include <fmt/core.h>
#include <fmt/os.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace hexcone::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

// RFC-4180 writer; doubles use 17 significant digits and NaN becomes an empty field.
class Csv {
 public:
  using Cell = std::variant<double, long long, std::string>;

  Csv(const fs::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    std::vector<Cell> h(header.begin(), header.end());
    row(h);
  }

  void row(const std::vector<Cell>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) line += ',';
      if (const auto* d = std::get_if<double>(&cells[i]))
        line += std::isnan(*d) ? std::string() : fmt::format("{:.17g}", *d);
      else if (const auto* n = std::get_if<long long>(&cells[i]))
        line += std::to_string(*n);
      else
        line += csv_field(std::get<std::string>(cells[i]));
    }
    out_ << line << "\r\n";
  }

 private:
  std::ofstream out_;
};

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

fs::path out_dir(const RunConfig& cfg) {
  fs::path p(cfg.out);
  fs::create_directories(p);
  return p;
}

struct Model {
  HoppingKernel Hb;
  DiracData dirac;
  GapCriterion crit;
};

Model setup(const RunConfig& cfg) {
  Model m;
  m.Hb = build_bulk(parse_model(cfg.model), cfg.blend);
  m.dirac = locate_double_dirac(m.Hb);
  m.crit = verify_gap_criterion(build_Hper(), m.dirac);
  return m;
}

Interval cone_interval(const Model& m, double delta, double c_star) {
  const double r = c_star * m.crit.beta * delta;
  return {m.dirac.lambda_star - r, m.dirac.lambda_star + r};
}

// Standing assumptions of the matching and strip pipelines.
void require_interface_model(const RunConfig& cfg, const Model& m, double delta) {
  const NonsingularReport ns = check_nonsingular_hopping(m.Hb);
  if (!ns.nonsingular)
    throw ModelError(fmt::format("model '{}' violates nonsingular hopping (sigma_min = {:.3g})", cfg.model,
                                 ns.sigma_min));
  GapScanOptions go;
  go.c_star = cfg.c_star;
  const GapReport g = gap_report(m.Hb, m.crit, m.dirac, delta, go);
  if (!g.has_gap || g.lo > g.interval_lo || g.hi < g.interval_hi)
    throw ModelError(fmt::format("model '{}' has no common gap containing the cone interval at delta = {}", cfg.model,
                                 delta));
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

json inversion_json(const InversionScores& s) {
  return {{"plus_lower_rho1", s.plus_lower_rho1},
          {"plus_lower_rho2", s.plus_lower_rho2},
          {"minus_lower_rho1", s.minus_lower_rho1},
          {"minus_lower_rho2", s.minus_lower_rho2}};
}

}  // namespace

int cmd_bands(const RunConfig& cfg, const Flags&) {
  const fs::path dir = out_dir(cfg);
  const Model m = setup(cfg);
  const double delta = cfg.delta;

  // Gamma -> M -> K -> Gamma in dual coordinates.
  const std::vector<std::pair<double, double>> corners{{0.0, 0.0}, {0.5, 0.0}, {2.0 / 3.0, 1.0 / 3.0}, {0.0, 0.0}};
  const int per = std::max(1, cfg.path_points / 3);
  Csv csv(dir / "bands.csv", {"side", "s", "k1", "k2", "e1", "e2", "e3", "e4", "e5", "e6"});
  for (int side : {+1, -1}) {
    const HoppingKernel K = perturbed(m.Hb, m.crit.oriented_per, side * delta);
    double s = 0.0;
    for (std::size_t seg = 0; seg + 1 < corners.size(); ++seg) {
      const auto [a1, a2] = corners[seg];
      const auto [b1, b2] = corners[seg + 1];
      const int last = seg + 2 == corners.size() ? per : per - 1;
      for (int i = 0; i <= last; ++i) {
        const double t = static_cast<double>(i) / per;
        const DualMomentum k{a1 + t * (b1 - a1), a2 + t * (b2 - a2)};
        Eigen::SelfAdjointEigenSolver<Mat6> es(bloch_matrix(K, k), Eigen::EigenvaluesOnly);
        std::vector<Csv::Cell> row{static_cast<long long>(side), s + t, k.k1, k.k2};
        for (int b = 0; b < 6; ++b) row.emplace_back(es.eigenvalues()(b));
        csv.row(row);
      }
      s += 1.0;
    }
  }

  GapScanOptions go;
  go.c_star = cfg.c_star;
  json gap;
  if (delta > 0.0) {
    const GapReport g = gap_report(m.Hb, m.crit, m.dirac, delta, go);
    gap = {{"delta", delta},       {"has_gap", g.has_gap},         {"lo", g.lo},
           {"hi", g.hi},           {"width", g.width},             {"predicted_width", g.predicted},
           {"ratio", g.ratio},     {"midpoint_offset", g.midpoint_offset},
           {"interval", {g.interval_lo, g.interval_hi}},           {"inversion", inversion_json(g.inversion)}};
  } else {
    gap = {{"delta", 0.0}, {"has_gap", false}, {"width", 0.0}, {"reason", "unperturbed cone is gapless"}};
  }
  json report{{"model", cfg.model},
              {"lambda_star", m.dirac.lambda_star},
              {"alpha", m.dirac.alpha},
              {"beta", m.crit.beta},
              {"gap", gap},
              {"tolerances", {{"degeneracy_rel_tol", 1e-8}, {"scan_grid", go.grid}, {"refine_grid", go.refine_grid}}}};
  write_json(dir / "gap.json", report);
  fmt::print("bands: model {} delta {} gap {}\n", cfg.model, delta,
             gap.value("has_gap", false) ? fmt::format("[{:.10g}, {:.10g}]", gap["lo"].get<double>(),
                                                       gap["hi"].get<double>())
                                         : std::string("empty"));
  return kOk;
}

int cmd_symmetry_report(const RunConfig& cfg, const Flags&) {
  const fs::path dir = out_dir(cfg);
  const Model m = setup(cfg);
  const auto group = generate_group(false);
  const auto big = generate_group(true);
  json elems = json::array();
  double worst = 0.0;
  for (const auto& g : group) {
    const double c = commutator_norm(m.Hb, g.op);
    worst = std::max(worst, c);
    elems.push_back({{"word", g.word}, {"commutator_norm", c}});
  }
  const double ct = commutator_norm(m.Hb, supersymmetry_op());
  json irreps = json::array();
  for (const auto& rep : c6v_irreps())
    irreps.push_back({{"name", rep.name},
                      {"dim", rep.dim()},
                      {"relation_defect", relation_defect(rep)},
                      {"homomorphism_defect", homomorphism_defect(group, rep)}});
  const Representation rt = rho_tilde();
  json flat = json::array();
  for (int side : {+1, -1})
    for (const auto& f : flatness_check(perturbed(m.Hb, m.crit.oriented_per, side * std::max(cfg.delta, 1e-3))))
      flat.push_back({{"side", side},
                      {"eigenvalue", f.eigenvalue},
                      {"irrep", f.irrep},
                      {"score", f.score},
                      {"first_order_norm", f.first_order_norm}});
  json report{{"model", cfg.model},
              {"group_order", group.size()},
              {"extended_group_order", big.size()},
              {"elements", elems},
              {"max_commutator_norm", worst},
              {"supersymmetry_commutator_norm", ct},
              {"irreps", irreps},
              {"rho_tilde",
               {{"relation_defect", relation_defect(rt)}, {"homomorphism_defect", homomorphism_defect(big, rt)}}},
              {"dirac",
               {{"lambda_star", m.dirac.lambda_star},
                {"alpha", m.dirac.alpha},
                {"alpha_finite_difference", m.dirac.alpha_fd},
                {"alignment_defect", m.dirac.alignment_defect}}},
              {"gap_criterion",
               {{"beta1", m.crit.beta1}, {"beta3", m.crit.beta3}, {"offdiag", m.crit.offdiag},
                {"swapped", m.crit.swapped}}},
              {"flatness", flat},
              {"tolerances", {{"commutator", 1e-12}, {"alignment", 1e-10}, {"flatness", 1e-10}}}};
  write_json(dir / "symmetry.json", report);
  fmt::print("symmetry-report: max commutator {:.3g}, supersymmetry {:.3g}\n", worst, ct);
  return kOk;
}

int cmd_green_check(const RunConfig& cfg, const Flags&) {
  const fs::path dir = out_dir(cfg);
  const Model m = setup(cfg);
  const NonsingularReport ns = check_nonsingular_hopping(m.Hb);
  if (!ns.nonsingular)
    throw ModelError(fmt::format("model '{}' violates nonsingular hopping (sigma_min = {:.3g})", cfg.model,
                                 ns.sigma_min));
  const StripSymbol bulk = strip_symbol(m.Hb, 0.0, 1);
  const ConeGauge gauge = fix_gauge_v(m.dirac);
  QuadratureOptions q{.order = 20, .levels = 0, .panels = cfg.quadrature.panels, .estimate_error = true};
  const GreenKernel pv = physical_green_pv(bulk, gauge, 40, q);
  std::vector<int> probes;
  for (int p = -10; p < 10; ++p) probes.push_back(p);
  const double rinv = right_inverse_defect(bulk, pv, probes);
  const FarFieldReport ff = far_field_check(pv, gauge);
  {
    Csv csv(dir / "far_field.csv", {"n", "residual_plus", "residual_minus"});
    const std::size_t rows = std::max(ff.residual_plus.size(), ff.residual_minus.size());
    const double nan = std::nan("");
    for (std::size_t i = 0; i < rows; ++i)
      csv.row({static_cast<long long>(i + 1), i < ff.residual_plus.size() ? ff.residual_plus[i] : nan,
               i < ff.residual_minus.size() ? ff.residual_minus[i] : nan});
  }
  json flux = json::array();
  double offdiag = 0.0;
  for (int j = 0; j < 4; ++j) {
    json row = json::array();
    for (int k = 0; k < 4; ++k) {
      const cplx a = energy_flux(bulk, bloch_field(gauge.v.col(j), 0.0), bloch_field(gauge.v.col(k), 0.0), 0);
      if (j != k) offdiag = std::max(offdiag, std::abs(a));
      row.push_back(complex_json(a));
    }
    flux.push_back(row);
  }
  std::vector<int> sites;
  for (int n = -5; n < 5; ++n) sites.push_back(n);
  double site_dev = 0.0;
  for (int j = 0; j < 4; ++j)
    site_dev = std::max(site_dev, flux_site_independence(bulk, bloch_field(gauge.v.col(j), 0.0),
                                                         bloch_field(gauge.v.col(j), 0.0), sites));
  const LimitPieces lp = limit_pieces(bulk, gauge, m.crit.beta);
  std::vector<double> sv(lp.mpv_singular_values.data(), lp.mpv_singular_values.data() + lp.mpv_singular_values.size());
  json report{{"model", cfg.model},
              {"lambda_star", gauge.lambda_star},
              {"alpha_abs", gauge.alpha_abs},
              {"quadrature", {{"nodes", pv.nodes}, {"panels", pv.panels}, {"order", pv.order},
                              {"error_estimate", pv.error_estimate}}},
              {"right_inverse_defect", rinv},
              {"far_field", {{"rate_plus", ff.rate_plus}, {"rate_minus", ff.rate_minus}}},
              {"flux_matrix", flux},
              {"flux_offdiag_max", offdiag},
              {"flux_site_deviation", site_dev},
              {"limit_operator",
               {{"hermiticity_defect", (lp.Mpv - lp.Mpv.adjoint()).norm()}, {"singular_values", sv}}},
              {"tolerances", {{"right_inverse", 1e-6}, {"far_field_rate", 0.9}, {"flux", 1e-8}, {"kernel_sv", 1e-6}}}};
  write_json(dir / "green.json", report);
  fmt::print("green-check: right-inverse defect {:.3g}, far-field rates {:.3f} / {:.3f}\n", rinv, ff.rate_plus,
             ff.rate_minus);
  return kOk;
}

int cmd_interface(const RunConfig& cfg, const Flags& f) {
  const fs::path dir = out_dir(cfg);
  const Model m = setup(cfg);
  const double delta = cfg.delta;
  if (!(delta > 0.0)) throw ModelError("the interface pipeline needs delta > 0");
  require_interface_model(cfg, m, delta);
  const InterfaceKernel ik = make_interface(m.Hb, m.crit.oriented_per, delta, !f.no_inversion);
  const InterfaceStrip s = interface_strip(ik, 0.0);
  SearchOptions so;
  so.grid = cfg.search_grid;
  so.c_star = cfg.c_star;
  so.mode_window = cfg.truncation.mode_window;
  so.matching.quad = {.order = cfg.quadrature.order, .levels = cfg.quadrature.levels,
                      .panels = cfg.quadrature.panels, .estimate_error = false};
  const ModeCount mc = count_interface_modes(s, m.dirac.lambda_star, delta, m.crit.beta, so);

  json values = json::array();
  for (const auto& cv : mc.search.values) {
    std::vector<json> aux;
    for (const cplx& z : cv.aux_eigenvalues) aux.push_back(complex_json(z));
    values.push_back({{"h", cv.h}, {"lambda", cv.lambda}, {"sigma_min", cv.sigma_min},
                      {"multiplicity", cv.multiplicity}, {"aux_eigenvalues", aux}, {"modes", cv.modes.cols()}});
  }
  write_json(dir / "search_trace.json", {{"delta", delta},
                                         {"h_grid", mc.search.h_grid},
                                         {"sigma_min", mc.search.sigma_min},
                                         {"characteristic_values", values},
                                         {"no_characteristic_value", mc.no_characteristic_value},
                                         {"tolerances", {{"null_rel_tol", so.null_rel_tol},
                                                         {"golden_tol", so.golden_tol},
                                                         {"aux_tol", so.aux_tol}}}});
  json modes = json::array();
  for (std::size_t k = 0; k < mc.found.size(); ++k) {
    const InterfaceMode& md = mc.found[k];
    const std::string name = fmt::format("mode_{}_{}.csv", k + 1, md.parity > 0 ? "even" : "odd");
    std::vector<std::string> header{"n", "norm"};
    for (int i = 0; i < md.profile.front().size(); ++i) {
      header.push_back(fmt::format("re{}", i + 1));
      header.push_back(fmt::format("im{}", i + 1));
    }
    Csv csv(dir / name, header);
    for (std::size_t b = 0; b < md.profile.size(); ++b) {
      const VecX& u = md.profile[b];
      std::vector<Csv::Cell> row{static_cast<long long>(md.first_block + static_cast<int>(b)), u.norm()};
      for (Eigen::Index i = 0; i < u.size(); ++i) {
        row.emplace_back(u(i).real());
        row.emplace_back(u(i).imag());
      }
      csv.row(row);
    }
    modes.push_back({{"lambda", md.lambda}, {"h", md.h}, {"parity", md.parity},
                     {"parity_defect", md.parity_defect}, {"residual", md.residual},
                     {"decay_right", md.decay_right}, {"decay_left", md.decay_left}, {"tail", md.tail},
                     {"profile_csv", name}});
  }
  json report{{"model", cfg.model},
              {"delta", delta},
              {"inverted", !f.no_inversion},
              {"lambda_star", m.dirac.lambda_star},
              {"characteristic_count", mc.characteristic},
              {"mode_count", mc.modes},
              {"modes", modes},
              {"tolerances", {{"mode_residual", 1e-8}, {"tail", 1e-10}}}};
  if (f.oracle) {
    const Interval gap = cone_interval(m, delta, cfg.c_star);
    json table = json::array();
    for (const OracleLevel& o : direct_oracle(s, gap, cfg.truncation.oracle_blocks)) {
      double nearest = std::nan("");
      for (const auto& md : mc.found)
        if (std::isnan(nearest) || std::abs(md.lambda - o.lambda) < std::abs(nearest - o.lambda)) nearest = md.lambda;
      table.push_back({{"lambda", o.lambda}, {"parity", o.parity}, {"central_weight", o.central_weight},
                       {"pipeline_lambda", std::isnan(nearest) ? json(nullptr) : json(nearest)},
                       {"difference", std::isnan(nearest) ? json(nullptr) : json(std::abs(nearest - o.lambda))}});
    }
    report["oracle"] = {{"blocks_per_side", cfg.truncation.oracle_blocks}, {"levels", table},
                        {"tolerance", 1e-6}};
  }
  write_json(dir / "interface.json", report);
  if (mc.modes != 2) {
    fmt::print(stderr,
               "interface: expected 2 modes, found {} (characteristic directions: {}){}\n", mc.modes,
               mc.characteristic,
               f.no_inversion ? "; both half-planes carry the same bulk, so no band inversion protects a mode" : "");
    return kModeCount;
  }
  fmt::print("interface: 2 modes at lambda = {:.12g} (parity {:+d}) and {:.12g} (parity {:+d})\n",
             mc.found[0].lambda, mc.found[0].parity, mc.found[1].lambda, mc.found[1].parity);
  return kOk;
}

int cmd_robustness(const RunConfig& cfg, const Flags& f) {
  const fs::path dir = out_dir(cfg);
  const Model m = setup(cfg);
  const PerturbationConfig& pc = cfg.perturbation;
  const double delta = pc.delta;
  require_interface_model(cfg, m, delta);
  const InterfaceKernel ik = make_interface(m.Hb, m.crit.oriented_per, delta);
  const Interval gap = cone_interval(m, delta, cfg.c_star);
  const PerturbationW W = build_W(parse_defect(pc.kind), pc.amplitude, pc.half_width);
  const int R = std::max(cfg.truncation.strip_blocks, pc.kind == "line" ? pc.half_width + 1 : 3);

  const std::vector<double> levels = interface_levels(ik, 0.0, gap, R);
  const BoundCheck bound = check_bound(W, levels, gap, pc.c_W);
  if (!bound.satisfied && !f.override_bound) {
    fmt::print(stderr, "robustness: M_W = {:.6g} exceeds c_W * min d_zig = {:.6g}; pass --override-bound to run "
                       "outside the theory\n", bound.M_W, bound.c_W * bound.d_min);
    write_json(dir / "robustness.json", {{"bound", {{"M_W", bound.M_W}, {"d_min", bound.d_min}, {"c_W", bound.c_W},
                                                    {"satisfied", false}}},
                                         {"refused", true}});
    return kBoundViolated;
  }

  SectorOptions bare;
  bare.R = R;
  bare.profile_R = std::max(cfg.truncation.profile_blocks, R);
  bare.with_W = false;
  SectorOptions pert = bare;
  pert.with_W = true;

  json rows = json::array();
  std::map<int, std::vector<double>> seq;
  bool all_ok = true;
  for (int L : pc.widths) {
    const PeriodicStrip p = restrict_periodize(ik, W, L, R);
    for (int parity : {+1, -1}) {
      const SectorResult r0 = strip_sector_eigen(p, parity, gap, bare);
      const SectorResult rw = strip_sector_eigen(p, parity, gap, pert);
      json row{{"L", L}, {"parity", parity}, {"unperturbed", r0.in_gap}, {"perturbed", rw.in_gap},
               {"unique_unperturbed", r0.unique}, {"unique_perturbed", rw.unique}};
      if (r0.unique && rw.unique) {
        const double lz = r0.in_gap.front();
        const double dz = isolation_distance(lz, gap);
        const double shift = std::abs(rw.in_gap.front() - lz);
        row["lambda_zig"] = lz;
        row["d_zig"] = dz;
        row["shift"] = shift;
        row["within_half_distance"] = shift < 0.5 * dz;
        all_ok = all_ok && shift < 0.5 * dz;
        seq[parity].push_back(rw.in_gap.front());
        const PersistenceReport pr = farfield_persistence(*rw.mode, *r0.mode, L, bare.profile_R, pc.exclusion_radius);
        row["outside_overlap"] = pr.outside_overlap;
        row["difference_norm"] = pr.difference_norm;
        row["parity_defect"] = rw.mode->parity_defect;
        const std::string name = fmt::format("difference_L{}_{}.csv", L, parity > 0 ? "even" : "odd");
        Csv csv(dir / name, {"band", "y_lo", "y_hi", "l2_norm"});
        for (std::size_t k = 0; k < pr.window_profile.size(); ++k)
          csv.row({static_cast<long long>(k), 2.0 * k, 2.0 * k + 2.0, pr.window_profile[k]});
        row["profile_csv"] = name;
      } else {
        all_ok = false;
      }
      rows.push_back(row);
    }
  }
  json cauchy = json::object();
  for (const auto& [parity, v] : seq) {
    std::vector<double> diffs;
    for (std::size_t k = 1; k < v.size(); ++k) diffs.push_back(std::abs(v[k] - v[k - 1]));
    bool decreasing = true;
    for (std::size_t k = 1; k < diffs.size(); ++k) decreasing = decreasing && diffs[k] <= diffs[k - 1];
    cauchy[parity > 0 ? "even" : "odd"] = {{"differences", diffs}, {"decreasing", decreasing}};
  }
  const bool empty_pi = interface_levels(ik, pi, gap, R).empty();
  json report{{"model", cfg.model},
              {"delta", delta},
              {"interval", {gap.lo, gap.hi}},
              {"defect", {{"kind", pc.kind}, {"amplitude", pc.amplitude}, {"half_width", pc.half_width},
                          {"reflection_defect", reflection_defect(W)}}},
              {"bound", {{"M_W", bound.M_W}, {"d_min", bound.d_min}, {"c_W", bound.c_W},
                         {"satisfied", bound.satisfied}}},
              {"out_of_theory", !bound.satisfied},
              {"window_half_width", R},
              {"sectors", rows},
              {"cauchy", cauchy},
              {"kpar_pi_empty", empty_pi},
              {"tolerances", {{"bisection", 1e-13}, {"overlap", 0.99}, {"sampling", 1e-8}}}};
  write_json(dir / "robustness.json", report);
  fmt::print("robustness: M_W = {:.4g} (bound {}), all sectors within d_zig/2: {}, kpar = pi empty: {}\n", bound.M_W,
             bound.satisfied ? "satisfied" : "overridden", all_ok, empty_pi);
  return kOk;
}

int cmd_band_curve(const RunConfig& cfg, const Flags& f) {
  const fs::path dir = out_dir(cfg);
  const Model m = setup(cfg);
  const double delta = cfg.delta;
  if (!(delta > 0.0)) throw ModelError("the band curve needs delta > 0");
  require_interface_model(cfg, m, delta);
  const InterfaceKernel ik = make_interface(m.Hb, m.crit.oriented_per, delta, !f.no_inversion);
  const Interval gap = cone_interval(m, delta, cfg.c_star);
  std::vector<double> ks;
  for (int i = 0; i < cfg.curve_points; ++i) ks.push_back(-pi + 2.0 * pi * i / (cfg.curve_points - 1));
  const BandCurve bc = interface_band_curve(ik, ks, gap, cfg.truncation.strip_blocks);
  std::vector<std::string> header{"kpar", "count"};
  for (std::size_t b = 0; b < bc.branches.size(); ++b) header.push_back(fmt::format("branch{}", b + 1));
  Csv csv(dir / "band_curve.csv", header);
  for (std::size_t i = 0; i < bc.samples.size(); ++i) {
    std::vector<Csv::Cell> row{bc.samples[i].kpar, static_cast<long long>(bc.samples[i].values.size())};
    for (const auto& br : bc.branches) row.emplace_back(br[i]);
    csv.row(row);
  }
  json report{{"model", cfg.model},
              {"delta", delta},
              {"interval", {gap.lo, gap.hi}},
              {"branches", bc.branches.size()},
              {"empty_at_pi", bc.empty_at_pi},
              {"max_jump_rate", bc.max_jump_rate},
              {"kpar_zero_levels", interface_levels(ik, 0.0, gap, cfg.truncation.strip_blocks)},
              {"tolerances", {{"bisection", 1e-13}}}};
  write_json(dir / "band_curve.json", report);
  fmt::print("band-curve: {} branches, kpar = pi empty: {}\n", bc.branches.size(), bc.empty_at_pi);
  return kOk;
}

}  // namespace hexcone::cli
