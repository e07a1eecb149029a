#include "hexcone/green.hpp"
#include "hexcone/hamiltonian.hpp"
#include "hexcone/matching.hpp"
#include "hexcone/robustness.hpp"
#include "hexcone/spectra.hpp"

#include <benchmark/benchmark.h>

using namespace hexcone;

namespace {

struct Model {
  HoppingKernel Hb;
  DiracData dirac;
  GapCriterion crit;
};

const Model& model() {
  static const Model m = [] {
    Model b;
    b.Hb = build_blended_bulk(default_blend);
    b.dirac = locate_double_dirac(b.Hb);
    b.crit = verify_gap_criterion(build_Hper(), b.dirac);
    return b;
  }();
  return m;
}

Interval cone_interval(double delta) {
  const Model& m = model();
  const double r = 0.9 * m.crit.beta * delta;
  return {m.dirac.lambda_star - r, m.dirac.lambda_star + r};
}

void BM_BlochMatrix(benchmark::State& st) {
  const HoppingKernel& K = model().Hb;
  double k = 0.0;
  for (auto _ : st) {
    benchmark::DoNotOptimize(bloch_matrix(K, k, 0.3));
    k += 1e-3;
  }
}
BENCHMARK(BM_BlochMatrix);

void BM_LocateDoubleDirac(benchmark::State& st) {
  const HoppingKernel K = build_blended_bulk(default_blend);
  for (auto _ : st) benchmark::DoNotOptimize(locate_double_dirac(K));
}
BENCHMARK(BM_LocateDoubleDirac)->Unit(benchmark::kMillisecond);

void BM_GapReport(benchmark::State& st) {
  const Model& m = model();
  for (auto _ : st) benchmark::DoNotOptimize(gap_report(m.Hb, m.crit, m.dirac, 0.05));
}
BENCHMARK(BM_GapReport)->Unit(benchmark::kMillisecond);

void BM_PhysicalGreen(benchmark::State& st) {
  const Model& m = model();
  const StripSymbol bulk = strip_symbol(m.Hb, 0.0, 1);
  const ConeGauge g = fix_gauge_v(m.dirac);
  for (auto _ : st) benchmark::DoNotOptimize(physical_green_pv(bulk, g, static_cast<int>(st.range(0))));
}
BENCHMARK(BM_PhysicalGreen)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_AssembleMatching(benchmark::State& st) {
  const Model& m = model();
  const double delta = 0.05;
  const InterfaceStrip s = interface_strip(make_interface(m.Hb, m.crit.oriented_per, delta), 0.0);
  const Interval gap = cone_interval(delta);
  MatchingOptions opt;
  opt.method = st.range(0) == 0 ? ResolventMethod::Quadrature : ResolventMethod::Decimation;
  for (auto _ : st) benchmark::DoNotOptimize(assemble_matching(s, m.dirac.lambda_star + 0.01, gap, opt));
}
BENCHMARK(BM_AssembleMatching)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_DirectOracle(benchmark::State& st) {
  const Model& m = model();
  const double delta = 0.05;
  const InterfaceStrip s = interface_strip(make_interface(m.Hb, m.crit.oriented_per, delta), 0.0);
  for (auto _ : st) benchmark::DoNotOptimize(direct_oracle(s, cone_interval(delta), static_cast<int>(st.range(0))));
}
BENCHMARK(BM_DirectOracle)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_StripSector(benchmark::State& st) {
  const Model& m = model();
  const double delta = 0.025;
  const InterfaceKernel ik = make_interface(m.Hb, m.crit.oriented_per, delta);
  const PeriodicStrip p = restrict_periodize(ik, build_W(DefectKind::Compact, 1e-5), static_cast<int>(st.range(0)), 8);
  SectorOptions opt;
  for (auto _ : st) benchmark::DoNotOptimize(strip_sector_eigen(p, +1, cone_interval(delta), opt));
}
BENCHMARK(BM_StripSector)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
