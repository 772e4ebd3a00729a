#include "pg/formal.hpp"
#include "pg/genfun.hpp"
#include "pg/psm.hpp"

#include <benchmark/benchmark.h>

namespace {

pg::GenfunPoint point(int d) {
  const auto q = pg::probe_grid(d, 3, 1);
  return {0.2 * q[0], 0.2 * q[1], q[2]};
}

const pg::PoissonStructure& structure(int k) {
  static const pg::PoissonStructure s[] = {pg::moyal2d(), pg::quadratic2d(), pg::quadratic3d(), pg::so3_structure()};
  return s[k];
}

void BM_GenfunS(benchmark::State& st) {
  const pg::PoissonStructure& P = structure(static_cast<int>(st.range(0)));
  const pg::GenfunPoint g = point(P.dim());
  for (auto _ : st) benchmark::DoNotOptimize(pg::genfun_S(P, g));
  st.SetLabel(P.label());
}
BENCHMARK(BM_GenfunS)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

void BM_Taylor(benchmark::State& st) {
  const pg::PoissonStructure& P = structure(2);
  const pg::GenfunPoint g = point(3);
  pg::TaylorConfig tc;
  tc.policy = st.range(0) ? pg::ExecPolicy::parallel : pg::ExecPolicy::serial;
  for (auto _ : st) benchmark::DoNotOptimize(pg::taylor_coeffs_S(P, g.p1, g.p2, g.x, 4, tc));
  st.SetLabel(st.range(0) ? "parallel" : "serial");
}
BENCHMARK(BM_Taylor)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_PsmAction(benchmark::State& st) {
  const pg::PoissonStructure& P = structure(2);
  const pg::GenfunPoint g = point(3);
  const pg::Triangle T = pg::build_triangle(P, g.p1, g.p2, g.x);
  const auto policy = st.range(0) ? pg::ExecPolicy::parallel : pg::ExecPolicy::serial;
  for (auto _ : st) benchmark::DoNotOptimize(pg::psm_action_report(P, T, 16, {}, policy).action);
  st.SetLabel(st.range(0) ? "parallel" : "serial");
}
BENCHMARK(BM_PsmAction)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
