#include <benchmark/benchmark.h>

#include <random>

#include "smb/certificate.hpp"
#include "smb/join.hpp"
#include "smb/laws.hpp"
#include "smb/unifier.hpp"

using namespace smb;

static void BM_SearchNaturals(benchmark::State& state) {
  Natural n = state.range(0);
  Tree a = from_nat(n), b = from_nat(n + 1);
  for (auto _ : state) benchmark::DoNotOptimize(search_le(a, b));
}
BENCHMARK(BM_SearchNaturals)->Arg(8)->Arg(64)->Arg(512);

static void BM_SearchBelowOmega(benchmark::State& state) {
  Tree a = from_nat(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(search_le(a, smb_omega().raw()));
}
BENCHMARK(BM_SearchBelowOmega)->Arg(2)->Arg(100);

static void BM_AuditInfIdem(benchmark::State& state) {
  Tree w = nlim(from_nat);
  for (auto _ : state) {
    LeDeriv d = inf_idem(w);
    benchmark::DoNotOptimize(audit(d, standard_budget()));
  }
}
BENCHMARK(BM_AuditInfIdem)->Unit(benchmark::kMillisecond);

static void BM_SmbMaxWitness(benchmark::State& state) {
  for (auto _ : state) {
    SMBTree m = smb_max(smb_omega(), smb_succ(smb_from_nat(3)));
    benchmark::DoNotOptimize(m.witness_report());
  }
}
BENCHMARK(BM_SmbMaxWitness)->Unit(benchmark::kMillisecond);

static void BM_StrictMono(benchmark::State& state) {
  SMBTree x = smb_omega(), sx = smb_succ(x), y = smb_from_nat(4), sy = smb_succ(y);
  SmbLt w1 = SmbLt::make(x, sx, LtWitness(le_refl(sx.raw())));
  SmbLt w2 = SmbLt::make(y, sy, LtWitness(le_refl(sy.raw())));
  for (auto _ : state) {
    SmbLt w = smb_max_strict_mono(w1, w2);
    benchmark::DoNotOptimize(audit(w.get().deriv(), standard_budget()));
  }
}
BENCHMARK(BM_StrictMono)->Unit(benchmark::kMillisecond);

static void BM_SimplifyAndCertify(benchmark::State& state) {
  OrdExpr e = parse_expr("max(max(omega, S 2), max(S 3, lim n. max(n, Z)))");
  for (auto _ : state) {
    for (const auto& step : simplify(e).steps) {
      Equiv q = certify(step);
      benchmark::DoNotOptimize(audit(q.fwd.get(), standard_budget()));
    }
  }
}
BENCHMARK(BM_SimplifyAndCertify)->Unit(benchmark::kMillisecond);

static void BM_CompareOmega(benchmark::State& state) {
  OrdExpr a = parse_expr("lim n. max(n, 3)"), b = parse_expr("S omega");
  for (auto _ : state) benchmark::DoNotOptimize(cmd_compare(a, b));
}
BENCHMARK(BM_CompareOmega)->Unit(benchmark::kMillisecond);

static void BM_LawCase(benchmark::State& state) {
  const std::string& law = law_names().at(state.range(0));
  state.SetLabel(law);
  std::mt19937_64 rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(run_law_case(law, rng));
}
BENCHMARK(BM_LawCase)->DenseRange(0, 10)->Unit(benchmark::kMillisecond);

static void BM_Unify(benchmark::State& state) {
  HTree a = parse_htree("g(a, fun n. iter n f a, h(b, fun m. g(iter m f a)))");
  HTree b = parse_htree("g(a, fun k. iter k f a, h(b, fun m. g(iter m f a)))");
  UnifyOptions o;
  o.wf.audit_witnesses = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(unify(a, b, o));
}
BENCHMARK(BM_Unify)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
