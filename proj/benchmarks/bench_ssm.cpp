#include <benchmark/benchmark.h>

#include "ssm/codec.hpp"
#include "ssm/controller.hpp"
#include "ssm/ctr.hpp"
#include "ssm/field.hpp"
#include "ssm/pathoram.hpp"
#include "ssm/random.hpp"

namespace {

using namespace ssm;

DataBlock random_block(Rng& rng) {
  DataBlock b;
  for (auto& byte : b) byte = static_cast<std::uint8_t>(rng());
  return b;
}

void BM_GfMul(benchmark::State& state) {
  Rng rng(1);
  FieldElem a{rng() | 1}, b{rng() | 1};
  for (auto _ : state) {
    a = a * b;
    benchmark::DoNotOptimize(a);
  }
}
BENCHMARK(BM_GfMul);

void BM_GfInv(benchmark::State& state) {
  FieldElem a{0x1234567890abcdefULL};
  for (auto _ : state) {
    a = gf_inv(a);
    benchmark::DoNotOptimize(a);
  }
}
BENCHMARK(BM_GfInv);

void BM_Segment(benchmark::State& state) {
  Rng rng(2);
  const CodecParams params;
  const DataBlock block = random_block(rng);
  const SeedContext ctx{{1, 2}, 3, 4};
  for (auto _ : state) benchmark::DoNotOptimize(segment_block(block, params, ctx, rng));
}
BENCHMARK(BM_Segment);

void BM_Reconstruct(benchmark::State& state) {
  Rng rng(3);
  const CodecParams params;
  const DataBlock block = random_block(rng);
  const SeedContext ctx{{1, 2}, 3, 4};
  auto shares = segment_block(block, params, ctx, rng);
  shares.resize(params.threshold);
  for (auto _ : state) benchmark::DoNotOptimize(reconstruct(shares, params, ctx));
}
BENCHMARK(BM_Reconstruct);

void BM_SsmAccess(benchmark::State& state) {
  SsmConfig cfg;
  cfg.op_type_protection = state.range(0) != 0;
  SsmController ctl(cfg, 4);
  Rng rng(5);
  const DataBlock data = random_block(rng);
  for (auto _ : state) {
    const auto addr = uniform_below(rng, cfg.geom.logical_blocks);
    benchmark::DoNotOptimize(rng() & 1 ? ctl.read(addr) : ctl.write(addr, data));
  }
}
BENCHMARK(BM_SsmAccess)->Arg(0)->Arg(1);

void BM_OramAccess(benchmark::State& state) {
  oram::OramConfig cfg;
  cfg.levels = static_cast<std::uint32_t>(state.range(0));
  Rng rng(6);
  const std::uint64_t blocks = std::min<std::uint64_t>(cfg.max_real_blocks(), 1u << 16);
  oram::PathOram o(cfg, blocks, rng, false);
  for (auto _ : state) benchmark::DoNotOptimize(o.access_counted(Op::Read, uniform_below(rng, blocks)));
}
BENCHMARK(BM_OramAccess)->Arg(12)->Arg(27);

void BM_SgxRead(benchmark::State& state) {
  ctr::SgxMemory mem({}, 1u << 15, 7);
  Rng rng(8);
  for (auto _ : state) benchmark::DoNotOptimize(mem.read(uniform_below(rng, 1u << 15)));
}
BENCHMARK(BM_SgxRead);

}  // namespace
BENCHMARK_MAIN();
