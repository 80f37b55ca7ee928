#include <gtest/gtest.h>

#include <algorithm>
#include <list>

#include "ssm/ctr.hpp"
#include "ssm/errors.hpp"
#include "ssm/mix.hpp"
#include "ssm/random.hpp"
#include "test_util.hpp"

namespace ssm::ctr {
namespace {

std::size_t count(const MetaLog& log, Op op, Region region) {
  std::size_t n = 0;
  for (const auto& t : log) n += t.op == op && t.region == region;
  return n;
}

std::size_t count(const MetaLog& log, Op op) {
  std::size_t n = 0;
  for (const auto& t : log) n += t.op == op;
  return n;
}

TEST(TreeGeometry, LevelsStopBelowTheRoot) {
  const TreeGeometry g(32768, 8);
  ASSERT_EQ(g.stored_levels(), 4u);
  EXPECT_EQ(g.level_counts()[0], 4096u);
  EXPECT_EQ(g.level_counts()[1], 512u);
  EXPECT_EQ(g.level_counts()[3], 8u);
  EXPECT_EQ(g.tree_levels(), 3u);
  EXPECT_EQ(TreeGeometry(8, 8).stored_levels(), 1u);
  EXPECT_EQ(TreeGeometry(65, 8).level_counts()[0], 9u);
  EXPECT_EQ(TreeGeometry(65, 8).stored_levels(), 2u);
}

TEST(SetAssocCache, GeometryAndValidation) {
  EXPECT_EQ(CacheConfig{}.sets(), 128u);
  EXPECT_THROW(SetAssocCache(CacheConfig{1000, 4, 64}), ConfigError);
}

TEST(SetAssocCache, MatchesListLruOracle) {
  const CacheConfig cfg{1024, 4, 64};  // 4 sets
  SetAssocCache cache(cfg);
  std::vector<std::list<std::uint64_t>> oracle(cfg.sets());
  Rng rng(1);
  for (int i = 0; i < 20000; ++i) {
    const std::uint64_t line = uniform_below(rng, 40);
    auto& set = oracle[mix64(line) % cfg.sets()];
    const auto it = std::ranges::find(set, line);
    const bool hit = it != set.end();
    if (hit) set.erase(it);
    else if (set.size() == cfg.ways) set.pop_back();
    set.push_front(line);
    ASSERT_EQ(cache.access(line), hit) << "access " << i;
  }
  EXPECT_EQ(cache.hits() + cache.misses(), 20000u);
}

TEST(SetAssocCache, ClearForgetsEverything) {
  SetAssocCache cache(CacheConfig{});
  cache.access(5);
  EXPECT_TRUE(cache.contains(5));
  cache.clear();
  EXPECT_FALSE(cache.contains(5));
}

TEST(MetadataModel, ColdReadWalksEveryLevel) {
  MetadataModel m(CtrConfig{}, 32768);
  MetaLog log;
  const CtrCost c = m.read(1234, &log);
  EXPECT_EQ(c.reads, 6u);  // data + MAC + VN + 3 tree levels
  EXPECT_EQ(c.writes, 0u);
  EXPECT_EQ(count(log, Op::Read, Region::Data), 1u);
  EXPECT_EQ(count(log, Op::Read, Region::Mac), 1u);
  EXPECT_EQ(count(log, Op::Read, Region::Vn), 1u);
  EXPECT_EQ(count(log, Op::Read, Region::Tree), 3u);
  EXPECT_EQ(c.aes_ops, 2u + 4u);
}

TEST(MetadataModel, WarmReadIsOneTransaction) {
  MetadataModel m(CtrConfig{}, 32768);
  m.read(77);
  MetaLog log;
  const CtrCost c = m.read(77, &log);
  EXPECT_EQ(c.reads, 1u);
  ASSERT_EQ(log.size(), 1u);
  EXPECT_EQ(log[0], (MetaTxn{Op::Read, Region::Data, 0, 77}));
}

TEST(MetadataModel, NeighbourSharesMetadataLines) {
  MetadataModel m(CtrConfig{}, 32768);
  m.read(16);
  EXPECT_EQ(m.read(17).reads, 1u);  // same VN and MAC block
  // Different VN block, same level-1 node: data + MAC + VN.
  EXPECT_EQ(m.read(24).reads, 3u);
}

TEST(MetadataModel, ColdWriteWritesThroughEveryLevel) {
  MetadataModel m(CtrConfig{}, 32768);
  MetaLog log;
  const CtrCost c = m.write(4000, &log);
  EXPECT_EQ(count(log, Op::Write), 3u + 3u);
  EXPECT_EQ(count(log, Op::Write, Region::Tree), 3u);
  EXPECT_EQ(c.reads, 5u);  // MAC + VN + 3 tree levels fetched, no data read
  EXPECT_EQ(c.writes, 6u);
  EXPECT_EQ(m.write(4000).reads, 0u);
}

TEST(MetadataModel, FlushMakesReadsColdAgain) {
  MetadataModel m(CtrConfig{}, 32768);
  m.read(5);
  m.flush_caches();
  EXPECT_EQ(m.read(5).reads, 6u);
}

TEST(MetadataModel, OutOfRange) {
  MetadataModel m(CtrConfig{}, 100);
  EXPECT_THROW(m.read(100), DomainError);
  EXPECT_THROW(m.write(100), DomainError);
}

TEST(SgxMemory, RoundTripAndMonotoneVn) {
  SgxMemory mem(CtrConfig{}, 4096, 1);
  Rng rng(2);
  EXPECT_EQ(mem.read(10).data, DataBlock{});
  const DataBlock a = test::random_block(rng);
  const DataBlock b = test::random_block(rng);
  mem.write(10, a);
  EXPECT_EQ(mem.vn(10), 1u);
  mem.write(10, b);
  EXPECT_EQ(mem.vn(10), 2u);
  const auto r = mem.read(10);
  EXPECT_TRUE(r.intact);
  EXPECT_EQ(r.data, b);
  mem.flush_caches();
  EXPECT_EQ(mem.read(10).data, b);
  EXPECT_TRUE(mem.read(11).intact);
}

TEST(SgxMemory, CiphertextIsNotPlaintext) {
  SgxMemory mem(CtrConfig{}, 64, 3);
  DataBlock d{};
  mem.write(1, d);
  const auto ct = mem.raw_ciphertext(1);
  EXPECT_FALSE(std::all_of(ct.begin(), ct.end(), [](auto v) { return v == 0; }));
}

TEST(SgxMemory, SingleBitFlipsAreDetected) {
  SgxMemory mem(CtrConfig{}, 4096, 4);
  Rng rng(5);
  for (std::uint64_t a = 0; a < 4096; a += 7) mem.write(a, test::random_block(rng));
  for (int trial = 0; trial < 3000; ++trial) {
    const std::uint64_t a = uniform_below(rng, 4096);
    const int where = static_cast<int>(rng() % 3);
    const auto bit = uniform_below(rng, where == 0 ? 512 : 56);
    auto flip = [&] {
      if (where == 0) mem.raw_ciphertext(a)[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
      if (where == 1) mem.raw_vn(a) ^= std::uint64_t{1} << bit;
      if (where == 2) mem.raw_mac(a) ^= std::uint64_t{1} << bit;
    };
    flip();
    mem.flush_caches();
    ASSERT_FALSE(mem.read(a).intact) << "region " << where << " bit " << bit;
    flip();
  }
  EXPECT_EQ(mem.stats().tamper_alarms, 3000u);
}

TEST(SgxMemory, TreeTagCorruptionIsDetected) {
  SgxMemory mem(CtrConfig{}, 32768, 6);
  mem.raw_tag(1, 3) ^= 1;  // level-1 node 3 covers VN blocks 24..31
  mem.flush_caches();
  EXPECT_FALSE(mem.read(3 * 64).intact);
}

TEST(SgxMemory, ReplayIsDetected) {
  SgxMemory mem(CtrConfig{}, 4096, 7);
  Rng rng(8);
  for (int trial = 0; trial < 500; ++trial) {
    const std::uint64_t a = uniform_below(rng, 4096);
    const auto old = mem.snapshot(a);
    mem.write(a, test::random_block(rng));
    const auto fresh = mem.snapshot(a);
    mem.restore(a, old);
    if (trial % 2 == 0) mem.flush_caches();  // verify from memory, or against cached VN
    ASSERT_FALSE(mem.read(a).intact) << trial;
    mem.restore(a, fresh);
  }
}

TEST(SgxMemory, VnSaturationRekeys) {
  SgxMemory mem(CtrConfig{}, 256, 9);
  DataBlock keep{};
  keep[0] = 0xAB;
  mem.write(3, keep);
  mem.force_vn(5, CtrConfig{}.max_vn() - 1);
  DataBlock d{};
  d[1] = 1;
  EXPECT_EQ(mem.write(5, d).rekeys, 0u);
  EXPECT_EQ(mem.vn(5), CtrConfig{}.max_vn());
  EXPECT_EQ(mem.write(5, d).rekeys, 1u);
  EXPECT_EQ(mem.stats().rekeys, 1u);
  EXPECT_EQ(mem.stats().key_epoch, 1u);
  EXPECT_EQ(mem.vn(5), 1u);
  mem.flush_caches();
  EXPECT_EQ(mem.read(5).data, d);
  const auto other = mem.read(3);
  EXPECT_TRUE(other.intact);
  EXPECT_EQ(other.data, keep);
}

TEST(Np, OneTransactionPerAccess) {
  EXPECT_EQ(np_access(Op::Read, 7), (Transaction{Op::Read, 7}));
  EXPECT_EQ(np_access(Op::Write, 9), (Transaction{Op::Write, 9}));
}

}  // namespace
}  // namespace ssm::ctr
