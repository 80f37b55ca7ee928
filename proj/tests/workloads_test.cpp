#include <gtest/gtest.h>

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "ssm/errors.hpp"
#include "ssm/workloads.hpp"

namespace ssm {
namespace {

TraceSpec spec_of(TraceKind kind, std::uint64_t count, double rf = 0.5, std::uint64_t seed = 1) {
  TraceSpec s;
  s.kind = kind;
  s.count = count;
  s.read_fraction = rf;
  s.seed = seed;
  return s;
}

TEST(GenTrace, SequentialReads) {
  const auto ev = gen_trace(spec_of(TraceKind::Seq, 4, 1.0), 1024);
  ASSERT_EQ(ev.size(), 4u);
  for (std::uint64_t i = 0; i < 4; ++i) {
    EXPECT_EQ(ev[i].op, Op::Read);
    EXPECT_EQ(ev[i].addr, i);
  }
}

TEST(GenTrace, SequentialStrideWraps) {
  auto s = spec_of(TraceKind::Seq, 10, 1.0);
  s.stride = 3;
  const auto ev = gen_trace(s, 8);
  for (std::uint64_t i = 0; i < ev.size(); ++i) EXPECT_EQ(ev[i].addr, (i * 3) % 8);
}

TEST(GenTrace, RandomIsDeterministicPerSeed) {
  const auto a = gen_trace(spec_of(TraceKind::Rand, 1000, 0.5, 7), 4096);
  const auto b = gen_trace(spec_of(TraceKind::Rand, 1000, 0.5, 7), 4096);
  const auto c = gen_trace(spec_of(TraceKind::Rand, 1000, 0.5, 8), 4096);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(GenTrace, RandomAddressesAreUniform) {
  constexpr std::uint64_t blocks = 1024;
  constexpr std::uint64_t n = 100000;
  const auto ev = gen_trace(spec_of(TraceKind::Rand, n), blocks);
  std::vector<double> hist(blocks, 0.0);
  for (const auto& e : ev) hist[e.addr] += 1;
  const double expected = static_cast<double>(n) / blocks;
  double chi2 = 0;
  for (double h : hist) chi2 += (h - expected) * (h - expected) / expected;
  const boost::math::chi_squared dist(blocks - 1);
  EXPECT_GT(boost::math::cdf(boost::math::complement(dist, chi2)), 0.01);
}

TEST(GenTrace, ReadFractionHonoured) {
  constexpr double n = 100000;
  for (double rf : {0.0, 0.3, 0.5, 0.9, 1.0}) {
    const auto ev = gen_trace(spec_of(TraceKind::Rand, static_cast<std::uint64_t>(n), rf), 512);
    double reads = 0;
    for (const auto& e : ev) reads += e.op == Op::Read;
    const double sigma = std::sqrt(n * rf * (1 - rf));
    EXPECT_LE(std::abs(reads - n * rf), 3 * sigma + 1e-9) << rf;
  }
}

TEST(GenTrace, ConvAndDlrmStayInRange) {
  for (auto kind : {TraceKind::Conv, TraceKind::Dlrm}) {
    const auto ev = gen_trace(spec_of(kind, 5000), 777);
    EXPECT_EQ(ev.size(), 5000u);
    bool saw_read = false, saw_write = false;
    for (const auto& e : ev) {
      EXPECT_LT(e.addr, 777u);
      saw_read |= e.op == Op::Read;
      saw_write |= e.op == Op::Write;
    }
    EXPECT_TRUE(saw_read);
    EXPECT_TRUE(saw_write);
  }
}

TEST(GenTrace, DlrmIsSkewed) {
  const auto ev = gen_trace(spec_of(TraceKind::Dlrm, 50000), 8192);
  std::vector<std::uint64_t> hist(8192, 0);
  for (const auto& e : ev) ++hist[e.addr];
  std::sort(hist.rbegin(), hist.rend());
  std::uint64_t top = 0;
  for (int i = 0; i < 82; ++i) top += hist[i];
  // The hottest 1% of rows draws far more than 1% of lookups.
  EXPECT_GT(top, 5 * 500u);
}

TEST(GenTrace, RejectsBadSpecs) {
  EXPECT_THROW(gen_trace(spec_of(TraceKind::Rand, 10, 1.5), 8), ConfigError);
  EXPECT_THROW(gen_trace(spec_of(TraceKind::Rand, 10), 0), ConfigError);
  EXPECT_THROW(parse_trace_kind("zigzag"), ConfigError);
  EXPECT_EQ(parse_trace_kind("dlrm"), TraceKind::Dlrm);
  EXPECT_EQ(to_string(TraceKind::Conv), "conv");
}

TEST(ParseTrace, ByteAddressesBecomeBlocks) {
  std::istringstream in("# header\nR 0x1f40\n\nW 0x80  # comment\nr 0x3f\n");
  const auto ev = parse_trace(in);
  ASSERT_EQ(ev.size(), 3u);
  EXPECT_EQ(ev[0], (AccessEvent{Op::Read, 0x1f40 / 64, 0}));
  EXPECT_EQ(ev[0].line, 2u);
  EXPECT_EQ(ev[1], (AccessEvent{Op::Write, 2, 0}));
  EXPECT_EQ(ev[1].line, 4u);
  EXPECT_EQ(ev[2].addr, 0u);
}

TEST(ParseTrace, ErrorsCarryLineNumbers) {
  const std::pair<const char*, std::uint64_t> cases[] = {
      {"X 0x0\n", 1}, {"R 0x0\nR\n", 2}, {"R 0x0\nR 0x0\nW zz\n", 3}, {"R 0x0 0x1\n", 1}};
  for (const auto& [text, line] : cases) {
    std::istringstream in(text);
    try {
      parse_trace(in);
      ADD_FAILURE() << text;
    } catch (const TraceError& e) {
      EXPECT_EQ(e.line(), line) << text;
    }
  }
}

TEST(TraceFile, RoundTripPlainAndGzip) {
  const auto events = gen_trace(spec_of(TraceKind::Rand, 3000), 1u << 20);
  const auto dir = std::filesystem::temp_directory_path();
  for (const char* name : {"ssm_wl_test.trace", "ssm_wl_test.trace.gz"}) {
    const auto path = (dir / name).string();
    save_trace_file(path, events);
    EXPECT_EQ(load_trace_file(path), events);
    std::filesystem::remove(path);
  }
}

TEST(TraceFile, GzipIsCompressed) {
  const auto events = gen_trace(spec_of(TraceKind::Seq, 20000), 1u << 20);
  const auto dir = std::filesystem::temp_directory_path();
  const auto plain = (dir / "ssm_wl_size.trace").string();
  const auto gz = (dir / "ssm_wl_size.trace.gz").string();
  save_trace_file(plain, events);
  save_trace_file(gz, events);
  EXPECT_LT(std::filesystem::file_size(gz), std::filesystem::file_size(plain) / 2);
  std::filesystem::remove(plain);
  std::filesystem::remove(gz);
}

TEST(TraceFile, MissingFile) {
  EXPECT_THROW(load_trace_file("/nonexistent/trace"), ConfigError);
  auto s = spec_of(TraceKind::File, 0);
  s.path = "/nonexistent/trace";
  EXPECT_THROW(gen_trace(s, 8), ConfigError);
}

}  // namespace
}  // namespace ssm
