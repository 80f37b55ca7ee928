#include "selftest.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "ssm/analysis.hpp"
#include "ssm/codec.hpp"
#include "ssm/controller.hpp"
#include "ssm/ctr.hpp"
#include "ssm/pathoram.hpp"
#include "ssm/random.hpp"

namespace ssmsim {

namespace {

using namespace ssm;

DataBlock random_block(Rng& rng) {
  DataBlock b;
  for (auto& byte : b) byte = static_cast<std::uint8_t>(rng());
  return b;
}

bool codec_roundtrip() {
  Rng rng(11);
  const CodecParams params;
  for (int i = 0; i < 200; ++i) {
    const DataBlock block = random_block(rng);
    const SeedContext ctx{{rng(), rng()}, rng(), rng()};
    auto shares = segment_block(block, params, ctx, rng);
    partial_shuffle(std::span(shares), params.threshold, rng);
    const auto rec = reconstruct(std::span(shares).first(params.threshold), params, ctx);
    if (!rec.intact || rec.data != block) return false;
  }
  return true;
}

bool codec_tamper() {
  Rng rng(12);
  const CodecParams params;
  for (int i = 0; i < 200; ++i) {
    const DataBlock block = random_block(rng);
    const SeedContext ctx{{rng(), rng()}, rng(), rng()};
    auto shares = segment_block(block, params, ctx, rng);
    shares.resize(params.threshold);
    const auto victim = uniform_below(rng, params.threshold);
    shares[victim].y = shares[victim].y + FieldElem{std::uint64_t{1} << uniform_below(rng, 64)};
    if (reconstruct(shares, params, ctx).intact) return false;
  }
  return true;
}

bool secrecy() {
  const auto ok = analysis::secrecy_exhaustive({4, 2, false});
  const auto broken = analysis::secrecy_exhaustive({4, 2, true});
  return ok.pass && !broken.pass;
}

bool security_figures() {
  const auto p = analysis::p1({});
  return analysis::comb(32, 16) == 601080390 && std::abs(p.value / 2.65e-23 - 1.0) < 0.05;
}

bool ssm_shape() {
  SsmConfig cfg;
  cfg.geom.logical_blocks = 512;
  SsmController ctl(cfg, 5);
  Rng rng(6);
  for (int i = 0; i < 500; ++i) {
    const std::uint64_t addr = uniform_below(rng, 512);
    const DataBlock data = random_block(rng);
    const auto r = (rng() & 1) ? ctl.read(addr) : ctl.write(addr, data);
    if (r.bus_reads != 32 || r.bus_writes != 32 || !r.intact) return false;
  }
  return ctl.map().check_consistency();
}

bool oram_invariant() {
  oram::OramConfig cfg;
  cfg.levels = 4;
  Rng rng(7);
  oram::PathOram o(cfg, 12, rng);
  for (int i = 0; i < 1000; ++i) {
    o.access_counted(Op::Read, uniform_below(rng, 12));
    if (!o.check_invariants()) return false;
  }
  return true;
}

bool sgx_tamper() {
  ctr::SgxMemory mem({}, 256, 3);
  DataBlock d{};
  d[0] = 42;
  mem.write(9, d);
  mem.flush_caches();
  if (mem.read(9).data != d) return false;
  mem.raw_ciphertext(9)[5] ^= 0x10;
  mem.flush_caches();
  return !mem.read(9).intact;
}

}  // namespace

bool run_selftest(std::ostream& out) {
  const std::vector<std::pair<std::string, std::function<bool()>>> checks = {
      {"codec roundtrip", codec_roundtrip},
      {"codec tamper detection", codec_tamper},
      {"secrecy enumeration", secrecy},
      {"security figures", security_figures},
      {"ssm transaction shape", ssm_shape},
      {"path oram invariant", oram_invariant},
      {"sgx tamper detection", sgx_tamper},
  };
  bool all = true;
  for (const auto& [name, check] : checks) {
    bool ok = false;
    try {
      ok = check();
    } catch (const std::exception& e) {
      out << "error in " << name << ": " << e.what() << '\n';
    }
    out << (ok ? "PASS " : "FAIL ") << name << '\n';
    all = all && ok;
  }
  return all;
}

}  // namespace ssmsim
