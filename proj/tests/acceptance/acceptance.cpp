// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <boost/math/distributions/chi_squared.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ssm/analysis.hpp"
#include "ssm/backends.hpp"
#include "ssm/codec.hpp"
#include "ssm/controller.hpp"
#include "ssm/experiment.hpp"
#include "ssm/pathoram.hpp"
#include "ssm/random.hpp"

namespace {

using namespace ssm;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

DataBlock random_block(Rng& rng, std::size_t payload = kBlockBytes) {
  DataBlock b{};
  for (std::size_t i = 0; i < payload; ++i) b[i] = static_cast<std::uint8_t>(rng());
  return b;
}

SeedContext random_context(Rng& rng) { return {{rng(), rng()}, rng() % 4096, rng() % 1000}; }

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double chi_square_p(const std::vector<double>& hist) {
  double total = 0;
  for (double h : hist) total += h;
  const double expected = total / static_cast<double>(hist.size());
  double chi2 = 0;
  for (double h : hist) chi2 += (h - expected) * (h - expected) / expected;
  const boost::math::chi_squared dist(static_cast<double>(hist.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, chi2));
}

// Codec roundtrip over random t-subsets and every subset of a small code.
Verdict ac1() {
  const auto t0 = Clock::now();
  Rng rng(101);
  const CodecParams params;
  std::uint64_t failures = 0;
  for (int i = 0; i < 10000; ++i) {
    const DataBlock block = random_block(rng);
    const SeedContext ctx = random_context(rng);
    auto shares = segment_block(block, params, ctx, rng);
    partial_shuffle(std::span(shares), params.threshold, rng);
    const auto rec = reconstruct(std::span(shares).first(params.threshold), params, ctx);
    failures += !(rec.intact && rec.data == block);
  }

  CodecParams small;
  small.shares = 6;
  small.threshold = 3;
  small.segments = 2;
  small.seed_coeffs = 1;
  std::uint64_t subsets = 0;
  for (int i = 0; i < 100; ++i) {
    const DataBlock block = random_block(rng, small.payload_bytes());
    const SeedContext ctx = random_context(rng);
    const auto shares = segment_block(block, small, ctx, rng);
    for (std::uint32_t a = 0; a < 6; ++a) {
      for (std::uint32_t b = a + 1; b < 6; ++b) {
        for (std::uint32_t c = b + 1; c < 6; ++c) {
          const std::vector<Share> pick{shares[a], shares[b], shares[c]};
          const auto rec = reconstruct(pick, small, ctx);
          failures += !(rec.intact && rec.data == block);
          if (i == 0) ++subsets;
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  return {failures == 0 && subsets == 20 && secs < 30,
          fmt("%.0f failures, %.0f subsets at K=6 t=3, %.1fs", double(failures), double(subsets), secs)};
}

Verdict ac2() {
  const auto t0 = Clock::now();
  analysis::SecrecyParams two{4, 2, false};
  analysis::SecrecyParams three{4, 3, false};
  const auto a = analysis::secrecy_exhaustive(two);
  const auto b = analysis::secrecy_exhaustive(three);
  const double secs = seconds_since(t0);
  return {a.pass && b.pass && secs < 60,
          std::string("t=2 ") + (a.pass ? "PASS" : "FAIL") + ", t=3 " + (b.pass ? "PASS" : "FAIL") +
              fmt(", %.1fs", secs)};
}

// Integrity: codec-level bit flips and stale-counter replays, plus the same
// attacks through the controller.
Verdict ac3() {
  Rng rng(303);
  const CodecParams params;
  std::uint64_t flips = 0, flip_alarms = 0;
  for (int i = 0; i < 10000; ++i) {
    const DataBlock block = random_block(rng);
    const SeedContext ctx = random_context(rng);
    auto shares = segment_block(block, params, ctx, rng);
    shares.resize(params.threshold);
    const auto victim = uniform_below(rng, params.threshold);
    const auto bit = uniform_below(rng, 128);
    FieldElem& word = bit < 64 ? shares[victim].x : shares[victim].y;
    word = word + FieldElem{std::uint64_t{1} << (bit % 64)};
    ++flips;
    try {
      flip_alarms += !reconstruct(shares, params, ctx).intact;
    } catch (const DomainError&) {
      ++flip_alarms;
    }
  }

  std::uint64_t replays = 0, replay_alarms = 0;
  for (int i = 0; i < 1000; ++i) {
    const DataBlock old_block = random_block(rng);
    SeedContext ctx = random_context(rng);
    auto stale = segment_block(old_block, params, ctx, rng);
    stale.resize(params.threshold);
    ctx.write_counter += 1 + uniform_below(rng, 5);
    ++replays;
    replay_alarms += !reconstruct(stale, params, ctx).intact;
  }

  SsmConfig cfg;
  cfg.geom.logical_blocks = 256;
  SsmController ctl(cfg, 304);
  std::uint64_t ctl_checked = 0, ctl_alarms = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::uint64_t a = uniform_below(rng, 256);
    if (trial % 2 == 0) {
      for (const auto& loc : ctl.map().lookup(a)) {
        if (loc.in_stash()) continue;
        const auto bit = uniform_below(rng, 8 * kShareBytes);
        ctl.memory().raw(loc.block)[loc.slot * kShareBytes + bit / 8] ^=
            static_cast<std::uint8_t>(1u << (bit % 8));
      }
    } else {
      const auto stale = ctl.current_shares(a);
      ctl.write(a, random_block(rng));
      for (int i = 0; i < 64; ++i) {
        std::uint32_t stashed = 0;
        for (const auto& loc : ctl.map().lookup(a)) stashed += loc.in_stash();
        if (stashed < cfg.codec.threshold) break;
        ctl.read((a + 1 + uniform_below(rng, 255)) % 256);
      }
      const auto locs = ctl.map().lookup(a);
      for (std::uint32_t j = 0; j < locs.size(); ++j) {
        if (locs[j].in_stash()) continue;
        stale[j].serialize(ctl.memory()
                               .raw(locs[j].block)
                               .subspan(locs[j].slot * kShareBytes)
                               .first<kShareBytes>());
      }
    }
    const auto r = ctl.read(a);
    if (r.real_from_memory > 0) {
      ++ctl_checked;
      ctl_alarms += !r.intact;
    }
    ctl.write(a, DataBlock{});
  }

  const bool pass = flip_alarms == flips && replay_alarms == replays && ctl_alarms == ctl_checked;
  return {pass, fmt("bit flips %.0f/%.0f, ", double(flip_alarms), double(flips)) +
                    fmt("replays %.0f/%.0f, ", double(replay_alarms), double(replays)) +
                    fmt("controller %.0f/%.0f", double(ctl_alarms), double(ctl_checked))};
}

Verdict ac4() {
  const auto p = analysis::p1({});
  const double rel = std::abs(p.value / 2.65e-23 - 1.0);
  std::uint64_t checked = 0, mismatched = 0;
  for (std::uint64_t total = 64; total <= 10000; total += 368) {
    for (std::uint64_t k : {2ull, 4ull, 8ull, 16ull, 32ull}) {
      for (std::uint64_t t = 1; t <= 16 && t <= total / k; t += 3) {
        analysis::SecurityParams sp;
        sp.total = total;
        sp.k = k;
        sp.t = t;
        // Independent product form: K * prod (m-i)/(Total-i).
        const std::uint64_t m = total / k;
        analysis::BigInt num = k, den = 1;
        for (std::uint64_t i = 0; i < t; ++i) {
          num *= m - i;
          den *= total - i;
        }
        const double exact = static_cast<double>(analysis::Rational(num, den));
        const double got = analysis::p1(sp).value;
        ++checked;
        mismatched += std::abs(got - exact) > 5e-11 * exact;
      }
    }
  }
  return {rel <= 0.05 && mismatched == 0 && checked > 0,
          fmt("p1 = %.4e (%.2f%% from 2.65e-23), ", p.value, rel * 100) +
              fmt("%.0f/%.0f small cases to 10 digits", double(checked - mismatched), double(checked))};
}

Verdict ac5() {
  const auto c = analysis::comb(32, 16);
  return {c == 601080390, "comb(32,16) = " + c.str()};
}

struct CheckedRun {
  std::string name;
  StatsReport report;
  std::uint64_t bad_ops = 0;
};

// Replays the trace op by op, counting ops whose transaction count differs
// from the expected (reads, writes) when one is given.
CheckedRun checked_run(const std::string& name, const ExperimentConfig& cfg,
                       const std::vector<AccessEvent>& events, std::uint64_t want_reads,
                       std::uint64_t want_writes) {
  auto backend = make_backend(name, cfg);
  CheckedRun out;
  out.name = name;
  auto& r = out.report;
  r.backend = name;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const DataBlock payload = write_payload(cfg.seed, i);
    const auto o = backend->handle(events[i].op, events[i].addr,
                                   events[i].op == Op::Write ? &payload : nullptr);
    if (want_reads != 0 && (o.cost.reads != want_reads || o.cost.writes != want_writes)) ++out.bad_ops;
    ++r.logical_ops;
    r.block_reads += o.cost.reads;
    r.block_writes += o.cost.writes;
    r.simulated_ns += op_time_ns(o.cost, cfg.timing);
  }
  return out;
}

std::map<std::string, CheckedRun> big_runs() {
  ExperimentConfig cfg;
  cfg.trace.kind = TraceKind::Rand;
  cfg.trace.count = 100000;
  cfg.seed = 909;
  cfg.trace.seed = cfg.seed;
  const auto events = make_trace(cfg);
  const std::uint64_t path = cfg.oram.path_slots();
  const std::uint64_t frames = cfg.ssm.frames_per_access();
  const std::vector<std::tuple<std::string, std::uint64_t, std::uint64_t>> jobs = {
      {"np", 1, 0},
      {"ssm", frames, frames},
      {"ssm-plus", frames, frames},
      {"pathoram", path, path},
      {"sgx-pathoram", 0, 0},
      {"ssm-oram", frames * path, frames * path},
  };
  std::vector<std::future<CheckedRun>> futures;
  for (const auto& [name, r, w] : jobs) {
    futures.push_back(std::async(std::launch::async, checked_run, name, std::cref(cfg),
                                 std::cref(events), r, w));
  }
  std::map<std::string, CheckedRun> runs;
  for (auto& f : futures) {
    auto run = f.get();
    runs[run.name] = std::move(run);
  }
  return runs;
}

Verdict ac6(const std::map<std::string, CheckedRun>& runs) {
  const auto& ssm = runs.at("ssm");
  const auto& oram = runs.at("pathoram");
  const auto& plus = runs.at("ssm-oram");
  const std::uint64_t n = ssm.report.logical_ops;
  const bool pass = n == 100000 && ssm.bad_ops == 0 && oram.bad_ops == 0 && plus.bad_ops == 0 &&
                    ssm.report.block_reads == 32 * n && oram.report.block_reads == 108 * n &&
                    plus.report.block_reads == 32 * 108 * n && plus.report.block_writes == 32 * 108 * n;
  return {pass, fmt("per-op mismatches: ssm %.0f, pathoram %.0f, ", double(ssm.bad_ops),
                    double(oram.bad_ops)) +
                    fmt("ssm-oram %.0f; ", double(plus.bad_ops)) +
                    fmt("reads/op %.0f, %.0f, %.0f", double(ssm.report.block_reads) / n,
                        double(oram.report.block_reads) / n, double(plus.report.block_reads) / n)};
}

// Obfuscation: physical READ histogram under a sequential trace, and how often
// each share ordinal is among the t used to reconstruct.
Verdict ac7() {
  SsmConfig cfg;
  SsmController ctl(cfg, 707);
  TraceSpec spec;
  spec.kind = TraceKind::Seq;
  spec.count = 100000;
  spec.seed = 707;
  const auto events = gen_trace(spec, cfg.geom.logical_blocks);
  std::vector<double> hist(ctl.map().physical_blocks(), 0.0);
  std::vector<double> picked(cfg.codec.shares, 0.0);
  double reads = 0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const DataBlock payload = write_payload(spec.seed, i);
    const auto r = events[i].op == Op::Read ? ctl.read(events[i].addr)
                                            : ctl.write(events[i].addr, payload);
    for (const auto& t : r.transactions) {
      if (t.op == Op::Read) hist[t.block] += 1;
    }
    if (events[i].op == Op::Read) {
      reads += 1;
      for (const auto j : r.selected_ordinals) picked[j] += 1;
    }
  }
  const double p_value = chi_square_p(hist);
  const double q = double(cfg.codec.threshold) / cfg.codec.shares;
  const double sigma = std::sqrt(q * (1 - q) / reads);
  double worst = 0;
  for (double c : picked) worst = std::max(worst, std::abs(c / reads - q) / sigma);
  return {p_value > 0.01 && worst <= 3.0,
          fmt("chi-square p = %.3f over %.0f blocks, ", p_value, double(hist.size())) +
              fmt("worst ordinal deviation %.2f sigma from %.3f", worst, q)};
}

Verdict ac8() {
  oram::OramConfig toy;
  toy.levels = 4;
  Rng rng(808);
  const std::uint64_t toy_blocks = toy.max_real_blocks();
  oram::PathOram small(toy, toy_blocks, rng);
  std::uint64_t violations = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto b = uniform_below(rng, toy_blocks);
    const DataBlock d = random_block(rng);
    small.access(i % 2 ? Op::Read : Op::Write, b, &d);
    violations += !small.check_invariants();
  }

  const oram::OramConfig defaults;
  const std::uint64_t blocks = std::uint64_t{1} << 20;
  oram::PathOram big(defaults, blocks, rng, false);
  std::uint64_t overflows = 0;
  for (int i = 0; i < 1000000; ++i) {
    try {
      big.access_counted(Op::Read, uniform_below(rng, blocks));
    } catch (const StashOverflow&) {
      ++overflows;
    }
  }
  overflows = std::max(overflows, big.stats().stash_overflows);
  return {violations == 0 && overflows == 0,
          fmt("L=4: %.0f invariant violations over %.0f blocks; ", double(violations), double(toy_blocks)) +
              fmt("defaults: %.0f overflows in 1e6 accesses, peak stash %.0f blocks",
                  double(overflows), double(big.stats().max_stash_blocks))};
}

Verdict ac9(const std::map<std::string, CheckedRun>& runs, double secs) {
  const double np = runs.at("np").report.simulated_ns;
  const double ssm = runs.at("ssm").report.simulated_ns;
  const double sgx_oram = runs.at("sgx-pathoram").report.simulated_ns;
  const double plus = runs.at("ssm-oram").report.simulated_ns;
  const double np_norm = np / np;
  const bool pass = np < ssm && ssm < sgx_oram && plus < sgx_oram && np_norm == 1.0 && secs < 300;
  return {pass, fmt("normalized: ssm %.2f, sgx-pathoram %.2f, ", ssm / np, sgx_oram / np) +
                    fmt("ssm-oram %.2f (ssm-plus %.2f); ", plus / np,
                        runs.at("ssm-plus").report.simulated_ns / np) +
                    fmt("%.0fs", secs)};
}

Verdict ac10() {
  ExperimentConfig cfg;
  cfg.trace.count = 5000;
  cfg.seed = 1010;
  cfg.trace.seed = cfg.seed;
  std::vector<std::string> names;
  for (const auto& n : backend_names()) {
    if (n != "ssm-oram") names.push_back(n);
  }
  std::string first;
  bool same = true;
  for (int round = 0; round < 2; ++round) {
    const auto events = make_trace(cfg);
    std::ostringstream out;
    write_csv(out, compare(cfg, events, names));
    if (round == 0) first = out.str();
    else same = first == out.str();
  }
  cfg.trace.count = 300;
  std::string plus[2];
  for (auto& s : plus) {
    std::ostringstream out;
    write_csv(out, compare(cfg, make_trace(cfg), {"ssm-oram"}));
    s = out.str();
  }
  same = same && plus[0] == plus[1];
  return {same, same ? "identical CSV for every backend" : "CSV differs between runs"};
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<Verdict()>>> checks;
  std::map<std::string, CheckedRun> runs;
  double run_secs = 0;
  auto ensure_runs = [&] {
    if (runs.empty()) {
      const auto t0 = Clock::now();
      runs = big_runs();
      run_secs = seconds_since(t0);
    }
  };
  checks.emplace_back("AC1 codec roundtrip", ac1);
  checks.emplace_back("AC2 secrecy oracle", ac2);
  checks.emplace_back("AC3 integrity and replay", ac3);
  checks.emplace_back("AC4 p1 figure", ac4);
  checks.emplace_back("AC5 combination count", ac5);
  checks.emplace_back("AC6 transaction shape", [&] {
    ensure_runs();
    return ac6(runs);
  });
  checks.emplace_back("AC7 obfuscation", ac7);
  checks.emplace_back("AC8 path oram invariant", ac8);
  checks.emplace_back("AC9 directional performance", [&] {
    ensure_runs();
    return ac9(runs, run_secs);
  });
  checks.emplace_back("AC10 determinism", ac10);

  int failed = 0;
  for (const auto& [name, check] : checks) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str());
    std::fflush(stdout);
    failed += !v.pass;
  }
  return failed == 0 ? 0 : 1;
}
