#include "ssm/engine.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "ssm/errors.hpp"
#include "ssm/mix.hpp"

namespace ssm {

void TimingConfig::validate() const {
  if (parallel_width == 0) throw ConfigError("timing: parallel width must be at least 1");
  for (const double v : {block_access_ns, segmentation_ns, reconstruction_ns, aes_ns}) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("timing: latencies must be nonnegative");
  }
}

double op_time_ns(const OpCost& cost, const TimingConfig& timing) {
  const std::uint64_t waves = (cost.transactions() + timing.parallel_width - 1) / timing.parallel_width;
  return static_cast<double>(waves) * timing.block_access_ns +
         static_cast<double>(cost.segmentations) * timing.segmentation_ns +
         static_cast<double>(cost.reconstructions) * timing.reconstruction_ns +
         static_cast<double>(cost.aes_ops) * timing.aes_ns;
}

DataBlock write_payload(std::uint64_t seed, std::uint64_t index) {
  DataBlock out;
  const std::uint64_t base = mix_absorb(mix64(seed), 0x7772697465, index);
  for (std::size_t w = 0; w < kBlockBytes / 8; ++w) {
    std::uint64_t v = mix64(base + w);
    for (std::size_t b = 0; b < 8; ++b, v >>= 8) out[w * 8 + b] = static_cast<std::uint8_t>(v);
  }
  return out;
}

StatsReport run_trace(std::span<const AccessEvent> events, Backend& backend,
                      const TimingConfig& timing, const std::string& trace_name,
                      std::uint64_t seed) {
  timing.validate();
  StatsReport r;
  r.trace = trace_name;
  r.backend = backend.name();
  const std::uint64_t limit = backend.logical_blocks();
  for (std::size_t i = 0; i < events.size(); ++i) {
    const AccessEvent& ev = events[i];
    if (ev.addr >= limit) {
      throw TraceError(ev.line != 0 ? ev.line : i + 1,
                       "block " + std::to_string(ev.addr) + " outside " +
                           std::to_string(limit) + " logical blocks");
    }
    OpOutcome out;
    if (ev.op == Op::Write) {
      const DataBlock payload = write_payload(seed, i);
      out = backend.handle(Op::Write, ev.addr, &payload);
      ++r.writes;
    } else {
      out = backend.handle(Op::Read, ev.addr, nullptr);
      ++r.reads;
    }
    ++r.logical_ops;
    r.block_reads += out.cost.reads;
    r.block_writes += out.cost.writes;
    r.segmentations += out.cost.segmentations;
    r.reconstructions += out.cost.reconstructions;
    r.aes_ops += out.cost.aes_ops;
    r.simulated_ns += op_time_ns(out.cost, timing);
  }
  const BackendCounters c = backend.counters();
  r.stash_hits = c.stash_hits;
  r.shuffles = c.shuffles;
  r.tamper_alarms = c.tamper_alarms;
  r.map_bytes = c.map_bytes;
  return r;
}

void normalize(StatsReport& report, double np_ns) {
  if (np_ns <= 0.0) {
    report.normalized_time = 1.0;
    return;
  }
  report.normalized_time = report.simulated_ns / np_ns;
}

std::string csv_header() {
  return "trace,backend,logical_ops,reads,writes,block_reads,block_writes,stash_hits,shuffles,"
         "tamper_alarms,map_bytes,simulated_ns,normalized_time";
}

std::string csv_row(const StatsReport& r) {
  char nums[128];
  std::snprintf(nums, sizeof nums, "%.3f,%.6f", r.simulated_ns, r.normalized_time);
  return r.trace + ',' + r.backend + ',' + std::to_string(r.logical_ops) + ',' +
         std::to_string(r.reads) + ',' + std::to_string(r.writes) + ',' +
         std::to_string(r.block_reads) + ',' + std::to_string(r.block_writes) + ',' +
         std::to_string(r.stash_hits) + ',' + std::to_string(r.shuffles) + ',' +
         std::to_string(r.tamper_alarms) + ',' + std::to_string(r.map_bytes) + ',' + nums;
}

void write_csv(std::ostream& out, std::span<const StatsReport> rows) {
  out << csv_header() << '\n';
  for (const auto& r : rows) out << csv_row(r) << '\n';
}

}  // namespace ssm
