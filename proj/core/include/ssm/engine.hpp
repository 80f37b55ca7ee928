#pragma once

// Backend-neutral trace replay and the timing model.
//
// Per logical op:
//   ns = ceil((reads + writes) / parallel_width) * block_access_ns
//      + segmentations * segmentation_ns + reconstructions * reconstruction_ns
//      + aes_ops * aes_ns

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ssm/codec.hpp"
#include "ssm/transaction.hpp"
#include "ssm/workloads.hpp"

namespace ssm {

struct TimingConfig {
  double block_access_ns = 50.0;
  std::uint32_t parallel_width = 8;
  double segmentation_ns = 19.0;
  double reconstruction_ns = 60.0;
  double aes_ns = 40.0 / 3.0;

  void validate() const;
};

struct OpCost {
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
  std::uint64_t segmentations = 0;
  std::uint64_t reconstructions = 0;
  std::uint64_t aes_ops = 0;

  std::uint64_t transactions() const noexcept { return reads + writes; }
};

double op_time_ns(const OpCost& cost, const TimingConfig& timing);

struct OpOutcome {
  OpCost cost;
  DataBlock data{};
  bool intact = true;
};

/// Counters a backend reports beyond per-op costs.
struct BackendCounters {
  std::uint64_t stash_hits = 0;
  std::uint64_t shuffles = 0;
  std::uint64_t tamper_alarms = 0;
  std::uint64_t map_bytes = 0;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string name() const = 0;
  virtual std::uint64_t logical_blocks() const = 0;
  /// `data` is required for writes.
  virtual OpOutcome handle(Op op, std::uint64_t addr, const DataBlock* data) = 0;
  virtual BackendCounters counters() const = 0;
};

struct StatsReport {
  std::string trace;
  std::string backend;
  std::uint64_t logical_ops = 0;
  std::uint64_t reads = 0;   // logical
  std::uint64_t writes = 0;  // logical
  std::uint64_t block_reads = 0;
  std::uint64_t block_writes = 0;
  std::uint64_t stash_hits = 0;
  std::uint64_t shuffles = 0;
  std::uint64_t tamper_alarms = 0;
  std::uint64_t map_bytes = 0;
  std::uint64_t segmentations = 0;
  std::uint64_t reconstructions = 0;
  std::uint64_t aes_ops = 0;
  double simulated_ns = 0.0;
  double normalized_time = 0.0;  // vs NP on the same trace; 0 until normalized
};

/// Deterministic payload for the index-th write of a run.
DataBlock write_payload(std::uint64_t seed, std::uint64_t index);

/// Replays `events` through `backend`. Writes carry write_payload(seed, i).
/// Throws TraceError (with the event's source line, or its index + 1 for
/// generated traces) when an address is outside the backend's geometry.
StatsReport run_trace(std::span<const AccessEvent> events, Backend& backend,
                      const TimingConfig& timing, const std::string& trace_name,
                      std::uint64_t seed);

/// Sets normalized_time = simulated_ns / np_ns; an empty trace normalizes to 1.
void normalize(StatsReport& report, double np_ns);

/// CSV columns:
/// trace,backend,logical_ops,reads,writes,block_reads,block_writes,stash_hits,
/// shuffles,tamper_alarms,map_bytes,simulated_ns,normalized_time
std::string csv_header();
std::string csv_row(const StatsReport& r);
void write_csv(std::ostream& out, std::span<const StatsReport> rows);

}  // namespace ssm
