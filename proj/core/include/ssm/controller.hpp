#pragma once

// SSM memory controller: map lookup, combination selection, dummy fetches,
// reconstruction with integrity check, share shuffling and write-back.
//
// Every access fetches exactly t+d physical blocks ("frames") and writes the
// same t+d frames back. Fetched shares enter the stash; after the request is
// served the stash is drained into the frames down to its low watermark.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "ssm/codec.hpp"
#include "ssm/layout.hpp"
#include "ssm/memory.hpp"
#include "ssm/pathoram.hpp"
#include "ssm/stash.hpp"
#include "ssm/transaction.hpp"

namespace ssm {

struct SsmConfig {
  CodecParams codec;
  GeometryConfig geom;
  StashConfig stash;
  std::uint32_t dummies = 16;           // d
  bool op_type_protection = false;      // SSM Plus: every access regenerates K shares
  bool oram_backend = false;            // SSM+: frames accessed through Path ORAM
  oram::OramConfig oram;
  std::uint32_t max_dummy_redraws = 64;

  std::uint32_t frames_per_access() const noexcept { return codec.threshold + dummies; }
  void validate() const;
};

struct AccessResult {
  DataBlock data{};
  bool intact = true;
  std::optional<std::uint64_t> tamper_addr;  // set on integrity failure
  TransactionLog transactions;               // frame-level: t+d READs then t+d WRITEs
  std::uint64_t bus_reads = 0;               // memory-level, includes ORAM path traffic
  std::uint64_t bus_writes = 0;
  std::uint32_t segmentations = 0;
  std::uint32_t reconstructions = 0;
  std::uint32_t stash_hits = 0;              // target shares served from the stash
  std::vector<std::uint32_t> real_ordinals;  // shares fetched from memory for this block
  std::uint32_t real_from_memory = 0;
  std::vector<std::uint32_t> selected_ordinals;  // the t shares reconstructed from (reads)
  std::uint32_t shares_placed = 0;
};

struct ControllerStats {
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
  std::uint64_t stash_hits = 0;
  std::uint64_t shuffles = 0;       // rounds that placed at least one share
  std::uint64_t shuffle_pressure = 0;  // rounds whose first dummy draw hit the high watermark
  std::uint64_t dummy_redraws = 0;
  std::uint64_t tamper_alarms = 0;
  std::uint64_t bus_reads = 0;
  std::uint64_t bus_writes = 0;
  std::uint64_t segmentations = 0;
  std::uint64_t reconstructions = 0;
};

/// Shares picked for one shuffle round and where they go.
struct ShufflePlan {
  std::vector<ShareMove> moves;
  std::vector<Share> shares;  // parallel to moves
};

/// Takes `place_count` uniformly random stash entries and assigns them to
/// uniformly random slots of the (empty) `frames`, never putting two shares
/// of one logical block in the same frame. Entries that cannot be placed go
/// back to the stash.
ShufflePlan plan_shuffle(Stash& stash, std::span<const std::uint64_t> frames,
                         std::uint32_t slots_per_frame, std::size_t place_count, Rng& rng);

class SsmController {
 public:
  /// Lays out every logical block as the all-zero block with write counter 0.
  SsmController(const SsmConfig& cfg, std::uint64_t seed);

  AccessResult read(std::uint64_t addr);
  AccessResult write(std::uint64_t addr, const DataBlock& data);
  /// Read or write processed as both; requires op_type_protection.
  AccessResult access_plus(Op op, std::uint64_t addr, const DataBlock* data);
  /// Dispatches on op_type_protection.
  AccessResult access(Op op, std::uint64_t addr, const DataBlock* data);

  const SsmConfig& config() const noexcept { return cfg_; }
  const SsmMap& map() const noexcept { return map_; }
  const Stash& stash() const noexcept { return stash_; }
  PhysicalMemory& memory() noexcept { return memory_; }
  const PhysicalMemory& memory() const noexcept { return memory_; }
  const ControllerStats& stats() const noexcept { return stats_; }
  std::uint64_t write_counter(std::uint64_t addr) const;
  SeedContext seed_context(std::uint64_t addr) const;
  const oram::PathOram* oram() const noexcept { return oram_.get(); }

  /// Current K shares of `addr` wherever they live (memory bytes or stash),
  /// ordered by ordinal. No transactions, no stats.
  std::vector<Share> current_shares(std::uint64_t addr) const;

 private:
  struct Projection {
    std::uint64_t end_entries = 0;
    std::size_t place_count = 0;
  };

  AccessResult round(Op op, std::uint64_t addr, const DataBlock* data, bool regenerate,
                     bool read_style_selection);
  Projection project(std::span<const std::uint64_t> frames, std::uint64_t addr,
                     bool regenerate) const;
  void draw_dummies(std::vector<std::uint64_t>& frames, std::size_t real_count);
  void fetch_frame(std::uint64_t frame, AccessResult& result, std::vector<StashEntry>& entries,
                   std::vector<ShareMove>& moves);
  void write_frame(std::uint64_t frame, std::span<const ShareMove> moves,
                   std::span<const Share> shares, AccessResult& result);

  SsmConfig cfg_;
  Rng rng_;
  SeedKey key_;
  SsmMap map_;
  PhysicalMemory memory_;
  Stash stash_;
  std::vector<std::uint64_t> counters_;
  std::unique_ptr<oram::PathOram> oram_;
  ControllerStats stats_;
};

}  // namespace ssm
