#pragma once

// Functional Path ORAM: binary bucket tree, position map and stash. Used as a
// standalone baseline and as the per-frame backend of SSM+.
//
// A tree of height L has L bucket levels (root = level 0), so one path is
// exactly L*Z block slots and there are 2^(L-1) leaves.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "ssm/codec.hpp"
#include "ssm/layout.hpp"
#include "ssm/transaction.hpp"

namespace ssm::oram {

inline constexpr std::uint32_t kMaxBucketSize = 8;

struct OramConfig {
  std::uint32_t levels = 27;       // L
  std::uint32_t bucket_size = 4;   // Z
  std::uint64_t stash_bytes = 32768;
  double utilization = 0.5;
  std::uint32_t block_bytes = 64;

  void validate() const;
  std::uint64_t leaves() const noexcept { return std::uint64_t{1} << (levels - 1); }
  std::uint64_t buckets() const noexcept { return (std::uint64_t{1} << levels) - 1; }
  std::uint64_t slots() const noexcept { return buckets() * bucket_size; }
  std::uint64_t path_slots() const noexcept { return std::uint64_t{levels} * bucket_size; }
  std::uint64_t stash_blocks() const noexcept { return stash_bytes / block_bytes; }
  std::uint64_t max_real_blocks() const noexcept;
};

struct OramResult {
  DataBlock data{};
  TransactionLog transactions;  // block = physical slot address bucket*Z + j
};

struct OramStats {
  std::uint64_t accesses = 0;
  std::uint64_t block_reads = 0;
  std::uint64_t block_writes = 0;
  std::uint64_t max_stash_blocks = 0;
  std::uint64_t stash_overflows = 0;
};

class PathOram {
 public:
  /// Assigns each of `blocks` a uniform leaf and places it as deep as
  /// possible on its path. `with_payload` keeps 64 bytes per block; without
  /// it the tree only tracks block positions. Throws ConfigError when
  /// `blocks` exceeds utilization * slots.
  PathOram(const OramConfig& cfg, std::uint64_t blocks, Rng& rng, bool with_payload = true);

  /// Reads the whole path of the block's leaf into the stash, serves or
  /// updates it, remaps it to a fresh uniform leaf and greedily writes the
  /// path back deepest-first. Exactly L*Z reads then L*Z writes. Throws
  /// StashOverflow (after recording it) if the stash exceeds its capacity.
  OramResult access(Op op, std::uint64_t block, const DataBlock* data = nullptr);

  /// As access() but only counts transactions instead of listing them.
  DataBlock access_counted(Op op, std::uint64_t block, const DataBlock* data = nullptr);

  std::uint64_t leaf_of(std::uint64_t block) const;
  std::uint64_t block_count() const noexcept { return position_.size(); }
  std::size_t stash_size() const noexcept { return stash_.size(); }
  const OramStats& stats() const noexcept { return stats_; }
  const OramConfig& config() const noexcept { return cfg_; }

  /// Every real block appears exactly once, either in the stash or in a
  /// bucket on the path to its mapped leaf.
  bool check_invariants() const;

  /// Bucket id at `level` on the path to `leaf` (heap numbering, root 0).
  std::uint64_t path_bucket(std::uint64_t leaf, std::uint32_t level) const noexcept {
    return ((std::uint64_t{1} << level) - 1) + (leaf >> (cfg_.levels - 1 - level));
  }

 private:
  struct Bucket {
    std::uint8_t count = 0;
    std::array<std::uint64_t, kMaxBucketSize> ids{};
  };

  Bucket& bucket(std::uint64_t id);
  const Bucket* find_bucket(std::uint64_t id) const;
  void run_access(Op op, std::uint64_t block, const DataBlock* data, DataBlock& out,
                  TransactionLog* log);

  OramConfig cfg_;
  Rng rng_;
  bool dense_;
  std::vector<Bucket> dense_buckets_;
  std::unordered_map<std::uint64_t, Bucket> sparse_buckets_;
  std::vector<std::uint64_t> position_;
  std::vector<DataBlock> payload_;
  std::vector<std::uint64_t> stash_;
  OramStats stats_;
};

}  // namespace ssm::oram
