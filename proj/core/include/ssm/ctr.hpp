#pragma once

// Counter-mode memory protection in the style of Intel SGX: per-block
// version numbers (VNs), MACs and a Merkle tree over VN blocks anchored in an
// on-chip root. Keyed mixing stands in for AES and the tree hash.
//
// Metadata layout: 8 VNs (or 8 MACs) per 64-byte metadata block. Tree level 0
// is the VN blocks; level i+1 has one node per 8 level-i nodes. Levels are
// added until a single node remains, and that node is the on-chip root (it is
// never read from or written to memory).

#include <cstdint>
#include <span>
#include <vector>

#include "ssm/codec.hpp"
#include "ssm/transaction.hpp"

namespace ssm::ctr {

struct CacheConfig {
  std::uint64_t bytes = 32768;
  std::uint32_t ways = 4;
  std::uint32_t line_bytes = 64;

  std::uint64_t sets() const noexcept { return bytes / (std::uint64_t{ways} * line_bytes); }
  void validate() const;
};

/// Set-associative tag store with LRU replacement. Tracks line ids only.
class SetAssocCache {
 public:
  explicit SetAssocCache(const CacheConfig& cfg);

  /// Returns true on hit; on miss the line is installed (evicting the LRU
  /// way of its set).
  bool access(std::uint64_t line);
  bool contains(std::uint64_t line) const;
  void clear();

  std::uint64_t hits() const noexcept { return hits_; }
  std::uint64_t misses() const noexcept { return misses_; }

 private:
  CacheConfig cfg_;
  // Per set: ways ordered most- to least-recently used.
  std::vector<std::vector<std::uint64_t>> sets_;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
};

struct CtrConfig {
  std::uint32_t vn_bits = 56;
  std::uint32_t mac_bits = 56;
  std::uint32_t tree_arity = 8;
  CacheConfig vn_cache;   // VN blocks and tree nodes
  CacheConfig mac_cache;
  std::uint32_t aes_latency_cycles = 40;
  double clock_ghz = 3.0;

  void validate() const;
  double aes_ns() const noexcept { return aes_latency_cycles / clock_ghz; }
  std::uint64_t max_vn() const noexcept { return (std::uint64_t{1} << vn_bits) - 1; }
};

enum class Region : std::uint8_t { Data, Mac, Vn, Tree };

/// One metadata-aware memory transfer. For Tree, `level` >= 1.
struct MetaTxn {
  Op op;
  Region region;
  std::uint32_t level;
  std::uint64_t index;

  friend bool operator==(const MetaTxn&, const MetaTxn&) = default;
};

using MetaLog = std::vector<MetaTxn>;

struct CtrCost {
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
  std::uint64_t aes_ops = 0;  // keystream, MAC and tree-hash computations
  std::uint64_t rekeys = 0;

  CtrCost& operator+=(const CtrCost& o) noexcept {
    reads += o.reads;
    writes += o.writes;
    aes_ops += o.aes_ops;
    rekeys += o.rekeys;
    return *this;
  }
};

/// Tree shape for a given number of protected data blocks.
class TreeGeometry {
 public:
  TreeGeometry(std::uint64_t data_blocks, std::uint32_t arity);

  std::uint64_t data_blocks() const noexcept { return data_blocks_; }
  std::uint32_t arity() const noexcept { return arity_; }
  /// Node counts per level; level 0 = VN blocks. The root is not included.
  std::span<const std::uint64_t> level_counts() const noexcept { return counts_; }
  std::uint32_t stored_levels() const noexcept { return static_cast<std::uint32_t>(counts_.size()); }
  /// Tree levels above the VN blocks that live in memory.
  std::uint32_t tree_levels() const noexcept { return stored_levels() - 1; }
  std::uint64_t vn_block(std::uint64_t addr) const noexcept { return addr / arity_; }

 private:
  std::uint64_t data_blocks_;
  std::uint32_t arity_;
  std::vector<std::uint64_t> counts_;
};

/// Transaction and crypto-op accounting for counter-mode protection, with no
/// per-block state beyond the metadata caches. Usable over very large
/// address spaces.
class MetadataModel {
 public:
  MetadataModel(const CtrConfig& cfg, std::uint64_t data_blocks);

  /// Data READ, then MAC and VN READs on cache misses, then one READ per tree
  /// level until a cached node or the root.
  CtrCost read(std::uint64_t addr, MetaLog* log = nullptr);
  /// Fetches missing metadata as in read, then writes data, MAC, VN and
  /// every stored tree level through to memory.
  CtrCost write(std::uint64_t addr, MetaLog* log = nullptr);

  /// Level 0 = VN block.
  bool node_cached(std::uint32_t level, std::uint64_t index) const;
  bool mac_cached(std::uint64_t addr) const;
  void flush_caches();

  const TreeGeometry& geometry() const noexcept { return geom_; }
  const CtrConfig& config() const noexcept { return cfg_; }

 private:
  CtrCost fetch_metadata(std::uint64_t addr, MetaLog* log);
  std::uint64_t node_line(std::uint32_t level, std::uint64_t index) const noexcept {
    return (std::uint64_t{level} << 56) | index;
  }

  CtrConfig cfg_;
  TreeGeometry geom_;
  SetAssocCache vn_cache_;
  SetAssocCache mac_cache_;
};

struct CtrReadResult {
  DataBlock data{};
  bool intact = true;
  CtrCost cost;
};

struct CtrStats {
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
  std::uint64_t tamper_alarms = 0;
  std::uint64_t rekeys = 0;
  std::uint64_t key_epoch = 0;
};

/// Functional SGX-style memory: encrypted blocks, VNs, MACs and tree tags in
/// (tamperable) memory, with the trusted on-chip view kept separately.
/// All blocks start as the zero block at VN 0.
class SgxMemory {
 public:
  struct Snapshot {
    DataBlock ciphertext;
    std::uint64_t vn;
    std::uint64_t mac;
  };

  SgxMemory(const CtrConfig& cfg, std::uint64_t data_blocks, std::uint64_t key_seed);

  CtrReadResult read(std::uint64_t addr, MetaLog* log = nullptr);
  CtrCost write(std::uint64_t addr, const DataBlock& data, MetaLog* log = nullptr);

  std::uint64_t vn(std::uint64_t addr) const;  // trusted value
  const CtrStats& stats() const noexcept { return stats_; }
  const MetadataModel& model() const noexcept { return model_; }
  std::uint64_t blocks() const noexcept { return ciphertext_.size(); }

  // Adversary / harness hooks. None of these log transactions.
  std::span<std::uint8_t, kBlockBytes> raw_ciphertext(std::uint64_t addr);
  std::uint64_t& raw_vn(std::uint64_t addr);
  std::uint64_t& raw_mac(std::uint64_t addr);
  /// Tag of tree node (level, index) as stored in its parent.
  std::uint64_t& raw_tag(std::uint32_t level, std::uint64_t index);
  Snapshot snapshot(std::uint64_t addr) const;
  void restore(std::uint64_t addr, const Snapshot& s);
  /// Drops on-chip cached metadata so the next access verifies from memory.
  void flush_caches() { model_.flush_caches(); }
  /// Sets a block's VN legitimately (memory and trusted view agree), e.g. to
  /// exercise counter saturation.
  void force_vn(std::uint64_t addr, std::uint64_t vn);

 private:
  std::uint64_t keystream(std::uint64_t addr, std::uint64_t vn, std::size_t word) const noexcept;
  std::uint64_t mac_of(std::uint64_t addr, std::uint64_t vn, const DataBlock& ct) const noexcept;
  std::uint64_t node_tag(std::uint32_t level, std::uint64_t index, bool trusted) const;
  DataBlock decrypt(std::uint64_t addr, std::uint64_t vn) const noexcept;
  void encrypt(std::uint64_t addr, std::uint64_t vn, const DataBlock& plain);
  void rebuild_tree();
  void rekey();
  void refresh_path(std::uint64_t addr);
  bool verify_vn_chain(std::uint64_t addr) const;
  void check(std::uint64_t addr) const;

  CtrConfig cfg_;
  MetadataModel model_;
  std::uint64_t key_;
  std::uint64_t epoch_ = 0;

  std::vector<DataBlock> ciphertext_;
  std::vector<std::uint64_t> vn_mem_, vn_trusted_;
  std::vector<std::uint64_t> mac_mem_, mac_trusted_;
  // tags_[l][i]: tag of node i at level l, stored in its parent.
  std::vector<std::vector<std::uint64_t>> tags_mem_, tags_trusted_;
  CtrStats stats_;
};

/// Non-protected passthrough: one transaction per access.
Transaction np_access(Op op, std::uint64_t addr);

}  // namespace ssm::ctr
