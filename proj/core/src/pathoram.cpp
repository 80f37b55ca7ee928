#include "ssm/pathoram.hpp"

#include <algorithm>
#include <string>

#include "ssm/errors.hpp"
#include "ssm/random.hpp"

namespace ssm::oram {
namespace {

// Trees up to this height keep buckets in a flat vector; taller ones are
// sparse (untouched buckets are implicitly empty).
constexpr std::uint32_t kDenseMaxLevels = 18;

}  // namespace

void OramConfig::validate() const {
  if (levels < 1 || levels > 48) throw ConfigError("oram: L must be in [1, 48]");
  if (bucket_size < 1 || bucket_size > kMaxBucketSize) {
    throw ConfigError("oram: Z must be in [1, 8]");
  }
  if (!(utilization > 0.0 && utilization <= 1.0)) throw ConfigError("oram: utilization in (0, 1]");
  if (block_bytes == 0 || stash_bytes < block_bytes) throw ConfigError("oram: stash too small");
}

std::uint64_t OramConfig::max_real_blocks() const noexcept {
  return static_cast<std::uint64_t>(utilization * static_cast<double>(slots()));
}

PathOram::PathOram(const OramConfig& cfg, std::uint64_t blocks, Rng& rng, bool with_payload)
    : cfg_(cfg), rng_(rng()), dense_(cfg.levels <= kDenseMaxLevels) {
  cfg_.validate();
  if (blocks > cfg_.max_real_blocks()) {
    throw ConfigError("oram: " + std::to_string(blocks) + " blocks exceed utilization capacity");
  }
  if (dense_) dense_buckets_.resize(cfg_.buckets());
  position_.resize(blocks);
  if (with_payload) payload_.resize(blocks);

  for (std::uint64_t b = 0; b < blocks; ++b) {
    const std::uint64_t leaf = uniform_below(rng_, cfg_.leaves());
    position_[b] = leaf;
    bool placed = false;
    for (std::uint32_t level = cfg_.levels; level-- > 0 && !placed;) {
      Bucket& bk = bucket(path_bucket(leaf, level));
      if (bk.count < cfg_.bucket_size) {
        bk.ids[bk.count++] = b;
        placed = true;
      }
    }
    if (!placed) {
      if (stash_.size() >= cfg_.stash_blocks()) {
        throw ConfigError("oram: initial placement overflows the stash");
      }
      stash_.push_back(b);
    }
  }
}

PathOram::Bucket& PathOram::bucket(std::uint64_t id) {
  if (dense_) return dense_buckets_[id];
  return sparse_buckets_[id];
}

const PathOram::Bucket* PathOram::find_bucket(std::uint64_t id) const {
  if (dense_) return &dense_buckets_[id];
  const auto it = sparse_buckets_.find(id);
  return it == sparse_buckets_.end() ? nullptr : &it->second;
}

std::uint64_t PathOram::leaf_of(std::uint64_t block) const {
  if (block >= position_.size()) throw DomainError("oram: unknown block");
  return position_[block];
}

OramResult PathOram::access(Op op, std::uint64_t block, const DataBlock* data) {
  OramResult result;
  result.transactions.reserve(2 * cfg_.path_slots());
  run_access(op, block, data, result.data, &result.transactions);
  return result;
}

DataBlock PathOram::access_counted(Op op, std::uint64_t block, const DataBlock* data) {
  DataBlock out{};
  run_access(op, block, data, out, nullptr);
  return out;
}

void PathOram::run_access(Op op, std::uint64_t block, const DataBlock* data, DataBlock& out,
                          TransactionLog* log) {
  if (block >= position_.size()) {
    throw DomainError("oram: block " + std::to_string(block) + " is not mapped");
  }
  const std::uint64_t leaf = position_[block];
  const std::uint32_t z = cfg_.bucket_size;

  for (std::uint32_t level = 0; level < cfg_.levels; ++level) {
    const std::uint64_t id = path_bucket(leaf, level);
    if (log) {
      for (std::uint32_t j = 0; j < z; ++j) log->push_back({Op::Read, id * z + j});
    }
    if (dense_) {
      Bucket& bk = dense_buckets_[id];
      stash_.insert(stash_.end(), bk.ids.begin(), bk.ids.begin() + bk.count);
      bk.count = 0;
    } else if (auto it = sparse_buckets_.find(id); it != sparse_buckets_.end()) {
      stash_.insert(stash_.end(), it->second.ids.begin(), it->second.ids.begin() + it->second.count);
      sparse_buckets_.erase(it);
    }
  }
  stats_.block_reads += cfg_.path_slots();

  position_[block] = uniform_below(rng_, cfg_.leaves());
  if (!payload_.empty()) {
    if (op == Op::Write && data) payload_[block] = *data;
    out = payload_[block];
  }

  for (std::uint32_t level = cfg_.levels; level-- > 0;) {
    const std::uint32_t shift = cfg_.levels - 1 - level;
    const std::uint64_t prefix = leaf >> shift;
    Bucket placed;
    for (std::size_t i = 0; i < stash_.size() && placed.count < z;) {
      if ((position_[stash_[i]] >> shift) == prefix) {
        placed.ids[placed.count++] = stash_[i];
        stash_[i] = stash_.back();
        stash_.pop_back();
      } else {
        ++i;
      }
    }
    const std::uint64_t id = path_bucket(leaf, level);
    if (placed.count > 0) bucket(id) = placed;
    if (log) {
      for (std::uint32_t j = 0; j < z; ++j) log->push_back({Op::Write, id * z + j});
    }
  }
  stats_.block_writes += cfg_.path_slots();
  ++stats_.accesses;
  stats_.max_stash_blocks = std::max<std::uint64_t>(stats_.max_stash_blocks, stash_.size());
  if (stash_.size() > cfg_.stash_blocks()) {
    ++stats_.stash_overflows;
    throw StashOverflow("oram: stash holds " + std::to_string(stash_.size()) +
                        " blocks, capacity " + std::to_string(cfg_.stash_blocks()));
  }
}

bool PathOram::check_invariants() const {
  std::vector<std::uint8_t> seen(position_.size(), 0);
  auto visit = [&](std::uint64_t id, const Bucket& bk) {
    // Recover the bucket's level and index from heap numbering.
    std::uint32_t level = 0;
    while (((std::uint64_t{2} << level) - 1) <= id) ++level;
    const std::uint64_t index = id - ((std::uint64_t{1} << level) - 1);
    for (std::uint8_t j = 0; j < bk.count; ++j) {
      const std::uint64_t b = bk.ids[j];
      if (b >= position_.size() || seen[b]++) return false;
      if ((position_[b] >> (cfg_.levels - 1 - level)) != index) return false;
    }
    return true;
  };
  if (dense_) {
    for (std::uint64_t id = 0; id < dense_buckets_.size(); ++id) {
      if (!visit(id, dense_buckets_[id])) return false;
    }
  } else {
    for (const auto& [id, bk] : sparse_buckets_) {
      if (!visit(id, bk)) return false;
    }
  }
  for (const std::uint64_t b : stash_) {
    if (b >= position_.size() || seen[b]++) return false;
  }
  return std::ranges::all_of(seen, [](std::uint8_t s) { return s == 1; });
}

}  // namespace ssm::oram
