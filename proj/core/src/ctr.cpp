#include "ssm/ctr.hpp"

#include <algorithm>

#include "ssm/errors.hpp"
#include "ssm/mix.hpp"

namespace ssm::ctr {

void CacheConfig::validate() const {
  if (ways == 0 || line_bytes == 0 || bytes % (std::uint64_t{ways} * line_bytes) != 0 ||
      sets() == 0) {
    throw ConfigError("cache: size must be a positive multiple of ways * line size");
  }
}

SetAssocCache::SetAssocCache(const CacheConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  sets_.resize(cfg_.sets());
}

bool SetAssocCache::access(std::uint64_t line) {
  auto& set = sets_[mix64(line) % sets_.size()];
  const auto it = std::ranges::find(set, line);
  if (it != set.end()) {
    std::rotate(set.begin(), it, it + 1);
    ++hits_;
    return true;
  }
  ++misses_;
  if (set.size() == cfg_.ways) set.pop_back();
  set.insert(set.begin(), line);
  return false;
}

bool SetAssocCache::contains(std::uint64_t line) const {
  const auto& set = sets_[mix64(line) % sets_.size()];
  return std::ranges::find(set, line) != set.end();
}

void SetAssocCache::clear() {
  for (auto& set : sets_) set.clear();
}

void CtrConfig::validate() const {
  if (tree_arity < 2) throw ConfigError("ctr: tree arity must be at least 2");
  if (vn_bits == 0 || vn_bits > 63) throw ConfigError("ctr: vn_bits must be in [1, 63]");
  if (mac_bits == 0 || mac_bits > 64) throw ConfigError("ctr: mac_bits must be in [1, 64]");
  if (clock_ghz <= 0) throw ConfigError("ctr: clock must be positive");
  vn_cache.validate();
  mac_cache.validate();
}

TreeGeometry::TreeGeometry(std::uint64_t data_blocks, std::uint32_t arity)
    : data_blocks_(data_blocks), arity_(arity) {
  if (data_blocks == 0) throw ConfigError("ctr: no data blocks");
  if (arity < 2) throw ConfigError("ctr: tree arity must be at least 2");
  std::uint64_t n = (data_blocks + arity - 1) / arity;
  counts_.push_back(n);
  while (n > 1) {
    n = (n + arity - 1) / arity;
    if (n > 1) counts_.push_back(n);
  }
}

MetadataModel::MetadataModel(const CtrConfig& cfg, std::uint64_t data_blocks)
    : cfg_((cfg.validate(), cfg)),
      geom_(data_blocks, cfg.tree_arity),
      vn_cache_(cfg.vn_cache),
      mac_cache_(cfg.mac_cache) {}

CtrCost MetadataModel::fetch_metadata(std::uint64_t addr, MetaLog* log) {
  CtrCost cost;
  const std::uint64_t mac_block = addr / cfg_.tree_arity;
  if (!mac_cache_.access(mac_block)) {
    ++cost.reads;
    if (log) log->push_back({Op::Read, Region::Mac, 0, mac_block});
  }
  std::uint64_t index = geom_.vn_block(addr);
  for (std::uint32_t level = 0; level < geom_.stored_levels(); ++level) {
    if (vn_cache_.access(node_line(level, index))) break;
    ++cost.reads;
    ++cost.aes_ops;  // verify the fetched node against its parent
    if (log) log->push_back({Op::Read, level == 0 ? Region::Vn : Region::Tree, level, index});
    index /= cfg_.tree_arity;
  }
  return cost;
}

CtrCost MetadataModel::read(std::uint64_t addr, MetaLog* log) {
  if (addr >= geom_.data_blocks()) throw DomainError("ctr: address out of range");
  CtrCost cost;
  ++cost.reads;
  if (log) log->push_back({Op::Read, Region::Data, 0, addr});
  cost += fetch_metadata(addr, log);
  cost.aes_ops += 2;  // keystream + MAC
  return cost;
}

CtrCost MetadataModel::write(std::uint64_t addr, MetaLog* log) {
  if (addr >= geom_.data_blocks()) throw DomainError("ctr: address out of range");
  CtrCost cost = fetch_metadata(addr, log);
  cost.aes_ops += 2;
  const std::uint64_t mac_block = addr / cfg_.tree_arity;
  cost.writes += 2;
  if (log) {
    log->push_back({Op::Write, Region::Data, 0, addr});
    log->push_back({Op::Write, Region::Mac, 0, mac_block});
  }
  std::uint64_t index = geom_.vn_block(addr);
  for (std::uint32_t level = 0; level < geom_.stored_levels(); ++level) {
    ++cost.writes;
    if (log) log->push_back({Op::Write, level == 0 ? Region::Vn : Region::Tree, level, index});
    index /= cfg_.tree_arity;
  }
  cost.aes_ops += geom_.stored_levels();  // new tags up to and including the root
  return cost;
}

bool MetadataModel::node_cached(std::uint32_t level, std::uint64_t index) const {
  return vn_cache_.contains(node_line(level, index));
}

bool MetadataModel::mac_cached(std::uint64_t addr) const {
  return mac_cache_.contains(addr / cfg_.tree_arity);
}

void MetadataModel::flush_caches() {
  vn_cache_.clear();
  mac_cache_.clear();
}

SgxMemory::SgxMemory(const CtrConfig& cfg, std::uint64_t data_blocks, std::uint64_t key_seed)
    : cfg_((cfg.validate(), cfg)),
      model_(cfg, data_blocks),
      key_(mix64(key_seed ^ 0x5347580000000000ULL)),
      ciphertext_(data_blocks),
      vn_mem_(data_blocks, 0),
      mac_mem_(data_blocks, 0) {
  vn_trusted_ = vn_mem_;
  mac_trusted_ = mac_mem_;
  const DataBlock zero{};
  for (std::uint64_t a = 0; a < data_blocks; ++a) encrypt(a, 0, zero);
  const auto counts = model_.geometry().level_counts();
  tags_trusted_.resize(counts.size());
  for (std::uint32_t l = 0; l < counts.size(); ++l) tags_trusted_[l].resize(counts[l]);
  rebuild_tree();
}

void SgxMemory::check(std::uint64_t addr) const {
  if (addr >= ciphertext_.size()) throw DomainError("sgx: address out of range");
}

std::uint64_t SgxMemory::keystream(std::uint64_t addr, std::uint64_t vn,
                                   std::size_t word) const noexcept {
  std::uint64_t s = mix_absorb(0x4b53, key_, epoch_);
  s = mix_absorb(s, key_, addr);
  s = mix_absorb(s, key_, vn);
  return mix_absorb(s, key_, word);
}

std::uint64_t SgxMemory::mac_of(std::uint64_t addr, std::uint64_t vn,
                                const DataBlock& ct) const noexcept {
  std::uint64_t s = mix_absorb(0x4d4143, key_, epoch_);
  s = mix_absorb(s, key_, addr);
  s = mix_absorb(s, key_, vn);
  for (std::size_t w = 0; w < kBlockBytes / 8; ++w) {
    std::uint64_t word = 0;
    for (std::size_t b = 0; b < 8; ++b) word |= std::uint64_t{ct[w * 8 + b]} << (8 * b);
    s = mix_absorb(s, key_, word);
  }
  return cfg_.mac_bits == 64 ? s : s & ((std::uint64_t{1} << cfg_.mac_bits) - 1);
}

std::uint64_t SgxMemory::node_tag(std::uint32_t level, std::uint64_t index, bool trusted) const {
  const std::uint32_t arity = cfg_.tree_arity;
  std::uint64_t s = mix_absorb(0x54524545 + level, key_, index);
  for (std::uint64_t c = index * arity; c < (index + 1) * arity; ++c) {
    std::uint64_t child = 0;
    if (level == 0) {
      if (c < vn_mem_.size()) child = trusted ? vn_trusted_[c] : vn_mem_[c];
    } else {
      const auto& below = trusted ? tags_trusted_[level - 1] : tags_mem_[level - 1];
      if (c < below.size()) child = below[c];
    }
    s = mix_absorb(s, key_, child);
  }
  return s;
}

bool SgxMemory::verify_vn_chain(std::uint64_t addr) const {
  const std::uint32_t top = model_.geometry().stored_levels() - 1;
  std::uint64_t index = model_.geometry().vn_block(addr);
  for (std::uint32_t level = 0; level <= top; ++level) {
    if (model_.node_cached(level, index)) return true;  // on-chip copy was verified on fill
    const std::uint64_t computed = node_tag(level, index, false);
    const bool parent_trusted = level == top || model_.node_cached(level + 1, index / cfg_.tree_arity);
    const std::uint64_t expected =
        parent_trusted ? tags_trusted_[level][index] : tags_mem_[level][index];
    if (computed != expected) return false;
    if (parent_trusted) return true;
    index /= cfg_.tree_arity;
  }
  return true;
}

CtrReadResult SgxMemory::read(std::uint64_t addr, MetaLog* log) {
  check(addr);
  CtrReadResult result;
  const std::uint64_t vn_block = model_.geometry().vn_block(addr);
  const bool vn_hit = model_.node_cached(0, vn_block);
  bool intact = vn_hit || verify_vn_chain(addr);
  const std::uint64_t vn = vn_hit ? vn_trusted_[addr] : vn_mem_[addr];
  const std::uint64_t stored_mac = model_.mac_cached(addr) ? mac_trusted_[addr] : mac_mem_[addr];
  intact = intact && stored_mac == mac_of(addr, vn, ciphertext_[addr]);

  result.data = decrypt(addr, vn);
  result.intact = intact;
  result.cost = model_.read(addr, log);
  ++stats_.reads;
  if (!intact) ++stats_.tamper_alarms;
  return result;
}

void SgxMemory::refresh_path(std::uint64_t addr) {
  std::uint64_t index = model_.geometry().vn_block(addr);
  for (std::uint32_t level = 0; level < tags_trusted_.size(); ++level) {
    tags_trusted_[level][index] = node_tag(level, index, true);
    tags_mem_[level][index] = tags_trusted_[level][index];
    index /= cfg_.tree_arity;
  }
}

DataBlock SgxMemory::decrypt(std::uint64_t addr, std::uint64_t vn) const noexcept {
  DataBlock out;
  for (std::size_t w = 0; w < kBlockBytes / 8; ++w) {
    std::uint64_t ks = keystream(addr, vn, w);
    for (std::size_t b = 0; b < 8; ++b, ks >>= 8) {
      out[w * 8 + b] = ciphertext_[addr][w * 8 + b] ^ static_cast<std::uint8_t>(ks);
    }
  }
  return out;
}

void SgxMemory::encrypt(std::uint64_t addr, std::uint64_t vn, const DataBlock& plain) {
  for (std::size_t w = 0; w < kBlockBytes / 8; ++w) {
    std::uint64_t ks = keystream(addr, vn, w);
    for (std::size_t b = 0; b < 8; ++b, ks >>= 8) {
      ciphertext_[addr][w * 8 + b] = plain[w * 8 + b] ^ static_cast<std::uint8_t>(ks);
    }
  }
  vn_mem_[addr] = vn_trusted_[addr] = vn;
  mac_mem_[addr] = mac_trusted_[addr] = mac_of(addr, vn, ciphertext_[addr]);
}

void SgxMemory::rebuild_tree() {
  for (std::uint32_t l = 0; l < tags_trusted_.size(); ++l) {
    for (std::uint64_t i = 0; i < tags_trusted_[l].size(); ++i) {
      tags_trusted_[l][i] = node_tag(l, i, true);
    }
  }
  tags_mem_ = tags_trusted_;
}

void SgxMemory::rekey() {
  // A fresh key lets every VN restart from zero; memory is re-encrypted
  // under it. The bulk re-encryption traffic is not charged.
  std::vector<DataBlock> plain(ciphertext_.size());
  for (std::uint64_t a = 0; a < plain.size(); ++a) plain[a] = decrypt(a, vn_trusted_[a]);
  ++epoch_;
  for (std::uint64_t a = 0; a < plain.size(); ++a) encrypt(a, 0, plain[a]);
  rebuild_tree();
  ++stats_.rekeys;
  stats_.key_epoch = epoch_;
}

CtrCost SgxMemory::write(std::uint64_t addr, const DataBlock& data, MetaLog* log) {
  check(addr);
  CtrCost cost = model_.write(addr, log);
  if (vn_trusted_[addr] >= cfg_.max_vn()) {
    rekey();
    ++cost.rekeys;
  }
  const std::uint64_t vn = vn_trusted_[addr] + 1;
  encrypt(addr, vn, data);
  refresh_path(addr);
  ++stats_.writes;
  return cost;
}

std::uint64_t SgxMemory::vn(std::uint64_t addr) const {
  check(addr);
  return vn_trusted_[addr];
}

std::span<std::uint8_t, kBlockBytes> SgxMemory::raw_ciphertext(std::uint64_t addr) {
  check(addr);
  return ciphertext_[addr];
}

std::uint64_t& SgxMemory::raw_vn(std::uint64_t addr) {
  check(addr);
  return vn_mem_[addr];
}

std::uint64_t& SgxMemory::raw_mac(std::uint64_t addr) {
  check(addr);
  return mac_mem_[addr];
}

std::uint64_t& SgxMemory::raw_tag(std::uint32_t level, std::uint64_t index) {
  if (level >= tags_mem_.size() || index >= tags_mem_[level].size()) {
    throw DomainError("sgx: no such tree node");
  }
  return tags_mem_[level][index];
}

SgxMemory::Snapshot SgxMemory::snapshot(std::uint64_t addr) const {
  check(addr);
  return {ciphertext_[addr], vn_mem_[addr], mac_mem_[addr]};
}

void SgxMemory::restore(std::uint64_t addr, const Snapshot& s) {
  check(addr);
  ciphertext_[addr] = s.ciphertext;
  vn_mem_[addr] = s.vn;
  mac_mem_[addr] = s.mac;
}

void SgxMemory::force_vn(std::uint64_t addr, std::uint64_t vn) {
  check(addr);
  if (vn > cfg_.max_vn()) throw DomainError("sgx: VN exceeds counter width");
  encrypt(addr, vn, decrypt(addr, vn_trusted_[addr]));
  refresh_path(addr);
}

Transaction np_access(Op op, std::uint64_t addr) { return Transaction{op, addr}; }

}  // namespace ssm::ctr
