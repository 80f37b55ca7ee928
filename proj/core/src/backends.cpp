#include "ssm/backends.hpp"

#include <bit>

#include "ssm/errors.hpp"

namespace ssm {

namespace {

void require_data(Op op, const DataBlock* data) {
  if (op == Op::Write && data == nullptr) throw DomainError("backend: write without data");
}

std::uint64_t position_map_bytes(const oram::PathOram& o) {
  const auto bits = static_cast<std::uint64_t>(std::bit_width(o.config().leaves() - 1));
  return (o.block_count() * std::max<std::uint64_t>(bits, 1) + 7) / 8;
}

}  // namespace

NpBackend::NpBackend(std::uint64_t logical_blocks) : blocks_(logical_blocks) {
  if (logical_blocks == 0) throw ConfigError("np: no logical blocks");
}

OpOutcome NpBackend::handle(Op op, std::uint64_t addr, const DataBlock* data) {
  require_data(op, data);
  if (addr >= blocks_.size()) throw DomainError("np: address out of range");
  const Transaction txn = ctr::np_access(op, addr);
  OpOutcome out;
  (txn.op == Op::Read ? out.cost.reads : out.cost.writes) = 1;
  if (op == Op::Write) blocks_[addr] = *data;
  out.data = blocks_[addr];
  return out;
}

SgxBackend::SgxBackend(const ctr::CtrConfig& cfg, std::uint64_t logical_blocks, std::uint64_t seed)
    : mem_(cfg, logical_blocks, seed) {}

OpOutcome SgxBackend::handle(Op op, std::uint64_t addr, const DataBlock* data) {
  require_data(op, data);
  OpOutcome out;
  ctr::CtrCost cost;
  if (op == Op::Read) {
    const auto r = mem_.read(addr);
    out.data = r.data;
    out.intact = r.intact;
    cost = r.cost;
  } else {
    cost = mem_.write(addr, *data);
    out.data = *data;
  }
  out.cost.reads = cost.reads;
  out.cost.writes = cost.writes;
  out.cost.aes_ops = cost.aes_ops;
  return out;
}

BackendCounters SgxBackend::counters() const {
  BackendCounters c;
  c.tamper_alarms = mem_.stats().tamper_alarms;
  return c;
}

PathOramBackend::PathOramBackend(const oram::OramConfig& cfg, std::uint64_t logical_blocks,
                                 std::uint64_t seed) {
  Rng rng(seed);
  oram_ = std::make_unique<oram::PathOram>(cfg, logical_blocks, rng);
}

OpOutcome PathOramBackend::handle(Op op, std::uint64_t addr, const DataBlock* data) {
  require_data(op, data);
  OpOutcome out;
  out.data = oram_->access_counted(op, addr, data);
  out.cost.reads = oram_->config().path_slots();
  out.cost.writes = oram_->config().path_slots();
  return out;
}

BackendCounters PathOramBackend::counters() const {
  BackendCounters c;
  c.map_bytes = position_map_bytes(*oram_);
  return c;
}

SgxPathOramBackend::SgxPathOramBackend(const ctr::CtrConfig& ctr_cfg,
                                       const oram::OramConfig& oram_cfg,
                                       std::uint64_t logical_blocks, std::uint64_t seed)
    : meta_(ctr_cfg, oram_cfg.slots()) {
  Rng rng(seed);
  oram_ = std::make_unique<oram::PathOram>(oram_cfg, logical_blocks, rng);
}

OpOutcome SgxPathOramBackend::handle(Op op, std::uint64_t addr, const DataBlock* data) {
  require_data(op, data);
  oram::OramResult r = oram_->access(op, addr, data);
  OpOutcome out;
  out.data = r.data;
  ctr::CtrCost cost;
  for (const Transaction& t : r.transactions) {
    cost += t.op == Op::Read ? meta_.read(t.block) : meta_.write(t.block);
  }
  out.cost.reads = cost.reads;
  out.cost.writes = cost.writes;
  out.cost.aes_ops = cost.aes_ops;
  return out;
}

BackendCounters SgxPathOramBackend::counters() const {
  BackendCounters c;
  c.map_bytes = position_map_bytes(*oram_);
  return c;
}

SsmBackend::SsmBackend(const SsmConfig& cfg, std::uint64_t seed) : ctl_(cfg, seed) {}

std::string SsmBackend::name() const {
  const auto& cfg = ctl_.config();
  if (cfg.oram_backend) return "ssm-oram";
  return cfg.op_type_protection ? "ssm-plus" : "ssm";
}

OpOutcome SsmBackend::handle(Op op, std::uint64_t addr, const DataBlock* data) {
  require_data(op, data);
  const AccessResult r = ctl_.access(op, addr, data);
  OpOutcome out;
  out.data = r.data;
  out.intact = r.intact;
  out.cost.reads = r.bus_reads;
  out.cost.writes = r.bus_writes;
  out.cost.segmentations = r.segmentations;
  out.cost.reconstructions = r.reconstructions;
  return out;
}

BackendCounters SsmBackend::counters() const {
  const ControllerStats& s = ctl_.stats();
  BackendCounters c;
  c.stash_hits = s.stash_hits;
  c.shuffles = s.shuffles;
  c.tamper_alarms = s.tamper_alarms;
  c.map_bytes = ctl_.map().map_bytes();
  return c;
}

}  // namespace ssm
