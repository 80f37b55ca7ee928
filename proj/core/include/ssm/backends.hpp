#pragma once

// Protection backends behind the engine's Backend interface.

#include <cstdint>
#include <memory>
#include <vector>

#include "ssm/controller.hpp"
#include "ssm/ctr.hpp"
#include "ssm/engine.hpp"
#include "ssm/pathoram.hpp"

namespace ssm {

/// No protection: one transaction per access.
class NpBackend final : public Backend {
 public:
  explicit NpBackend(std::uint64_t logical_blocks);
  std::string name() const override { return "np"; }
  std::uint64_t logical_blocks() const override { return blocks_.size(); }
  OpOutcome handle(Op op, std::uint64_t addr, const DataBlock* data) override;
  BackendCounters counters() const override { return {}; }

 private:
  std::vector<DataBlock> blocks_;
};

/// Counter-mode encryption with VN/MAC/Merkle metadata.
class SgxBackend final : public Backend {
 public:
  SgxBackend(const ctr::CtrConfig& cfg, std::uint64_t logical_blocks, std::uint64_t seed);
  std::string name() const override { return "sgx"; }
  std::uint64_t logical_blocks() const override { return mem_.blocks(); }
  OpOutcome handle(Op op, std::uint64_t addr, const DataBlock* data) override;
  BackendCounters counters() const override;
  ctr::SgxMemory& memory() noexcept { return mem_; }

 private:
  ctr::SgxMemory mem_;
};

/// Path ORAM holding the logical blocks directly.
class PathOramBackend final : public Backend {
 public:
  PathOramBackend(const oram::OramConfig& cfg, std::uint64_t logical_blocks, std::uint64_t seed);
  std::string name() const override { return "pathoram"; }
  std::uint64_t logical_blocks() const override { return oram_->block_count(); }
  OpOutcome handle(Op op, std::uint64_t addr, const DataBlock* data) override;
  BackendCounters counters() const override;

 private:
  std::unique_ptr<oram::PathOram> oram_;
};

/// Path ORAM whose tree slots are protected by the counter-mode scheme: every
/// slot read or written on the path also pays metadata traffic and crypto.
class SgxPathOramBackend final : public Backend {
 public:
  SgxPathOramBackend(const ctr::CtrConfig& ctr_cfg, const oram::OramConfig& oram_cfg,
                     std::uint64_t logical_blocks, std::uint64_t seed);
  std::string name() const override { return "sgx-pathoram"; }
  std::uint64_t logical_blocks() const override { return oram_->block_count(); }
  OpOutcome handle(Op op, std::uint64_t addr, const DataBlock* data) override;
  BackendCounters counters() const override;

 private:
  std::unique_ptr<oram::PathOram> oram_;
  ctr::MetadataModel meta_;
};

/// SSM in any of its variants; the name follows the configuration:
/// "ssm", "ssm-plus" (op-type protection) or "ssm-oram" (SSM+ over Path ORAM).
class SsmBackend final : public Backend {
 public:
  SsmBackend(const SsmConfig& cfg, std::uint64_t seed);
  std::string name() const override;
  std::uint64_t logical_blocks() const override { return ctl_.map().logical_blocks(); }
  OpOutcome handle(Op op, std::uint64_t addr, const DataBlock* data) override;
  BackendCounters counters() const override;
  SsmController& controller() noexcept { return ctl_; }

 private:
  SsmController ctl_;
};

}  // namespace ssm
