#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ssm/codec.hpp"
#include "ssm/transaction.hpp"

namespace ssm {

/// Flat array of 64-byte physical blocks. Every block transfer is appended to
/// the caller's transaction log. A read interceptor models an active bus
/// adversary that may alter data in flight.
class PhysicalMemory {
 public:
  using Interceptor = std::function<void(std::uint64_t block, std::span<std::uint8_t, kBlockBytes>)>;

  explicit PhysicalMemory(std::uint64_t blocks);

  std::uint64_t blocks() const noexcept { return blocks_; }

  DataBlock read_block(std::uint64_t block, TransactionLog& log) const;
  void write_block(std::uint64_t block, const DataBlock& data, TransactionLog& log);

  /// Direct access for test harnesses (at-rest tampering, replay); no
  /// transaction is logged.
  std::span<std::uint8_t, kBlockBytes> raw(std::uint64_t block);
  std::span<const std::uint8_t, kBlockBytes> raw(std::uint64_t block) const;

  void set_read_interceptor(Interceptor fn) { interceptor_ = std::move(fn); }

 private:
  void check(std::uint64_t block) const;

  std::uint64_t blocks_;
  std::vector<std::uint8_t> bytes_;
  Interceptor interceptor_;
};

}  // namespace ssm
