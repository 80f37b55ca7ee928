#include "ssm/memory.hpp"

#include <algorithm>
#include <string>

#include "ssm/errors.hpp"

namespace ssm {

PhysicalMemory::PhysicalMemory(std::uint64_t blocks)
    : blocks_(blocks), bytes_(blocks * kBlockBytes) {}

void PhysicalMemory::check(std::uint64_t block) const {
  if (block >= blocks_) {
    throw DomainError("physical memory: block " + std::to_string(block) + " out of range");
  }
}

DataBlock PhysicalMemory::read_block(std::uint64_t block, TransactionLog& log) const {
  check(block);
  DataBlock out;
  std::copy_n(bytes_.begin() + static_cast<std::ptrdiff_t>(block * kBlockBytes), kBlockBytes,
              out.begin());
  log.push_back({Op::Read, block});
  if (interceptor_) interceptor_(block, std::span<std::uint8_t, kBlockBytes>(out));
  return out;
}

void PhysicalMemory::write_block(std::uint64_t block, const DataBlock& data, TransactionLog& log) {
  check(block);
  std::ranges::copy(data, bytes_.begin() + static_cast<std::ptrdiff_t>(block * kBlockBytes));
  log.push_back({Op::Write, block});
}

std::span<std::uint8_t, kBlockBytes> PhysicalMemory::raw(std::uint64_t block) {
  check(block);
  return std::span<std::uint8_t, kBlockBytes>(bytes_.data() + block * kBlockBytes, kBlockBytes);
}

std::span<const std::uint8_t, kBlockBytes> PhysicalMemory::raw(std::uint64_t block) const {
  check(block);
  return std::span<const std::uint8_t, kBlockBytes>(bytes_.data() + block * kBlockBytes,
                                                    kBlockBytes);
}

}  // namespace ssm
