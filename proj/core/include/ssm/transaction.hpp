#pragma once

#include <cstdint>
#include <vector>

namespace ssm {

enum class Op : std::uint8_t { Read, Write };

/// One 64-byte memory transfer as observed on the memory bus.
struct Transaction {
  Op op;
  std::uint64_t block;

  friend bool operator==(const Transaction&, const Transaction&) = default;
};

using TransactionLog = std::vector<Transaction>;

inline const char* to_string(Op op) { return op == Op::Read ? "READ" : "WRITE"; }

}  // namespace ssm
