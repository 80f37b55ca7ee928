#pragma once

// Access traces: synthetic generators and the text trace format.
//
// Text format, one access per line:
//   R 0x1f40
//   W 0x80
// Addresses are byte addresses and are divided by 64 to give block ids.
// '#' starts a comment; blank lines are skipped. Files ending in ".gz" are
// read and written gzip-compressed.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ssm/transaction.hpp"

namespace ssm {

struct AccessEvent {
  Op op = Op::Read;
  std::uint64_t addr = 0;  // logical block id
  std::uint64_t line = 0;  // source line in a trace file, 0 if generated

  friend bool operator==(const AccessEvent& a, const AccessEvent& b) {
    return a.op == b.op && a.addr == b.addr;
  }
};

enum class TraceKind { Seq, Rand, File, Conv, Dlrm };

struct TraceSpec {
  TraceKind kind = TraceKind::Rand;
  std::uint64_t count = 100000;
  double read_fraction = 0.5;
  std::uint64_t stride = 1;
  std::uint64_t seed = 1;
  std::string path;  // for File

  void validate() const;
};

TraceKind parse_trace_kind(std::string_view name);
std::string_view to_string(TraceKind kind);
/// Short label used in reports: the kind, or the file name for File traces.
std::string trace_label(const TraceSpec& spec);

/// Synthetic trace over `logical_blocks` blocks (File is loaded from disk).
///   seq:  addr_i = i * stride mod blocks
///   rand: uniform addresses
///   conv: 3x3 sliding window over a feature map, one weight read and one
///         output write per window
///   dlrm: skewed embedding-row lookups over 8 tables; writes are updates
/// Ops are reads with probability read_fraction (conv has a fixed mix).
std::vector<AccessEvent> gen_trace(const TraceSpec& spec, std::uint64_t logical_blocks);

/// Throws TraceError with the 1-based line number on malformed input.
std::vector<AccessEvent> parse_trace(std::istream& in);
void write_trace(std::ostream& out, std::span<const AccessEvent> events);

std::vector<AccessEvent> load_trace_file(const std::string& path);
void save_trace_file(const std::string& path, std::span<const AccessEvent> events);

}  // namespace ssm
