#include "ssm/workloads.hpp"

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ssm/errors.hpp"
#include "ssm/layout.hpp"
#include "ssm/random.hpp"

namespace ssm {

namespace {

bool is_gzip_path(const std::string& path) {
  return path.size() >= 3 && path.compare(path.size() - 3, 3, ".gz") == 0;
}

Op draw_op(Rng& rng, double read_fraction) {
  return uniform_unit(rng) < read_fraction ? Op::Read : Op::Write;
}

std::vector<AccessEvent> gen_conv(const TraceSpec& spec, std::uint64_t blocks, Rng& rng) {
  // Input map in the first half, weights in the next quarter, outputs after.
  const std::uint64_t input = std::max<std::uint64_t>(blocks / 2, 1);
  const std::uint64_t weights = std::max<std::uint64_t>(blocks / 4, 1);
  const std::uint64_t output_base = std::min(blocks - 1, input + weights);
  const std::uint64_t output = std::max<std::uint64_t>(blocks - output_base, 1);
  const auto width = std::max<std::uint64_t>(
      3, static_cast<std::uint64_t>(std::sqrt(static_cast<double>(input))));

  std::vector<AccessEvent> out;
  out.reserve(spec.count);
  std::uint64_t window = 0;
  while (out.size() < spec.count) {
    const std::uint64_t origin = window * spec.stride;
    for (std::uint64_t dy = 0; dy < 3 && out.size() < spec.count; ++dy) {
      for (std::uint64_t dx = 0; dx < 3 && out.size() < spec.count; ++dx) {
        out.push_back({Op::Read, (origin + dy * width + dx) % input, 0});
      }
    }
    if (out.size() < spec.count) {
      out.push_back({Op::Read, std::min(blocks - 1, input + window % weights), 0});
    }
    if (out.size() < spec.count) {
      out.push_back({Op::Write, output_base + window % output, 0});
    }
    ++window;
  }
  (void)rng;
  return out;
}

std::vector<AccessEvent> gen_dlrm(const TraceSpec& spec, std::uint64_t blocks, Rng& rng) {
  constexpr std::uint64_t kTables = 8;
  const std::uint64_t rows = std::max<std::uint64_t>(blocks / kTables, 1);
  std::vector<AccessEvent> out;
  out.reserve(spec.count);
  for (std::uint64_t i = 0; i < spec.count; ++i) {
    const std::uint64_t table = uniform_below(rng, std::min(kTables, blocks));
    // Cubing a uniform variate skews lookups toward low (hot) rows.
    const double u = uniform_unit(rng);
    const auto row = std::min(rows - 1, static_cast<std::uint64_t>(u * u * u * rows));
    out.push_back({draw_op(rng, spec.read_fraction), (table * rows + row) % blocks, 0});
  }
  return out;
}

std::uint64_t parse_hex(std::string_view s, bool& ok) {
  if (s.starts_with("0x") || s.starts_with("0X")) s.remove_prefix(2);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 16);
  ok = !s.empty() && ec == std::errc{} && ptr == s.data() + s.size();
  return v;
}

}  // namespace

void TraceSpec::validate() const {
  if (count == 0 && kind != TraceKind::File) throw ConfigError("trace: count must be positive");
  if (!(read_fraction >= 0.0 && read_fraction <= 1.0)) {
    throw ConfigError("trace: read fraction must be in [0, 1]");
  }
  if (stride == 0) throw ConfigError("trace: stride must be positive");
  if (kind == TraceKind::File && path.empty()) throw ConfigError("trace: file trace needs a path");
}

TraceKind parse_trace_kind(std::string_view name) {
  if (name == "seq") return TraceKind::Seq;
  if (name == "rand") return TraceKind::Rand;
  if (name == "file") return TraceKind::File;
  if (name == "conv") return TraceKind::Conv;
  if (name == "dlrm") return TraceKind::Dlrm;
  throw ConfigError("unknown trace kind '" + std::string(name) + "'");
}

std::string_view to_string(TraceKind kind) {
  switch (kind) {
    case TraceKind::Seq: return "seq";
    case TraceKind::Rand: return "rand";
    case TraceKind::File: return "file";
    case TraceKind::Conv: return "conv";
    case TraceKind::Dlrm: return "dlrm";
  }
  return "?";
}

std::string trace_label(const TraceSpec& spec) {
  if (spec.kind != TraceKind::File) return std::string(to_string(spec.kind));
  const auto slash = spec.path.find_last_of('/');
  return slash == std::string::npos ? spec.path : spec.path.substr(slash + 1);
}

std::vector<AccessEvent> gen_trace(const TraceSpec& spec, std::uint64_t logical_blocks) {
  spec.validate();
  if (logical_blocks == 0) throw ConfigError("trace: empty geometry");
  if (spec.kind == TraceKind::File) return load_trace_file(spec.path);

  Rng rng(spec.seed);
  switch (spec.kind) {
    case TraceKind::Conv: return gen_conv(spec, logical_blocks, rng);
    case TraceKind::Dlrm: return gen_dlrm(spec, logical_blocks, rng);
    default: break;
  }
  std::vector<AccessEvent> out;
  out.reserve(spec.count);
  const std::uint64_t step = spec.stride % logical_blocks;
  std::uint64_t next = 0;
  for (std::uint64_t i = 0; i < spec.count; ++i) {
    std::uint64_t addr = next;
    if (spec.kind == TraceKind::Seq) {
      next = next + step >= logical_blocks ? next + step - logical_blocks : next + step;
    } else {
      addr = uniform_below(rng, logical_blocks);
    }
    out.push_back({draw_op(rng, spec.read_fraction), addr, 0});
  }
  return out;
}

std::vector<AccessEvent> parse_trace(std::istream& in) {
  std::vector<AccessEvent> out;
  std::string line;
  std::uint64_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    std::istringstream fields{std::string(view)};
    std::string op;
    std::string addr;
    std::string extra;
    if (!(fields >> op)) continue;
    if (!(fields >> addr) || (fields >> extra)) {
      throw TraceError(number, "expected '<R|W> <hex address>'");
    }
    AccessEvent ev;
    if (op == "R" || op == "r") {
      ev.op = Op::Read;
    } else if (op == "W" || op == "w") {
      ev.op = Op::Write;
    } else {
      throw TraceError(number, "unknown operation '" + op + "'");
    }
    bool ok = false;
    ev.addr = parse_hex(addr, ok) / kBlockBytes;
    if (!ok) throw TraceError(number, "bad address '" + addr + "'");
    ev.line = number;
    out.push_back(ev);
  }
  return out;
}

void write_trace(std::ostream& out, std::span<const AccessEvent> events) {
  char buf[32];
  for (const auto& ev : events) {
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, ev.addr * kBlockBytes, 16);
    out << (ev.op == Op::Read ? "R 0x" : "W 0x") << std::string_view(buf, end - buf) << '\n';
  }
}

std::vector<AccessEvent> load_trace_file(const std::string& path) {
  if (!is_gzip_path(path)) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open trace '" + path + "'");
    return parse_trace(in);
  }
  gzFile gz = gzopen(path.c_str(), "rb");
  if (gz == nullptr) throw ConfigError("cannot open trace '" + path + "'");
  std::string text;
  char buf[1 << 16];
  int n = 0;
  while ((n = gzread(gz, buf, sizeof buf)) > 0) text.append(buf, static_cast<std::size_t>(n));
  const bool failed = n < 0;
  gzclose(gz);
  if (failed) throw ConfigError("corrupt gzip trace '" + path + "'");
  std::istringstream in(text);
  return parse_trace(in);
}

void save_trace_file(const std::string& path, std::span<const AccessEvent> events) {
  std::ostringstream text;
  write_trace(text, events);
  const std::string body = text.str();
  if (!is_gzip_path(path)) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write trace '" + path + "'");
    out << body;
    return;
  }
  gzFile gz = gzopen(path.c_str(), "wb");
  if (gz == nullptr) throw ConfigError("cannot write trace '" + path + "'");
  const int written = body.empty() ? 0 : gzwrite(gz, body.data(), static_cast<unsigned>(body.size()));
  gzclose(gz);
  if (!body.empty() && written == 0) throw ConfigError("gzip write failed for '" + path + "'");
}

}  // namespace ssm
