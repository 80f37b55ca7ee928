#include "ssm/experiment.hpp"

#include <algorithm>
#include <future>

#include "ssm/backends.hpp"
#include "ssm/errors.hpp"
#include "ssm/mix.hpp"

namespace ssm {

namespace {

std::uint64_t backend_seed(std::uint64_t seed, const std::string& name) {
  std::uint64_t h = mix64(seed);
  for (const char c : name) h = mix_absorb(h, 0x6261636b656e64, static_cast<unsigned char>(c));
  return h;
}

}  // namespace

const std::vector<std::string>& backend_names() {
  static const std::vector<std::string> names = {"np",  "pathoram", "sgx",     "sgx-pathoram",
                                                 "ssm", "ssm-oram", "ssm-plus"};
  return names;
}

void ExperimentConfig::validate() const {
  if (std::ranges::find(backend_names(), backend) == backend_names().end()) {
    throw ConfigError("unknown backend '" + backend + "'");
  }
  timing.validate();
  trace.validate();
  if (logical_blocks() == 0) throw ConfigError("geometry: no logical blocks");
}

std::unique_ptr<Backend> make_backend(const std::string& name, const ExperimentConfig& cfg) {
  const std::uint64_t seed = backend_seed(cfg.seed, name);
  const std::uint64_t blocks = cfg.logical_blocks();
  if (name == "np") return std::make_unique<NpBackend>(blocks);
  if (name == "sgx") return std::make_unique<SgxBackend>(cfg.ctr, blocks, seed);
  if (name == "pathoram") return std::make_unique<PathOramBackend>(cfg.oram, blocks, seed);
  if (name == "sgx-pathoram") {
    return std::make_unique<SgxPathOramBackend>(cfg.ctr, cfg.oram, blocks, seed);
  }
  if (name == "ssm" || name == "ssm-plus" || name == "ssm-oram") {
    SsmConfig s = cfg.ssm;
    s.op_type_protection = name != "ssm";
    s.oram_backend = name == "ssm-oram";
    s.oram = cfg.oram;
    return std::make_unique<SsmBackend>(s, seed);
  }
  throw ConfigError("unknown backend '" + name + "'");
}

std::vector<AccessEvent> make_trace(const ExperimentConfig& cfg) {
  return gen_trace(cfg.trace, cfg.logical_blocks());
}

std::vector<StatsReport> compare(const ExperimentConfig& cfg, std::span<const AccessEvent> events,
                                 std::vector<std::string> backends, bool parallel) {
  cfg.timing.validate();
  std::ranges::sort(backends);
  backends.erase(std::unique(backends.begin(), backends.end()), backends.end());
  for (const auto& b : backends) {
    if (std::ranges::find(backend_names(), b) == backend_names().end()) {
      throw ConfigError("unknown backend '" + b + "'");
    }
  }
  const std::string label = trace_label(cfg.trace);
  const auto run_one = [&](const std::string& name) {
    auto backend = make_backend(name, cfg);
    return run_trace(events, *backend, cfg.timing, label, cfg.seed);
  };

  std::vector<std::string> jobs = backends;
  const bool np_requested = std::ranges::binary_search(backends, std::string("np"));
  if (!np_requested) jobs.push_back("np");

  std::vector<StatsReport> results(jobs.size());
  if (parallel && jobs.size() > 1) {
    std::vector<std::future<StatsReport>> futures;
    for (const auto& name : jobs) futures.push_back(std::async(std::launch::async, run_one, name));
    for (std::size_t i = 0; i < jobs.size(); ++i) results[i] = futures[i].get();
  } else {
    for (std::size_t i = 0; i < jobs.size(); ++i) results[i] = run_one(jobs[i]);
  }

  const auto np = std::ranges::find(results, std::string("np"), &StatsReport::backend);
  const double np_ns = np->simulated_ns;
  for (auto& r : results) normalize(r, np_ns);
  if (!np_requested) results.pop_back();
  return results;
}

}  // namespace ssm
