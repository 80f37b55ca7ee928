#pragma once

// Experiment assembly shared by the command-line tool and the tests: one
// configuration, a backend factory, and the run/compare drivers.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ssm/controller.hpp"
#include "ssm/ctr.hpp"
#include "ssm/engine.hpp"
#include "ssm/pathoram.hpp"
#include "ssm/workloads.hpp"

namespace ssm {

struct ExperimentConfig {
  std::string backend = "ssm";
  SsmConfig ssm;          // codec, geometry (logical_blocks for every backend), stash, d
  ctr::CtrConfig ctr;
  oram::OramConfig oram;  // standalone Path ORAM and the SSM+ frame ORAM
  TimingConfig timing;
  TraceSpec trace;
  std::uint64_t seed = 1;
  std::string output;

  std::uint64_t logical_blocks() const noexcept { return ssm.geom.logical_blocks; }
  void validate() const;
};

/// np, pathoram, sgx, sgx-pathoram, ssm, ssm-oram, ssm-plus
const std::vector<std::string>& backend_names();

std::unique_ptr<Backend> make_backend(const std::string& name, const ExperimentConfig& cfg);

std::vector<AccessEvent> make_trace(const ExperimentConfig& cfg);

/// Runs each named backend on its own state over `events`, normalizing
/// against an NP run of the same trace. Rows are sorted by backend name.
/// Backends run concurrently when `parallel` is set.
std::vector<StatsReport> compare(const ExperimentConfig& cfg, std::span<const AccessEvent> events,
                                 std::vector<std::string> backends, bool parallel = true);

}  // namespace ssm
