// ssmsim: run, compare and analyze memory-protection backends.
//
// Exit codes: 0 success, 1 configuration/usage/trace error, 2 tamper alarm
// with --strict.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "selftest.hpp"
#include "ssm/analysis.hpp"
#include "ssm/errors.hpp"
#include "ssm/experiment.hpp"
#include "ssm/workloads.hpp"

namespace {

using namespace ssm;

constexpr int kExitConfig = 1;
constexpr int kExitTamper = 2;

struct TraceOptions {
  std::string kind = "rand";
  std::string file;
};

void add_trace_options(CLI::App* app, TraceSpec& spec, TraceOptions& opts) {
  app->add_option("--trace", opts.kind, "seq, rand, conv, dlrm or file")->capture_default_str();
  app->add_option("--trace-file", opts.file, "trace file (.gz accepted); implies --trace file");
  app->add_option("--count", spec.count, "accesses to generate")->capture_default_str();
  app->add_option("--read-fraction", spec.read_fraction)->capture_default_str();
  app->add_option("--stride", spec.stride, "block stride of seq traces")->capture_default_str();
}

void add_experiment_options(CLI::App* app, ExperimentConfig& cfg) {
  app->add_option("--seed", cfg.seed)->capture_default_str();

  auto& ssm = cfg.ssm;
  app->add_option("--k", ssm.codec.shares, "shares per block")->capture_default_str();
  app->add_option("--t", ssm.codec.threshold, "reconstruction threshold")->capture_default_str();
  app->add_option("--w", ssm.codec.segments, "data segments per block")->capture_default_str();
  app->add_option("--n-seed", ssm.codec.seed_coeffs, "seed coefficients")->capture_default_str();
  app->add_option("--d", ssm.dummies, "dummy blocks per access")->capture_default_str();
  app->add_option("--s", ssm.geom.shares_per_block, "shares per physical block")
      ->capture_default_str();
  app->add_option("--logical-blocks", ssm.geom.logical_blocks)->capture_default_str();
  app->add_option("--physical-blocks", ssm.geom.physical_blocks, "0 derives from --slack")
      ->capture_default_str();
  app->add_option("--slack", ssm.geom.slack)->capture_default_str();
  app->add_option("--stash-bytes", ssm.stash.capacity_bytes)->capture_default_str();
  app->add_option("--high-watermark", ssm.stash.high_watermark)->capture_default_str();
  app->add_option("--low-watermark", ssm.stash.low_watermark)->capture_default_str();

  app->add_option("--oram-levels", cfg.oram.levels)->capture_default_str();
  app->add_option("--oram-z", cfg.oram.bucket_size)->capture_default_str();
  app->add_option("--oram-stash-bytes", cfg.oram.stash_bytes)->capture_default_str();
  app->add_option("--oram-utilization", cfg.oram.utilization)->capture_default_str();

  app->add_option("--block-ns", cfg.timing.block_access_ns)->capture_default_str();
  app->add_option("--width", cfg.timing.parallel_width, "overlapped transactions")
      ->capture_default_str();
  app->add_option("--seg-ns", cfg.timing.segmentation_ns)->capture_default_str();
  app->add_option("--recon-ns", cfg.timing.reconstruction_ns)->capture_default_str();
  app->add_option("--aes-ns", cfg.timing.aes_ns)->capture_default_str();
}

TraceSpec resolve_trace(TraceSpec spec, const TraceOptions& opts, std::uint64_t seed) {
  spec.seed = seed;
  if (!opts.file.empty()) {
    spec.kind = TraceKind::File;
    spec.path = opts.file;
  } else {
    spec.kind = parse_trace_kind(opts.kind);
  }
  return spec;
}

std::vector<std::string> non_empty(std::vector<std::string> items) {
  std::erase(items, std::string{});
  return items;
}

void emit_csv(const std::string& path, const std::vector<StatsReport>& rows) {
  if (path.empty()) {
    write_csv(std::cout, rows);
    return;
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  write_csv(out, rows);
}

void summarize(const std::vector<StatsReport>& rows) {
  for (const auto& r : rows) {
    std::fprintf(stderr, "%-12s %-8s %llu ops, %llu block reads, %llu block writes, %.0f ns (%.3fx NP)\n",
                 r.backend.c_str(), r.trace.c_str(), static_cast<unsigned long long>(r.logical_ops),
                 static_cast<unsigned long long>(r.block_reads),
                 static_cast<unsigned long long>(r.block_writes), r.simulated_ns, r.normalized_time);
  }
}

bool any_tamper(const std::vector<StatsReport>& rows) {
  for (const auto& r : rows) {
    if (r.tamper_alarms > 0) return true;
  }
  return false;
}

void print_probability(const std::string& name, const analysis::Probability& p) {
  for (const auto& w : p.warnings) std::cerr << "warning: " << w << '\n';
  std::printf("%s,%.6e,%.6f\n", name.c_str(), p.value, p.log10);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secure Scattered Memory simulator"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_config("--config", "", "key=value file; [run], [compare], ... sections");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  ExperimentConfig cfg;
  TraceOptions trace_opts;
  bool strict = false;

  auto* run = app.add_subcommand("run", "run one backend and print a CSV row");
  run->add_option("--backend", cfg.backend, "np, sgx, pathoram, sgx-pathoram, ssm, ssm-plus, ssm-oram")
      ->capture_default_str();
  add_trace_options(run, cfg.trace, trace_opts);
  add_experiment_options(run, cfg);
  run->add_option("--output,-o", cfg.output, "CSV path (default stdout)");
  run->add_flag("--strict", strict, "exit 2 on any tamper alarm");

  std::vector<std::string> backend_list{"np", "sgx", "ssm"};
  std::vector<std::string> trace_list;
  auto* cmp = app.add_subcommand("compare", "run several backends on shared traces");
  cmp->add_option("--backends", backend_list, "comma-separated")
      ->delimiter(',')
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
      ->capture_default_str();
  add_trace_options(cmp, cfg.trace, trace_opts);
  cmp->add_option("--traces", trace_list, "comma-separated trace kinds (overrides --trace)")
      ->delimiter(',')
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  add_experiment_options(cmp, cfg);
  cmp->add_option("--output,-o", cfg.output, "CSV path (default stdout)");
  cmp->add_flag("--strict", strict, "exit 2 on any tamper alarm");
  bool serial = false;
  cmp->add_flag("--serial", serial, "run backends one after another");

  analysis::SecurityParams sec;
  bool want_p1 = false;
  bool want_p2 = false;
  bool want_comb = false;
  bool want_secrecy = false;
  analysis::SecrecyParams secrecy;
  auto* an = app.add_subcommand("analyze", "closed-form security figures");
  an->add_flag("--p1", want_p1, "confidentiality breach probability");
  an->add_flag("--p2", want_p2, "shuffle guessing probability");
  an->add_flag("--comb", want_comb, "C(K, t)");
  an->add_flag("--secrecy", want_secrecy, "exhaustive GF(2^8) secrecy check");
  an->add_option("--total", sec.total, "shares in memory")->capture_default_str();
  an->add_option("--k", sec.k)->capture_default_str();
  an->add_option("--t", sec.t)->capture_default_str();
  an->add_option("--d", sec.d)->capture_default_str();
  an->add_option("--s", sec.s)->capture_default_str();
  an->add_option("--n", sec.n, "accesses before write-back")->capture_default_str();
  an->add_flag("--sabotage", secrecy.sabotage_zero_x, "secrecy check with a share at x = 0");

  std::string trace_out;
  auto* gen = app.add_subcommand("gen-trace", "write a synthetic trace file");
  add_trace_options(gen, cfg.trace, trace_opts);
  gen->add_option("--seed", cfg.seed)->capture_default_str();
  gen->add_option("--logical-blocks", cfg.ssm.geom.logical_blocks)->capture_default_str();
  gen->add_option("--out", trace_out, "output path (.gz compresses)")->required();

  auto* self = app.add_subcommand("selftest", "run the built-in invariant checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*run || *cmp) {
      cfg.trace = resolve_trace(cfg.trace, trace_opts, cfg.seed);
      cfg.validate();
      std::vector<StatsReport> rows;
      if (*run) {
        const auto events = make_trace(cfg);
        rows = compare(cfg, events, {cfg.backend});
      } else {
        const auto backends = non_empty(backend_list);
        if (backends.empty()) throw ConfigError("no backends given");
        std::vector<TraceSpec> specs;
        if (trace_list.empty()) {
          specs.push_back(cfg.trace);
        } else {
          for (const auto& kind : non_empty(trace_list)) {
            TraceOptions o;
            o.kind = kind;
            specs.push_back(resolve_trace(cfg.trace, o, cfg.seed));
          }
        }
        for (const auto& spec : specs) {
          ExperimentConfig one = cfg;
          one.trace = spec;
          const auto events = make_trace(one);
          const auto part = compare(one, events, backends, !serial);
          rows.insert(rows.end(), part.begin(), part.end());
        }
      }
      emit_csv(cfg.output, rows);
      summarize(rows);
      if (strict && any_tamper(rows)) {
        std::cerr << "tamper alarm raised\n";
        return kExitTamper;
      }
      return 0;
    }

    if (*an) {
      if (!(want_p1 || want_p2 || want_comb || want_secrecy)) want_p1 = want_p2 = want_comb = true;
      std::printf("quantity,value,log10\n");
      if (want_comb) {
        const auto c = analysis::comb(sec.k, sec.t);
        std::printf("comb,%s,%.6f\n", c.str().c_str(),
                    std::log10(static_cast<double>(c)));
      }
      if (want_p1) print_probability("p1", analysis::p1(sec));
      if (want_p2) print_probability("p2", analysis::p2(sec));
      if (want_secrecy) {
        secrecy.shares = static_cast<std::uint32_t>(sec.k);
        secrecy.threshold = static_cast<std::uint32_t>(sec.t);
        const auto v = analysis::secrecy_exhaustive(secrecy);
        std::printf("secrecy,%s,\n", v.pass ? "PASS" : "FAIL");
        if (!v.pass) std::cerr << v.detail << '\n';
      }
      return 0;
    }

    if (*gen) {
      cfg.trace = resolve_trace(cfg.trace, trace_opts, cfg.seed);
      const auto events = gen_trace(cfg.trace, cfg.ssm.geom.logical_blocks);
      save_trace_file(trace_out, events);
      std::cerr << "wrote " << events.size() << " accesses to " << trace_out << '\n';
      return 0;
    }

    if (*self) return ssmsim::run_selftest(std::cout) ? 0 : 1;
  } catch (const TraceError& e) {
    std::cerr << "trace error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
