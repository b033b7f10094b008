#include "phe/commands.hpp"

#include <chrono>
#include <filesystem>
#include <map>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "phe/config.hpp"
#include "phe/errors.hpp"
#include "phe/report.hpp"

namespace phe {

namespace fs = std::filesystem;

namespace {

void prepare_out_dir(const fs::path& dir) {
  fs::create_directories(dir);
  if (!fs::is_directory(dir)) {
    throw fs::filesystem_error("not a directory", dir, std::make_error_code(std::errc::not_a_directory));
  }
}

template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return kExitConfigError;
  } catch (const fs::filesystem_error& e) {
    fmt::print(err, "I/O error: {}\n", e.what());
    return kExitIoError;
  } catch (const UsageError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitConfigError;
  } catch (const std::exception& e) {
    fmt::print(err, "internal error: {}\n", e.what());
    return kExitInternalError;
  }
}

std::string source_name(const fs::path& p) { return p.empty() ? "<default>" : p.string(); }

}  // namespace

int cmd_run(const CommandOptions& options, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    ExperimentConfig config = options.config.empty()
                                  ? default_experiment_config()
                                  : parse_experiment_config(read_text_file(options.config), source_name(options.config));
    if (options.workers) config.workers = *options.workers;
    if (options.seed) config.master_seed = *options.seed;
    const ExperimentPlan plan = config.plan();
    prepare_out_dir(options.out_dir);

    fmt::print(log, "{}: {} policies x {} problems, n={}, K={}, {} worker(s)\n", config.name, plan.policies.size(),
               plan.num_problems, plan.horizon, plan.problems.num_arms, plan.workers);
    const auto start = std::chrono::steady_clock::now();
    const std::vector<AggregateResult> results = run_experiment(plan);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const std::vector<std::string> files = regret_file_names(results);
    for (std::size_t j = 0; j < results.size(); ++j) {
      write_file(options.out_dir / files[j], [&](std::ostream& out) { write_regret_csv(out, results[j]); });
    }
    write_file(options.out_dir / "summary.csv", [&](std::ostream& out) { write_summary_csv(out, results, files); });
    write_file(options.out_dir / "manifest.json",
               [&](std::ostream& out) { write_manifest(out, config, results, files); });
    write_file(options.out_dir / "regret.svg", [&](std::ostream& out) {
      write_regret_svg(out, fmt::format("{} ({}, K={}, {} problems)", config.name,
                                        family_name(config.problems.family), config.problems.num_arms,
                                        config.num_problems),
                       results);
    });
    for (const auto& r : results) {
      fmt::print(log, "  {:<16} final regret {:10.2f} +- {:.2f}\n", r.label, r.mean_curve.back(),
                 r.stderr_curve.back());
    }
    fmt::print(log, "done in {:.1f}s; wrote {}\n", elapsed, options.out_dir.string());
    return static_cast<int>(kExitOk);
  });
}

int cmd_verify(const CommandOptions& options, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    VerifyConfig config = options.config.empty()
                              ? VerifyConfig{}
                              : parse_verify_config(read_text_file(options.config), source_name(options.config));
    if (options.workers) config.workers = *options.workers;
    prepare_out_dir(options.out_dir);

    const std::vector<TheoryCheckReport> reports = run_verification(config.grid, std::max<std::size_t>(1, config.workers));
    write_file(options.out_dir / "verify.csv", [&](std::ostream& out) { write_verify_csv(out, reports); });

    struct Tally {
      std::size_t rows = 0;
      std::size_t failed = 0;
      bool mandatory = true;
    };
    std::map<std::string, Tally> tally;
    std::size_t mandatory_failures = 0;
    for (const auto& r : reports) {
      Tally& t = tally[r.check];
      ++t.rows;
      t.mandatory = r.mandatory;
      if (!r.pass) {
        ++t.failed;
        if (r.mandatory) ++mandatory_failures;
      }
    }
    for (const auto& [check, t] : tally) {
      fmt::print(log, "  {:<24} {:6} rows  {:6} failed{}\n", check, t.rows, t.failed,
                 t.mandatory ? "" : "  (informational)");
    }
    if (mandatory_failures > 0) {
      fmt::print(err, "{} mandatory check(s) failed; see verify.csv\n", mandatory_failures);
      return static_cast<int>(kExitCheckFailed);
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_bench(const CommandOptions& options, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    BenchConfig config = options.config.empty()
                             ? default_bench_config()
                             : parse_bench_config(read_text_file(options.config), source_name(options.config));
    if (options.seed) config.plan.master_seed = *options.seed;
    prepare_out_dir(options.out_dir);

    // Episodes are timed one at a time so they do not compete for cores.
    const std::vector<TimingRow> rows = time_policies(config.plan);
    write_file(options.out_dir / "bench.csv", [&](std::ostream& out) { write_bench_csv(out, rows); });
    for (const auto& r : rows) {
      fmt::print(log, "  {:<14} K={:<3} n={:<6} {:9.4f}s  first/last decile {:.3g}/{:.3g} s/round\n", r.label,
                 r.num_arms, r.horizon, r.total_seconds, r.first_decile_per_round, r.last_decile_per_round);
    }
    return static_cast<int>(kExitOk);
  });
}

}  // namespace phe
