#pragma once

#include <filesystem>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "phe/config.hpp"
#include "phe/simulator.hpp"
#include "phe/theory.hpp"

namespace phe {

/// File-name-safe form of a policy label, e.g. "PHE(a=1.1)" -> "PHE_a1.1".
std::string label_slug(std::string_view label);

/// One regret file name per result, unique even when slugs collide.
std::vector<std::string> regret_file_names(std::span<const AggregateResult> results);

/// round,mean_regret,stderr with rounds numbered from 1.
void write_regret_csv(std::ostream& out, const AggregateResult& result);

/// policy,num_problems,half_horizon_mean_regret,final_mean_regret,final_stderr,file
void write_summary_csv(std::ostream& out, std::span<const AggregateResult> results,
                       std::span<const std::string> files);

/// JSON manifest: effective config (YAML text and hash), master seed, output
/// files and per-policy wall-clock seconds.
void write_manifest(std::ostream& out, const ExperimentConfig& config, std::span<const AggregateResult> results,
                    std::span<const std::string> files);

/// Mean regret against round, one polyline per policy.
void write_regret_svg(std::ostream& out, std::string_view title, std::span<const AggregateResult> results);

/// check,parameters,lhs,rhs,margin,pass
void write_verify_csv(std::ostream& out, std::span<const TheoryCheckReport> reports);

/// policy,K,n,total_seconds,first_decile_per_round,last_decile_per_round
void write_bench_csv(std::ostream& out, std::span<const TimingRow> rows);

/// Opens `path` for writing; throws std::filesystem::filesystem_error on failure.
void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body);

}  // namespace phe
