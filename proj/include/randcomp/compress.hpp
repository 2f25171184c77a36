#pragma once

// Randomness compression by empirical resampling: a source is replaced by the
// empirical distribution of n i.i.d. draws from it, and attempts are repeated
// with fresh seeds until the network's output table moves by less than the
// tolerance in the ∞-norm. Multiple sources are compressed one after another,
// each stage measured against the previous stage's table so the per-stage
// tolerances add up to the total.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "randcomp/error.hpp"
#include "randcomp/netmodel.hpp"

namespace randcomp {

struct CompressionConfig {
  double epsilon = 0.1;
  std::uint64_t n = 1;
  std::uint64_t max_attempts = 100;
  std::uint64_t seed = 0;
  /// Sample even when n already covers the source's support.
  bool force_sampling = false;
  /// Worker threads for attempts; results are identical for any value.
  unsigned jobs = 1;
  EvalOptions eval{};

  void check() const;
};

struct CompressionReport {
  std::string source_id;
  std::uint64_t attempts_used = 0;
  double achieved_deviation = 0.0;
  std::size_t result_cardinality = 0;
  std::uint64_t seed_used = 0;
  bool skipped = false;
  // Context for reproducing the stage.
  std::uint64_t n = 0;
  double tolerance = 0.0;
  std::uint64_t master_seed = 0;
};

nlohmann::json to_json(const CompressionReport& report);

/// Thrown when no attempt meets the tolerance. `report` carries the best
/// deviation seen; `stage` is the failing stage of a multi-source run.
class AttemptsExhausted : public Error {
 public:
  AttemptsExhausted(CompressionReport report, std::size_t stage,
                    std::vector<CompressionReport> completed = {});
  const CompressionReport& report() const noexcept { return report_; }
  std::size_t stage() const noexcept { return stage_; }
  const std::vector<CompressionReport>& completed() const noexcept { return completed_; }

 private:
  CompressionReport report_;
  std::size_t stage_;
  std::vector<CompressionReport> completed_;
};

struct EmpiricalSource {
  /// Source over the sampled values only; value v stands for original value
  /// support[v].
  SourceSpec source;
  std::vector<std::size_t> support;
};

/// Empirical distribution of n draws from `source` (ascending support).
EmpiricalSource sample_empirical(const SourceSpec& source, std::uint64_t n, std::uint64_t seed);

struct CompressionResult {
  ValidatedNetwork network;
  CompressionReport report;
};

CompressionResult compress_single(const ValidatedNetwork& net, const std::string& source_id,
                                  const CompressionConfig& cfg);

struct MultiCompressionConfig {
  double epsilon = 0.1;
  /// δ-split; empty means 1/m each.
  std::vector<double> deltas;
  /// Per-stage sample counts; empty means the multi-source Hoeffding bound.
  std::vector<std::uint64_t> n;
  std::uint64_t max_attempts = 100;
  std::uint64_t seed = 0;
  bool force_sampling = false;
  unsigned jobs = 1;
  EvalOptions eval{};
};

struct MultiCompressionResult {
  ValidatedNetwork network;
  std::vector<CompressionReport> reports;
  /// ∞-distance between the final and the original tables.
  double final_deviation = 0.0;
};

MultiCompressionResult compress_many(const ValidatedNetwork& net,
                                     const std::vector<std::string>& source_ids,
                                     const MultiCompressionConfig& cfg);

struct SuccessEstimateOptions {
  bool force_sampling = false;
  unsigned jobs = 1;
  EvalOptions eval{};
};

/// Fraction of `trials` independent single attempts whose deviation is < ε.
double estimate_success_probability(const ValidatedNetwork& net, const std::string& source_id,
                                    std::uint64_t n, double epsilon, std::uint64_t trials,
                                    std::uint64_t seed, const SuccessEstimateOptions& opts = {});

}  // namespace randcomp
