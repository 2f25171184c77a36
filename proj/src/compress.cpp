#include "randcomp/compress.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "parallel.hpp"
#include "randcomp/bounds.hpp"
#include "randcomp/rng.hpp"

namespace randcomp {

void CompressionConfig::check() const {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (n < 1) throw InvalidArgument("n must be at least 1");
  if (max_attempts < 1) throw InvalidArgument("max_attempts must be at least 1");
}

nlohmann::json to_json(const CompressionReport& r) {
  return {{"source_id", r.source_id},
          {"attempts_used", r.attempts_used},
          {"achieved_deviation", r.achieved_deviation},
          {"result_cardinality", r.result_cardinality},
          {"seed_used", r.seed_used},
          {"skipped", r.skipped},
          {"n", r.n},
          {"tolerance", r.tolerance},
          {"master_seed", r.master_seed},
          {"generator", std::string(rng::kGeneratorName)}};
}

AttemptsExhausted::AttemptsExhausted(CompressionReport report, std::size_t stage,
                                     std::vector<CompressionReport> completed)
    : Error("no attempt for source '" + report.source_id + "' met tolerance " +
            std::to_string(report.tolerance) + " within " + std::to_string(report.attempts_used) +
            " attempts (best deviation " + std::to_string(report.achieved_deviation) + ")"),
      report_(std::move(report)),
      stage_(stage),
      completed_(std::move(completed)) {}

EmpiricalSource sample_empirical(const SourceSpec& source, std::uint64_t n, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("sample_empirical needs n >= 1");
  rng::Engine gen(seed);
  const rng::CategoricalSampler sampler(source.pmf.probs);
  std::map<std::size_t, std::uint64_t> counts;
  for (std::uint64_t i = 0; i < n; ++i) ++counts[sampler(gen)];

  EmpiricalSource out;
  out.source.id = source.id;
  out.source.visible_to = source.visible_to;
  std::vector<double> probs;
  probs.reserve(counts.size());
  for (const auto& [value, count] : counts) {
    out.support.push_back(value);
    probs.push_back(static_cast<double>(count) / static_cast<double>(n));
  }
  out.source.pmf = FinitePMF(std::move(probs));
  return out;
}

namespace {

struct StageSpec {
  std::size_t source_index = 0;
  std::uint64_t n = 1;
  double tolerance = 0.0;
  std::uint64_t max_attempts = 1;
  std::uint64_t seed = 0;  // stage seed; attempts derive from it
  bool force_sampling = false;
  unsigned jobs = 1;
  EvalOptions eval{};
};

struct Attempt {
  double deviation = std::numeric_limits<double>::infinity();
  std::optional<ValidatedNetwork> network;
  std::size_t cardinality = 0;
};

Attempt run_attempt(const ValidatedNetwork& net, const ConditionalDistribution& baseline,
                    const StageSpec& stage, std::uint64_t attempt_seed) {
  const SourceSpec& source = net.sources()[stage.source_index];
  EmpiricalSource q = sample_empirical(source, stage.n, attempt_seed);
  Attempt a;
  a.cardinality = q.support.size();
  a.network = substitute_source(net, stage.source_index, std::move(q.source.pmf), q.support);
  a.deviation = infinity_distance(evaluate(*a.network, stage.eval), baseline);
  return a;
}

bool should_skip(const SourceSpec& source, const StageSpec& stage) {
  return !stage.force_sampling && stage.n >= source.pmf.support_size();
}

CompressionResult run_stage(const ValidatedNetwork& net, const ConditionalDistribution& baseline,
                            const StageSpec& stage, std::uint64_t master_seed,
                            std::size_t stage_index,
                            const std::vector<CompressionReport>& completed) {
  const SourceSpec& source = net.sources()[stage.source_index];
  CompressionReport report;
  report.source_id = source.id;
  report.n = stage.n;
  report.tolerance = stage.tolerance;
  report.master_seed = master_seed;

  if (should_skip(source, stage)) {
    report.skipped = true;
    report.result_cardinality = source.pmf.support_size();
    report.seed_used = stage.seed;
    return {net, report};
  }

  // Attempts run in batches of `jobs`; the lowest-index success wins, so the
  // outcome matches sequential execution.
  double best = std::numeric_limits<double>::infinity();
  const std::uint64_t batch = std::max(1u, stage.jobs);
  for (std::uint64_t first = 1; first <= stage.max_attempts; first += batch) {
    const std::uint64_t count = std::min(batch, stage.max_attempts - first + 1);
    std::vector<Attempt> attempts(count);
    detail::parallel_for(count, stage.jobs, [&](std::size_t i) {
      attempts[i] = run_attempt(net, baseline, stage, rng::attempt_seed(stage.seed, first + i));
    });
    for (std::uint64_t i = 0; i < count; ++i) {
      best = std::min(best, attempts[i].deviation);
      if (attempts[i].deviation < stage.tolerance) {
        report.attempts_used = first + i;
        report.achieved_deviation = attempts[i].deviation;
        report.result_cardinality = attempts[i].cardinality;
        report.seed_used = rng::attempt_seed(stage.seed, first + i);
        return {std::move(*attempts[i].network), report};
      }
    }
  }
  report.attempts_used = stage.max_attempts;
  report.achieved_deviation = best;
  throw AttemptsExhausted(report, stage_index, completed);
}

std::size_t require_source(const ValidatedNetwork& net, const std::string& id) {
  const auto idx = net.source_index(id);
  if (!idx) throw SourceNotFound("no source with id '" + id + "'");
  return *idx;
}

}  // namespace

CompressionResult compress_single(const ValidatedNetwork& net, const std::string& source_id,
                                  const CompressionConfig& cfg) {
  cfg.check();
  StageSpec stage;
  stage.source_index = require_source(net, source_id);
  stage.n = cfg.n;
  stage.tolerance = cfg.epsilon;
  stage.max_attempts = cfg.max_attempts;
  stage.seed = rng::stage_seed(cfg.seed, 0);
  stage.force_sampling = cfg.force_sampling;
  stage.jobs = cfg.jobs;
  stage.eval = cfg.eval;
  if (should_skip(net.sources()[stage.source_index], stage)) {
    return run_stage(net, ConditionalDistribution{}, stage, cfg.seed, 0, {});
  }
  const ConditionalDistribution baseline = evaluate(net, cfg.eval);
  return run_stage(net, baseline, stage, cfg.seed, 0, {});
}

MultiCompressionResult compress_many(const ValidatedNetwork& net,
                                     const std::vector<std::string>& source_ids,
                                     const MultiCompressionConfig& cfg) {
  if (!(cfg.epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (cfg.max_attempts < 1) throw InvalidArgument("max_attempts must be at least 1");
  if (source_ids.empty()) throw InvalidArgument("no sources to compress");
  const std::vector<double> deltas =
      cfg.deltas.empty() ? bounds::equal_split(source_ids.size()) : cfg.deltas;
  if (deltas.size() != source_ids.size()) {
    throw InvalidSplit("delta split size does not match the number of sources");
  }
  bounds::check_split(deltas);
  for (std::size_t i = 0; i < source_ids.size(); ++i) {
    require_source(net, source_ids[i]);
    for (std::size_t j = 0; j < i; ++j) {
      if (source_ids[i] == source_ids[j]) throw InvalidArgument("duplicate source id in list");
    }
  }
  const std::vector<std::uint64_t> ns =
      cfg.n.empty() ? bounds::multi_source_bound(net.joint_inputs(), net.joint_outputs(),
                                                 cfg.epsilon, deltas)
                    : cfg.n;
  if (ns.size() != source_ids.size()) throw InvalidArgument("one sample count per source needed");
  for (std::uint64_t n : ns) {
    if (n < 1) throw InvalidArgument("sample counts must be at least 1");
  }

  const ConditionalDistribution original = evaluate(net, cfg.eval);
  MultiCompressionResult result{net, {}, 0.0};
  ConditionalDistribution baseline = original;
  for (std::size_t i = 0; i < source_ids.size(); ++i) {
    StageSpec stage;
    stage.source_index = require_source(result.network, source_ids[i]);
    stage.n = ns[i];
    stage.tolerance = cfg.epsilon * deltas[i];
    stage.max_attempts = cfg.max_attempts;
    stage.seed = rng::stage_seed(cfg.seed, i);
    stage.force_sampling = cfg.force_sampling;
    stage.jobs = cfg.jobs;
    stage.eval = cfg.eval;
    CompressionResult stage_result =
        run_stage(result.network, baseline, stage, cfg.seed, i, result.reports);
    const bool changed = !stage_result.report.skipped;
    result.network = std::move(stage_result.network);
    result.reports.push_back(std::move(stage_result.report));
    if (changed) baseline = evaluate(result.network, cfg.eval);
  }
  result.final_deviation = infinity_distance(baseline, original);
  return result;
}

double estimate_success_probability(const ValidatedNetwork& net, const std::string& source_id,
                                    std::uint64_t n, double epsilon, std::uint64_t trials,
                                    std::uint64_t seed, const SuccessEstimateOptions& opts) {
  if (trials < 1) throw InvalidArgument("trials must be at least 1");
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (n < 1) throw InvalidArgument("n must be at least 1");
  StageSpec stage;
  stage.source_index = require_source(net, source_id);
  stage.n = n;
  stage.tolerance = epsilon;
  stage.max_attempts = 1;
  stage.seed = rng::stage_seed(seed, 0);
  stage.force_sampling = opts.force_sampling;
  stage.eval = opts.eval;
  if (should_skip(net.sources()[stage.source_index], stage)) return 1.0;

  const ConditionalDistribution baseline = evaluate(net, opts.eval);
  std::vector<char> success(trials, 0);
  detail::parallel_for(trials, opts.jobs, [&](std::size_t t) {
    const Attempt a = run_attempt(net, baseline, stage, rng::attempt_seed(stage.seed, t + 1));
    success[t] = a.deviation < epsilon ? 1 : 0;
  });
  const auto hits = std::count(success.begin(), success.end(), 1);
  return static_cast<double>(hits) / static_cast<double>(trials);
}

}  // namespace randcomp
