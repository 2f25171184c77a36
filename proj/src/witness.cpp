#include "randcomp/witness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>

#include "parallel.hpp"
#include "randcomp/error.hpp"
#include "randcomp/kernels.hpp"
#include "randcomp/mixed_radix.hpp"

namespace randcomp::witness {

namespace {

std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t out = 1;
  for (std::uint64_t i = 0; i < exp; ++i) out = saturating_mul(out, base);
  return out;
}

std::uint64_t tuple_count(const FeasibilityProblem& problem) {
  std::uint64_t tuples = 1;
  for (const PartyAlphabet& p : problem.parties) {
    tuples = saturating_mul(tuples, checked_pow(p.outputs, p.inputs * problem.m));
  }
  return tuples;
}

void check_problem(const FeasibilityProblem& problem) {
  if (problem.m < 1) throw InvalidArgument("candidate cardinality m must be at least 1");
  if (problem.parties.empty()) throw InvalidArgument("no party alphabets given");
  std::size_t inputs = 1, outputs = 1;
  for (const PartyAlphabet& p : problem.parties) {
    if (p.inputs < 1 || p.outputs < 1) throw InvalidArgument("party alphabets must be nonempty");
    inputs *= p.inputs;
    outputs *= p.outputs;
  }
  if (problem.target.inputs() != inputs || problem.target.outputs() != outputs) {
    throw ShapeMismatch("target table shape does not match the party alphabets");
  }
}

// Least squares over 0/1 columns plus the normalization row, solved by
// Householder QR with column pivoting. Columns dropped for rank deficiency
// get weight zero.
class WeightSolver {
 public:
  WeightSolver(std::span<const double> target, std::size_t inputs, std::size_t outputs)
      : target_(target), inputs_(inputs), outputs_(outputs), rows_(inputs * outputs + 1) {}

  // columns[j] lists, per joint input x, the joint output the column emits.
  // Returns the weights if they reproduce the target within tol and are
  // nonnegative within tol.
  std::optional<std::vector<double>> solve(const std::vector<std::vector<std::uint32_t>>& columns,
                                           double tol) {
    const std::size_t k = columns.size();
    matrix_.assign(rows_ * k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
      double* col = matrix_.data() + j * rows_;
      for (std::size_t x = 0; x < inputs_; ++x) col[x * outputs_ + columns[j][x]] = 1.0;
      col[rows_ - 1] = 1.0;
    }
    rhs_.assign(target_.begin(), target_.end());
    rhs_.push_back(1.0);

    std::vector<std::size_t> perm(k);
    for (std::size_t j = 0; j < k; ++j) perm[j] = j;
    std::size_t rank = 0;
    for (; rank < k; ++rank) {
      // Pivot on the largest remaining column norm.
      std::size_t best = rank;
      double best_norm = -1.0;
      for (std::size_t c = rank; c < k; ++c) {
        const auto tail = column(c).subspan(rank);
        const double norm = kernels::dot(tail, tail);
        if (norm > best_norm) {
          best_norm = norm;
          best = c;
        }
      }
      if (std::sqrt(best_norm) <= 1e-10) break;
      if (best != rank) {
        std::swap_ranges(column(best).begin(), column(best).end(), column(rank).begin());
        std::swap(perm[best], perm[rank]);
      }
      reflect(rank, k);
    }

    // Back substitution on the leading rank x rank triangle.
    std::vector<double> z(rank, 0.0);
    for (std::size_t i = rank; i-- > 0;) {
      double acc = rhs_[i];
      for (std::size_t j = i + 1; j < rank; ++j) acc -= column(j)[i] * z[j];
      z[i] = acc / column(i)[i];
    }
    std::vector<double> weights(k, 0.0);
    for (std::size_t i = 0; i < rank; ++i) weights[perm[i]] = z[i];

    for (double w : weights) {
      if (w < -tol) return std::nullopt;
    }
    if (residual(columns, weights) > tol) return std::nullopt;

    double total = 0.0;
    for (double& w : weights) total += (w = std::max(w, 0.0));
    if (!(total > 0.0)) return std::nullopt;
    for (double& w : weights) w /= total;
    return weights;
  }

 private:
  std::span<double> column(std::size_t j) { return {matrix_.data() + j * rows_, rows_}; }

  // Householder reflection zeroing column j below the diagonal, applied to
  // the trailing columns and the right-hand side.
  void reflect(std::size_t j, std::size_t k) {
    auto head = column(j).subspan(j);
    const double norm = std::sqrt(kernels::dot(head, head));
    const double alpha = head[0] > 0.0 ? -norm : norm;
    v_.assign(head.begin(), head.end());
    v_[0] -= alpha;
    const double vnorm2 = kernels::dot(v_, v_);
    if (vnorm2 == 0.0) return;
    for (std::size_t c = j + 1; c < k; ++c) {
      auto tail = column(c).subspan(j);
      kernels::axpy(-2.0 * kernels::dot(v_, tail) / vnorm2, v_, tail);
    }
    auto rhs_tail = std::span<double>(rhs_).subspan(j);
    kernels::axpy(-2.0 * kernels::dot(v_, rhs_tail) / vnorm2, v_, rhs_tail);
    head[0] = alpha;
    std::fill(head.begin() + 1, head.end(), 0.0);
  }

  double residual(const std::vector<std::vector<std::uint32_t>>& columns,
                  const std::vector<double>& weights) {
    fitted_.assign(rows_, 0.0);
    for (std::size_t j = 0; j < columns.size(); ++j) {
      for (std::size_t x = 0; x < inputs_; ++x) fitted_[x * outputs_ + columns[j][x]] += weights[j];
      fitted_[rows_ - 1] += weights[j];
    }
    double worst = std::fabs(fitted_[rows_ - 1] - 1.0);
    return std::max(worst, kernels::max_abs_diff(std::span<const double>(fitted_).first(rows_ - 1),
                                                 target_));
  }

  std::span<const double> target_;
  std::size_t inputs_, outputs_, rows_;
  std::vector<double> matrix_, rhs_, v_, fitted_;
};

class Searcher {
 public:
  explicit Searcher(const FeasibilityProblem& problem)
      : problem_(problem), m_(problem.m), h_(problem.parties.size()) {
    joint_inputs_ = problem.target.inputs();
    joint_outputs_ = problem.target.outputs();
    for (const PartyAlphabet& p : problem.parties) {
      strategy_layouts_.emplace_back(std::vector<std::size_t>(p.inputs * m_, p.outputs));
      code_radices_.push_back(checked_pow(p.outputs, p.inputs));
      strategy_radices_.push_back(strategy_layouts_.back().size());
    }
    // Joint input -> per-party inputs, party 0 most significant.
    std::vector<std::size_t> in_radices;
    for (const PartyAlphabet& p : problem.parties) in_radices.push_back(p.inputs);
    const MixedRadix in_layout(in_radices);
    party_inputs_.assign(joint_inputs_ * h_, 0);
    for (std::size_t x = 0; x < joint_inputs_; ++x) {
      in_layout.decode(x, std::span<std::size_t>(party_inputs_).subspan(x * h_, h_));
    }
    for (std::size_t i = 0; i < joint_inputs_ * joint_outputs_; ++i) {
      if (problem.target.table()[i] > problem.tolerance) positive_cells_.push_back(i);
    }
    tuples_ = 1;
    for (std::size_t r : strategy_radices_) tuples_ *= r;
  }

  std::uint64_t tuples() const noexcept { return tuples_; }

  // Scans tuples [begin, end) in order; returns the first accepted tuple.
  std::optional<std::pair<std::uint64_t, Realization>> scan(std::uint64_t begin, std::uint64_t end,
                                                            const std::atomic<std::uint64_t>& best) const {
    WeightSolver solver(problem_.target.table(), joint_inputs_, joint_outputs_);
    const MixedRadix tuple_layout(strategy_radices_);
    std::vector<std::size_t> strategy(h_);
    tuple_layout.decode(begin, strategy);

    std::vector<std::vector<std::size_t>> codes(h_, std::vector<std::size_t>(m_));
    std::vector<std::size_t> digits;
    for (std::size_t i = 0; i < h_; ++i) fill_codes(i, strategy[i], codes[i], digits);

    std::vector<std::uint32_t> stamp(joint_inputs_ * joint_outputs_, 0);
    std::uint32_t epoch = 0;
    std::vector<std::size_t> kept_r;
    std::vector<std::size_t> kept_code;
    std::vector<std::vector<std::uint32_t>> columns;
    std::vector<std::uint32_t> cells(joint_inputs_);

    for (std::uint64_t t = begin; t < end; ++t) {
      if ((t & 0xFFF) == 0 && t > best.load(std::memory_order_relaxed)) return std::nullopt;

      kept_r.clear();
      kept_code.clear();
      columns.clear();
      ++epoch;
      for (std::size_t r = 0; r < m_; ++r) {
        std::size_t code = 0;
        for (std::size_t i = 0; i < h_; ++i) code = code * code_radices_[i] + codes[i][r];
        if (std::find(kept_code.begin(), kept_code.end(), code) != kept_code.end()) continue;
        if (!column_cells(codes, r, cells)) continue;
        kept_r.push_back(r);
        kept_code.push_back(code);
        for (std::size_t x = 0; x < joint_inputs_; ++x) stamp[x * joint_outputs_ + cells[x]] = epoch;
        columns.push_back(cells);
      }
      const bool covered =
          !columns.empty() && std::all_of(positive_cells_.begin(), positive_cells_.end(),
                                          [&](std::size_t c) { return stamp[c] == epoch; });
      if (covered) {
        if (auto weights = solver.solve(columns, problem_.tolerance)) {
          Realization real;
          real.source_pmf.probs.assign(m_, 0.0);
          for (std::size_t j = 0; j < kept_r.size(); ++j) real.source_pmf.probs[kept_r[j]] = (*weights)[j];
          for (std::size_t i = 0; i < h_; ++i) {
            digits.resize(strategy_layouts_[i].digits());
            strategy_layouts_[i].decode(strategy[i], digits);
            real.strategies.push_back(digits);
          }
          return std::make_pair(t, std::move(real));
        }
      }

      // Odometer step; only the parties whose strategy changed are re-coded.
      for (std::size_t i = h_; i-- > 0;) {
        if (++strategy[i] < strategy_radices_[i]) {
          fill_codes(i, strategy[i], codes[i], digits);
          break;
        }
        strategy[i] = 0;
        fill_codes(i, 0, codes[i], digits);
      }
    }
    return std::nullopt;
  }

 private:
  // codes[r] = party i's response function to source value r, as a base-|A_i|
  // integer over its inputs (input 0 most significant).
  void fill_codes(std::size_t i, std::size_t strategy, std::vector<std::size_t>& codes,
                  std::vector<std::size_t>& digits) const {
    const PartyAlphabet& p = problem_.parties[i];
    digits.resize(strategy_layouts_[i].digits());
    strategy_layouts_[i].decode(strategy, digits);
    for (std::size_t r = 0; r < m_; ++r) {
      std::size_t code = 0;
      for (std::size_t x = 0; x < p.inputs; ++x) code = code * p.outputs + digits[x * m_ + r];
      codes[r] = code;
    }
  }

  // Joint output per joint input for source value r. False if the column
  // hits a zero cell of the target.
  bool column_cells(const std::vector<std::vector<std::size_t>>& codes, std::size_t r,
                    std::vector<std::uint32_t>& cells) const {
    const auto table = problem_.target.table();
    for (std::size_t x = 0; x < joint_inputs_; ++x) {
      std::size_t a = 0;
      for (std::size_t i = 0; i < h_; ++i) {
        const PartyAlphabet& p = problem_.parties[i];
        const std::size_t xi = party_inputs_[x * h_ + i];
        // Digit xi of the code, most significant first.
        std::size_t shift = 1;
        for (std::size_t d = xi + 1; d < p.inputs; ++d) shift *= p.outputs;
        a = a * p.outputs + (codes[i][r] / shift) % p.outputs;
      }
      if (!(table[x * joint_outputs_ + a] > problem_.tolerance)) return false;
      cells[x] = static_cast<std::uint32_t>(a);
    }
    return true;
  }

  const FeasibilityProblem& problem_;
  std::size_t m_, h_;
  std::size_t joint_inputs_ = 1, joint_outputs_ = 1;
  std::vector<MixedRadix> strategy_layouts_;
  std::vector<std::size_t> code_radices_;
  std::vector<std::size_t> strategy_radices_;
  std::vector<std::size_t> party_inputs_;
  std::vector<std::size_t> positive_cells_;
  std::uint64_t tuples_ = 1;
};

}  // namespace

std::uint64_t search_steps(const FeasibilityProblem& problem) {
  return saturating_mul(saturating_mul(tuple_count(problem), problem.m), problem.target.inputs());
}

std::optional<Realization> deterministic_feasible(const FeasibilityProblem& problem,
                                                  const SearchOptions& opts) {
  check_problem(problem);
  const std::uint64_t steps = search_steps(problem);
  if (steps > opts.step_cap) {
    throw SearchCapExceeded("search at m = " + std::to_string(problem.m) + " needs " +
                            std::to_string(steps) + " steps; cap is " +
                            std::to_string(opts.step_cap));
  }
  const Searcher searcher(problem);
  const std::uint64_t total = searcher.tuples();
  constexpr std::uint64_t kChunk = 1 << 16;
  const std::uint64_t chunks = (total + kChunk - 1) / kChunk;

  // Chunks are claimed in ascending order and the smallest accepted index
  // wins, so the answer does not depend on the number of workers.
  std::atomic<std::uint64_t> best{std::numeric_limits<std::uint64_t>::max()};
  std::optional<Realization> found;
  std::mutex found_mutex;
  detail::parallel_for(chunks, opts.jobs, [&](std::size_t c) {
    const std::uint64_t begin = c * kChunk;
    if (begin > best.load()) return;
    const std::uint64_t end = std::min(total, begin + kChunk);
    auto hit = searcher.scan(begin, end, best);
    if (!hit) return;
    std::lock_guard lock(found_mutex);
    if (hit->first < best.load()) {
      best = hit->first;
      found = std::move(hit->second);
    }
  });
  return found;
}

std::optional<std::size_t> min_cardinality(const ConditionalDistribution& target,
                                           const std::vector<PartyAlphabet>& parties,
                                           std::size_t m_max, double tolerance,
                                           const SearchOptions& opts) {
  if (m_max < 1) throw InvalidArgument("m_max must be at least 1");
  for (std::size_t m = 1; m <= m_max; ++m) {
    if (deterministic_feasible({target, parties, m, tolerance}, opts)) return m;
  }
  return std::nullopt;
}

bool verify_inner_product_pattern(const Realization& realization, std::size_t x_size) {
  const std::size_t m = realization.source_pmf.size();
  if (realization.strategies.empty() || realization.strategies[0].size() != x_size * m) {
    throw ShapeMismatch("realization does not match x_size");
  }
  const auto& strat = realization.strategies[0];
  const auto& p = realization.source_pmf.probs;
  std::vector<std::vector<double>> u(x_size, std::vector<double>(m));
  for (std::size_t x = 0; x < x_size; ++x) {
    for (std::size_t r = 0; r < m; ++r) {
      if (strat[x * m + r] > 1) throw ShapeMismatch("outputs must be binary");
      u[x][r] = strat[x * m + r] == 1 ? 1.0 : 0.0;
    }
  }
  auto inner = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t r = 0; r < m; ++r) acc += p[r] * a[r] * b[r];
    return acc;
  };
  constexpr double kTol = 1e-9;
  for (std::size_t x = 0; x < x_size; ++x) {
    for (std::size_t y = 0; y < x_size; ++y) {
      if (std::fabs(inner(u[x], u[y]) - (x == y ? 0.5 : 0.25)) > kTol) return false;
      std::vector<double> vx(m), vy(m);
      for (std::size_t r = 0; r < m; ++r) {
        vx[r] = u[x][r] - 0.5;
        vy[r] = u[y][r] - 0.5;
      }
      if (std::fabs(inner(vx, vy) - (x == y ? 0.25 : 0.0)) > kTol) return false;
    }
  }
  return true;
}

NetworkSpec realization_network(const Realization& realization,
                                const std::vector<PartyAlphabet>& parties) {
  const std::size_t m = realization.source_pmf.size();
  if (realization.strategies.size() != parties.size()) {
    throw ShapeMismatch("one strategy per party expected");
  }
  StructuredNetwork net;
  SourceSpec r{"R", realization.source_pmf, {}};
  for (std::size_t i = 0; i < parties.size(); ++i) {
    const PartyAlphabet& alpha = parties[i];
    if (realization.strategies[i].size() != alpha.inputs * m) {
      throw ShapeMismatch("strategy table size does not match the alphabet");
    }
    r.visible_to.push_back(i);
    PartySpec party{"P" + std::to_string(i), alpha.inputs, alpha.outputs, {}};
    for (std::size_t x = 0; x < alpha.inputs; ++x) {
      auto& rows = party.strategy.emplace_back();
      for (std::size_t v = 0; v < m; ++v) {
        rows.push_back(FinitePMF::point_mass(alpha.outputs, realization.strategies[i][x * m + v]));
      }
    }
    net.parties.push_back(std::move(party));
  }
  net.sources.push_back(std::move(r));
  return net;
}

Realization pad_realization(const Realization& realization,
                            const std::vector<PartyAlphabet>& parties) {
  const std::size_t m = realization.source_pmf.size();
  Realization padded;
  padded.source_pmf = realization.source_pmf;
  padded.source_pmf.probs.push_back(0.0);
  for (std::size_t i = 0; i < realization.strategies.size(); ++i) {
    std::vector<std::size_t> s;
    for (std::size_t x = 0; x < parties[i].inputs; ++x) {
      for (std::size_t v = 0; v < m; ++v) s.push_back(realization.strategies[i][x * m + v]);
      s.push_back(0);
    }
    padded.strategies.push_back(std::move(s));
  }
  return padded;
}

nlohmann::json to_json(const Realization& realization) {
  return {{"source_pmf", realization.source_pmf.probs},
          {"strategies", realization.strategies},
          {"symmetry_pruning", false}};
}

}  // namespace randcomp::witness
