#pragma once

// Shared-randomness network model and exact evaluation.
//
// Index conventions (all tables are dense, mixed-radix, first axis most
// significant):
//   * joint input x and joint output a: party 0 most significant;
//   * full source tuple: sources sorted by id, first sorted id most significant;
//   * a party's visible tuple: the sources it sees, in the same sorted order.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace randcomp {

/// Tolerance applied when validating user-supplied probability rows.
inline constexpr double kInputTolerance = 1e-9;
/// Tolerance for internal equality checks between computed tables.
inline constexpr double kInternalTolerance = 1e-12;
/// Default cap on Π|R_i| · |X| · |A| for exact evaluation.
inline constexpr std::uint64_t kDefaultEnumerationCap = 100'000'000;

struct FinitePMF {
  std::vector<double> probs;

  FinitePMF() = default;
  explicit FinitePMF(std::vector<double> p) : probs(std::move(p)) {}

  static FinitePMF uniform(std::size_t k);
  static FinitePMF point_mass(std::size_t k, std::size_t at);

  std::size_t size() const noexcept { return probs.size(); }
  double operator[](std::size_t i) const { return probs[i]; }
  std::size_t support_size() const noexcept;

  /// Throws NormalizationError naming `what` if a weight is negative or the
  /// total is off by more than `tol`.
  void check(const std::string& what, double tol = kInputTolerance) const;
};

struct SourceSpec {
  std::string id;
  FinitePMF pmf;
  /// Party indices that see this source. Ignored for blackbox networks.
  std::vector<std::size_t> visible_to;
};

struct PartySpec {
  std::string name;
  std::size_t input_size = 1;
  std::size_t output_size = 1;
  /// strategy[input][visible tuple index] -> PMF over own outputs.
  std::vector<std::vector<FinitePMF>> strategy;
};

struct StructuredNetwork {
  std::vector<PartySpec> parties;
  std::vector<SourceSpec> sources;
};

struct BlackboxNetwork {
  std::size_t input_size = 1;
  std::size_t output_size = 1;
  std::vector<SourceSpec> sources;
  /// kernel[joint input][full source tuple index] -> PMF over joint outputs.
  std::vector<std::vector<FinitePMF>> kernel;
};

using NetworkSpec = std::variant<StructuredNetwork, BlackboxNetwork>;

/// Dense conditional table p(a|x), row-major with one row per joint input.
class ConditionalDistribution {
 public:
  ConditionalDistribution() = default;
  ConditionalDistribution(std::size_t inputs, std::size_t outputs);
  ConditionalDistribution(std::size_t inputs, std::size_t outputs, std::vector<double> table);

  std::size_t inputs() const noexcept { return inputs_; }
  std::size_t outputs() const noexcept { return outputs_; }

  double at(std::size_t x, std::size_t a) const { return table_[x * outputs_ + a]; }
  double& at(std::size_t x, std::size_t a) { return table_[x * outputs_ + a]; }

  std::span<const double> row(std::size_t x) const {
    return {table_.data() + x * outputs_, outputs_};
  }
  std::span<double> row(std::size_t x) { return {table_.data() + x * outputs_, outputs_}; }

  std::span<const double> table() const noexcept { return table_; }

  /// Throws NormalizationError if any row is not a PMF within `tol`.
  void check_rows(double tol = kInputTolerance) const;

  bool operator==(const ConditionalDistribution&) const = default;

 private:
  std::size_t inputs_ = 0;
  std::size_t outputs_ = 0;
  std::vector<double> table_;
};

/// Network whose invariants have been checked. Immutable; safe to share
/// read-only across threads.
class ValidatedNetwork {
 public:
  struct Party {
    std::string name;
    std::size_t inputs = 1;
    std::size_t outputs = 1;
    std::vector<std::size_t> visible;  // indices into sources(), ascending
    std::size_t visible_tuples = 1;
    std::vector<double> strategy;  // [x][visible tuple][a]
  };

  const NetworkSpec& spec() const noexcept { return spec_; }
  bool is_blackbox() const noexcept { return std::holds_alternative<BlackboxNetwork>(spec_); }

  /// Sources sorted by id.
  std::span<const SourceSpec> sources() const noexcept;
  std::span<const Party> parties() const noexcept { return parties_; }
  std::optional<std::size_t> source_index(const std::string& id) const;

  std::size_t joint_inputs() const noexcept { return joint_inputs_; }
  std::size_t joint_outputs() const noexcept { return joint_outputs_; }
  std::vector<std::size_t> source_sizes() const;
  std::uint64_t source_tuples() const noexcept { return source_tuples_; }
  /// Π|R_i| · |X| · |A| (saturating).
  std::uint64_t table_cells() const noexcept;

  /// Blackbox kernel, [x][full tuple][a]; empty for structured networks.
  std::span<const double> kernel() const noexcept { return kernel_; }

 private:
  friend ValidatedNetwork validate_network(NetworkSpec spec);

  NetworkSpec spec_;
  std::vector<Party> parties_;
  std::vector<double> kernel_;
  std::size_t joint_inputs_ = 1;
  std::size_t joint_outputs_ = 1;
  std::uint64_t source_tuples_ = 1;
};

struct EvalOptions {
  std::uint64_t enumeration_cap = kDefaultEnumerationCap;
};

ValidatedNetwork validate_network(NetworkSpec spec);

/// Exact p(a|x) = Σ_r Π_i p(r_i) · kernel(a|x,r).
ConditionalDistribution evaluate(const ValidatedNetwork& net, const EvalOptions& opts = {});

double infinity_distance(const ConditionalDistribution& p, const ConditionalDistribution& q);

/// Side-by-side composition: n1's parties first, then n2's. Colliding source
/// ids from n2 receive a "_2" suffix (repeated until unique). Mixed
/// structured/blackbox inputs produce a blackbox network.
ValidatedNetwork product_compose(const ValidatedNetwork& n1, const ValidatedNetwork& n2);

/// Outer product of two conditional tables (first argument most significant).
ConditionalDistribution outer_product(const ConditionalDistribution& p1,
                                      const ConditionalDistribution& p2);

/// Expands party strategies into the equivalent blackbox kernel.
ValidatedNetwork to_blackbox(const ValidatedNetwork& net);

/// Renames sources, reindexing every table so the network is unchanged.
ValidatedNetwork rename_sources(const ValidatedNetwork& net,
                                const std::map<std::string, std::string>& renames);

/// Replaces source `source_index` by `pmf` over a new alphabet whose value v
/// corresponds to old value `value_map[v]`. Strategies are re-sliced, not
/// altered.
ValidatedNetwork substitute_source(const ValidatedNetwork& net, std::size_t source_index,
                                   FinitePMF pmf, std::span<const std::size_t> value_map);

/// Product of per-party rows for one (joint input, full source tuple); the
/// structured evaluator's kernel, exposed for oracles.
void party_kernel_row(const ValidatedNetwork& net, std::size_t x,
                      std::span<const std::size_t> source_digits, std::span<double> out);

}  // namespace randcomp
