#include "randcomp/bounds.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "randcomp/error.hpp"
#include "randcomp/io.hpp"

namespace randcomp::bounds {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidArgument(std::string(name) + " must be positive and finite");
  }
}

void require_at_least_one(double v, const char* name) {
  if (!(v >= 1.0) || !std::isfinite(v)) {
    throw InvalidArgument(std::string(name) + " must be >= 1");
  }
}

// Smallest integer strictly greater than t (t >= 0).
std::uint64_t strictly_above(double threshold) {
  // 2^63 keeps the conversion exact and leaves room for the +1.
  constexpr double kLimit = 9223372036854775808.0;
  if (!std::isfinite(threshold) || threshold >= kLimit) {
    throw Overflow("bound exceeds the 64-bit integer range (epsilon too small?)");
  }
  return static_cast<std::uint64_t>(std::floor(threshold)) + 1;
}

double hoeffding_threshold(std::uint64_t x_size, std::uint64_t a_size, double tolerance) {
  const double log_xa = std::log(static_cast<double>(x_size)) + std::log(static_cast<double>(a_size));
  return (std::log(2.0) + log_xa) / (2.0 * tolerance * tolerance);
}

void require_sizes(std::uint64_t x_size, std::uint64_t a_size) {
  if (x_size == 0 || a_size == 0) throw InvalidArgument("|X| and |A| must be positive");
}

}  // namespace

std::uint64_t single_source_bound(std::uint64_t x_size, std::uint64_t a_size, double epsilon) {
  require_sizes(x_size, a_size);
  require_positive(epsilon, "epsilon");
  return strictly_above(hoeffding_threshold(x_size, a_size, epsilon));
}

void check_split(std::span<const double> deltas) {
  if (deltas.empty()) throw InvalidSplit("empty delta split");
  for (double d : deltas) {
    if (!(d > 0.0) || !std::isfinite(d)) throw InvalidSplit("every delta must be positive");
  }
  const double total = std::accumulate(deltas.begin(), deltas.end(), 0.0);
  if (std::fabs(total - 1.0) > 1e-12) throw InvalidSplit("deltas must sum to 1");
}

std::vector<double> equal_split(std::size_t m) {
  if (m == 0) throw InvalidSplit("equal split over zero sources");
  return std::vector<double>(m, 1.0 / static_cast<double>(m));
}

std::vector<std::uint64_t> multi_source_bound(std::uint64_t x_size, std::uint64_t a_size, double epsilon,
                                              std::span<const double> deltas) {
  require_sizes(x_size, a_size);
  require_positive(epsilon, "epsilon");
  check_split(deltas);
  std::vector<std::uint64_t> out;
  out.reserve(deltas.size());
  for (double d : deltas) out.push_back(strictly_above(hoeffding_threshold(x_size, a_size, epsilon * d)));
  return out;
}

double equal_split_curve(double h, double per_party_xa, double m, double epsilon) {
  return (m * m) / (2.0 * epsilon * epsilon) * (std::log(2.0) + h * std::log(per_party_xa));
}

double exact_curve(double h, double per_party_xa) { return std::pow(per_party_xa, h) + 1.0; }

std::uint64_t general_equal_split_bound(std::uint64_t h, double per_party_xa, std::uint64_t m,
                                        double epsilon) {
  if (h == 0 || m == 0) throw InvalidArgument("h and m must be positive");
  require_at_least_one(per_party_xa, "|X_i||A_i|");
  require_positive(epsilon, "epsilon");
  return strictly_above(equal_split_curve(static_cast<double>(h), per_party_xa,
                                          static_cast<double>(m), epsilon));
}

std::uint64_t exact_bound(std::uint64_t h, std::uint64_t per_party_xa) {
  if (h == 0 || per_party_xa == 0) throw InvalidArgument("h and |X_i||A_i| must be positive");
  std::uint64_t power = 1;
  for (std::uint64_t i = 0; i < h; ++i) {
    if (power > std::numeric_limits<std::uint64_t>::max() / per_party_xa) {
      throw Overflow("exact bound exceeds the 64-bit integer range");
    }
    power *= per_party_xa;
  }
  if (power == std::numeric_limits<std::uint64_t>::max()) throw Overflow("exact bound overflows");
  return power + 1;
}

double crossover_epsilon(std::uint64_t h, std::uint64_t m, double per_party_xa) {
  if (h == 0 || m == 0) throw InvalidArgument("h and m must be positive");
  require_at_least_one(per_party_xa, "|X_i||A_i|");
  const double log_xh = static_cast<double>(h) * std::log(per_party_xa);
  return static_cast<double>(m) *
         std::sqrt((std::log(2.0) + log_xh) / (2.0 * exact_curve(static_cast<double>(h), per_party_xa)));
}

namespace {

void check_range(std::span<const double> xs) {
  if (xs.empty()) throw InvalidRange("x range is empty");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] >= 1.0) || !std::isfinite(xs[i])) throw InvalidRange("x values must be >= 1");
    if (i > 0 && !(xs[i] > xs[i - 1])) throw InvalidRange("x range must be strictly ascending");
  }
}

}  // namespace

FigureTable cardinality_figure(std::span<const double> xs, double epsilon) {
  check_range(xs);
  require_positive(epsilon, "epsilon");
  FigureTable t;
  t.header = {"x", "bell_approx", "bell_exact", "triangle_approx", "triangle_exact"};
  for (double x : xs) {
    t.rows.push_back({x, equal_split_curve(2, x, 1, epsilon), exact_curve(2, x),
                      equal_split_curve(3, x, 3, epsilon), exact_curve(3, x)});
  }
  return t;
}

FigureTable crossover_figure(std::span<const double> xs,
                             std::span<const std::pair<std::uint64_t, std::uint64_t>> hm_pairs) {
  check_range(xs);
  if (hm_pairs.empty()) throw InvalidArgument("no (h, m) pairs requested");
  FigureTable t;
  t.header = {"x"};
  for (const auto& [h, m] : hm_pairs) {
    t.header.push_back("eps_h" + std::to_string(h) + "_m" + std::to_string(m));
  }
  for (double x : xs) {
    std::vector<double> row{x};
    for (const auto& [h, m] : hm_pairs) row.push_back(crossover_epsilon(h, m, x));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string to_csv(const FigureTable& table) {
  std::ostringstream out;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    out << (i ? "," : "") << table.header[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << io::format_real(row[i]);
    out << '\n';
  }
  return out.str();
}

}  // namespace randcomp::bounds
