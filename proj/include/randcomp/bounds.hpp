#pragma once

// Closed-form cardinality bounds for shared-randomness sources and the data
// behind the cardinality and crossover figures.
//
// Integer-valued calculators return the smallest integer strictly greater
// than the real threshold, so an exactly-integer threshold t yields t + 1.

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace randcomp::bounds {

/// Smallest n > ln(2|X||A|) / (2ε²).
std::uint64_t single_source_bound(std::uint64_t x_size, std::uint64_t a_size, double epsilon);

/// n_i = smallest integer > ln(2|X||A|) / (2(εδ_i)²). Throws InvalidSplit
/// unless every δ_i > 0 and Σδ_i = 1 within 1e-12.
std::vector<std::uint64_t> multi_source_bound(std::uint64_t x_size, std::uint64_t a_size, double epsilon,
                                              std::span<const double> deltas);

/// Smallest n > (m² / 2ε²) · (ln 2 + h ln(|X_i||A_i|)).
std::uint64_t general_equal_split_bound(std::uint64_t h, double per_party_xa, std::uint64_t m,
                                        double epsilon);

/// (|X_i||A_i|)^h + 1, computed exactly.
std::uint64_t exact_bound(std::uint64_t h, std::uint64_t per_party_xa);

/// ε at which the equal-split bound meets the exact bound:
/// m · sqrt(ln(2x^h) / (2(x^h + 1))).
double crossover_epsilon(std::uint64_t h, std::uint64_t m, double per_party_xa);

// Real-valued curves (no ceiling), as plotted.
double equal_split_curve(double h, double per_party_xa, double m, double epsilon);
double exact_curve(double h, double per_party_xa);

/// Validates a δ-split (positive entries summing to 1 within 1e-12).
void check_split(std::span<const double> deltas);
std::vector<double> equal_split(std::size_t m);

struct FigureTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Columns x, bell_approx, bell_exact, triangle_approx, triangle_exact.
/// Bell is (h=2, m=1), triangle is (h=3, m=3).
FigureTable cardinality_figure(std::span<const double> xs, double epsilon);

/// Column x, then eps_h{H}_m{M} for each requested (h, m).
FigureTable crossover_figure(std::span<const double> xs,
                             std::span<const std::pair<std::uint64_t, std::uint64_t>> hm_pairs);

/// CSV with 17 significant digits.
std::string to_csv(const FigureTable& table);

}  // namespace randcomp::bounds
