#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace randcomp {

/// Mixed-radix integer codec; digit 0 is the most significant.
class MixedRadix {
 public:
  MixedRadix() = default;
  /// Throws Overflow if the product of radices does not fit in size_t.
  explicit MixedRadix(std::vector<std::size_t> radices);

  std::size_t size() const noexcept { return size_; }
  std::size_t digits() const noexcept { return radices_.size(); }
  const std::vector<std::size_t>& radices() const noexcept { return radices_; }

  void decode(std::size_t index, std::span<std::size_t> out) const;
  std::size_t encode(std::span<const std::size_t> digits) const;

 private:
  std::vector<std::size_t> radices_;
  std::size_t size_ = 1;
};

/// One axis of a re-laid-out tuple: which old axis it reads from and, when
/// non-empty, the map from new digit values to old digit values.
struct AxisMap {
  std::size_t from_axis = 0;
  std::vector<std::size_t> digit_map;
};

/// For every tuple index in the new layout, the matching index in the old one.
std::vector<std::size_t> remap_tuples(std::span<const std::size_t> old_radices,
                                      std::span<const AxisMap> new_axes);

/// Product that saturates at UINT64_MAX instead of wrapping.
std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) noexcept;

}  // namespace randcomp
