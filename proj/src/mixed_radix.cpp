#include "randcomp/mixed_radix.hpp"

#include <cassert>
#include <limits>

#include "randcomp/error.hpp"

namespace randcomp {

MixedRadix::MixedRadix(std::vector<std::size_t> radices) : radices_(std::move(radices)) {
  size_ = 1;
  for (std::size_t r : radices_) {
    if (r == 0) throw InvalidArgument("mixed radix with a zero-sized axis");
    if (size_ > std::numeric_limits<std::size_t>::max() / r) {
      throw Overflow("mixed-radix index space exceeds size_t");
    }
    size_ *= r;
  }
}

void MixedRadix::decode(std::size_t index, std::span<std::size_t> out) const {
  assert(out.size() == radices_.size());
  for (std::size_t i = radices_.size(); i-- > 0;) {
    out[i] = index % radices_[i];
    index /= radices_[i];
  }
}

std::size_t MixedRadix::encode(std::span<const std::size_t> digits) const {
  assert(digits.size() == radices_.size());
  std::size_t index = 0;
  for (std::size_t i = 0; i < radices_.size(); ++i) index = index * radices_[i] + digits[i];
  return index;
}

std::vector<std::size_t> remap_tuples(std::span<const std::size_t> old_radices,
                                      std::span<const AxisMap> new_axes) {
  const MixedRadix old_layout({old_radices.begin(), old_radices.end()});
  std::vector<std::size_t> new_radices;
  new_radices.reserve(new_axes.size());
  for (const AxisMap& axis : new_axes) {
    assert(axis.from_axis < old_radices.size());
    new_radices.push_back(axis.digit_map.empty() ? old_radices[axis.from_axis]
                                                 : axis.digit_map.size());
  }
  const MixedRadix new_layout(new_radices);

  std::vector<std::size_t> result(new_layout.size());
  std::vector<std::size_t> new_digits(new_axes.size());
  std::vector<std::size_t> old_digits(old_radices.size(), 0);
  for (std::size_t idx = 0; idx < new_layout.size(); ++idx) {
    new_layout.decode(idx, new_digits);
    for (std::size_t j = 0; j < new_axes.size(); ++j) {
      const AxisMap& axis = new_axes[j];
      old_digits[axis.from_axis] =
          axis.digit_map.empty() ? new_digits[j] : axis.digit_map[new_digits[j]];
    }
    result[idx] = old_layout.encode(old_digits);
  }
  return result;
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) noexcept {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return a * b;
}

}  // namespace randcomp
