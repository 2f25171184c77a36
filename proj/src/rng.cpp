#include "randcomp/rng.hpp"

#include <algorithm>

#include "randcomp/error.hpp"

namespace randcomp::rng {

CategoricalSampler::CategoricalSampler(std::span<const double> probs) {
  cdf_.reserve(probs.size());
  double acc = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cdf_.push_back(acc);
    if (probs[i] > 0.0) {
      last_positive_ = i;
      any = true;
    }
  }
  if (!any) throw InvalidArgument("cannot sample from a PMF with no positive weight");
}

std::size_t CategoricalSampler::operator()(Engine& gen) const {
  const double u = uniform01(gen);
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  // Rounding can leave the total just under 1.
  if (it == cdf_.end()) return last_positive_;
  return static_cast<std::size_t>(it - cdf_.begin());
}

}  // namespace randcomp::rng
