#include <atomic>
#include <cassert>

#include "randcomp/kernels.hpp"

namespace randcomp::kernels {

namespace {

std::atomic<bool> g_force_scalar{false};

bool detect_avx2() noexcept {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

bool use_avx2() noexcept {
  return !g_force_scalar.load(std::memory_order_relaxed) && avx2_available();
}

}  // namespace

bool avx2_available() noexcept {
  static const bool available = detect_avx2();
  return available;
}

Isa active_isa() noexcept { return use_avx2() ? Isa::avx2 : Isa::scalar; }

void set_force_scalar(bool force) noexcept {
  g_force_scalar.store(force, std::memory_order_relaxed);
}

std::string_view isa_name(Isa isa) noexcept {
  return isa == Isa::avx2 ? "avx2" : "scalar";
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  if (use_avx2()) {
    avx2::axpy(alpha, x.data(), y.data(), x.size());
  } else {
    scalar::axpy(alpha, x.data(), y.data(), x.size());
  }
}

void scaled_copy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  if (use_avx2()) {
    avx2::scaled_copy(alpha, x.data(), y.data(), x.size());
  } else {
    scalar::scaled_copy(alpha, x.data(), y.data(), x.size());
  }
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return use_avx2() ? avx2::max_abs_diff(a.data(), b.data(), a.size())
                    : scalar::max_abs_diff(a.data(), b.data(), a.size());
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return use_avx2() ? avx2::dot(a.data(), b.data(), a.size())
                    : scalar::dot(a.data(), b.data(), a.size());
}

double sum(std::span<const double> a) {
  return use_avx2() ? avx2::sum(a.data(), a.size()) : scalar::sum(a.data(), a.size());
}

}  // namespace randcomp::kernels
