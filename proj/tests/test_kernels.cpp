#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "randcomp/kernels.hpp"

using namespace randcomp;

namespace {

std::vector<double> random_vector(std::mt19937_64& gen, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(gen);
  return v;
}

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("dispatch honours the scalar override") {
  kernels::set_force_scalar(true);
  CHECK(kernels::active_isa() == kernels::Isa::scalar);
  kernels::set_force_scalar(false);
  if (kernels::avx2_available()) {
    CHECK(kernels::active_isa() == kernels::Isa::avx2);
  } else {
    CHECK(kernels::active_isa() == kernels::Isa::scalar);
  }
}

TEST_CASE("scalar reference kernels on hand values") {
  const std::vector<double> x{1.0, -2.0, 0.5};
  std::vector<double> y{0.0, 1.0, 1.0};
  kernels::scalar::axpy(2.0, x.data(), y.data(), 3);
  CHECK(y == std::vector<double>{2.0, -3.0, 2.0});
  CHECK(kernels::scalar::max_abs_diff(x.data(), y.data(), 3) == doctest::Approx(1.5));
  CHECK(kernels::scalar::dot(x.data(), x.data(), 3) == doctest::Approx(5.25));
  CHECK(kernels::scalar::sum(x.data(), 3) == doctest::Approx(-0.5));
  CHECK(kernels::scalar::max_abs_diff(x.data(), x.data(), 0) == 0.0);
}

TEST_CASE("AVX2 kernels match the scalar reference") {
  if (!kernels::avx2_available()) {
    MESSAGE("AVX2 not available; equivalence test skipped");
    return;
  }
  std::mt19937_64 gen(2024);
  for (std::size_t n = 0; n <= 67; ++n) {
    CAPTURE(n);
    const auto x = random_vector(gen, n);
    const auto base = random_vector(gen, n);
    const double alpha = std::uniform_real_distribution<double>(-3, 3)(gen);

    auto y_scalar = base, y_simd = base;
    kernels::scalar::axpy(alpha, x.data(), y_scalar.data(), n);
    kernels::avx2::axpy(alpha, x.data(), y_simd.data(), n);
    CHECK(bit_equal(y_scalar, y_simd));

    kernels::scalar::scaled_copy(alpha, x.data(), y_scalar.data(), n);
    kernels::avx2::scaled_copy(alpha, x.data(), y_simd.data(), n);
    CHECK(bit_equal(y_scalar, y_simd));

    CHECK(kernels::scalar::max_abs_diff(x.data(), base.data(), n) ==
          kernels::avx2::max_abs_diff(x.data(), base.data(), n));

    const double ds = kernels::scalar::dot(x.data(), base.data(), n);
    const double dv = kernels::avx2::dot(x.data(), base.data(), n);
    CHECK(std::fabs(ds - dv) <= 1e-13 * (1.0 + static_cast<double>(n)));
    const double ss = kernels::scalar::sum(x.data(), n);
    const double sv = kernels::avx2::sum(x.data(), n);
    CHECK(std::fabs(ss - sv) <= 1e-13 * (1.0 + static_cast<double>(n)));
  }
}

TEST_CASE("max_abs_diff sees a gap in the tail and in the vector body") {
  std::vector<double> a(13, 0.0), b(13, 0.0);
  b[12] = -0.75;  // tail lane
  CHECK(kernels::max_abs_diff(a, b) == 0.75);
  b[5] = 0.9;  // vector lane
  CHECK(kernels::max_abs_diff(a, b) == 0.9);
}
