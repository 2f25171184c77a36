#pragma once

// Dense double-precision inner loops shared by the evaluator, the distance
// metric and the witness least-squares solver. Each kernel has a portable
// scalar reference and an AVX2 variant; the public entry points dispatch at
// runtime on CPU support.
//
// axpy, scaled_copy and max_abs_diff are bit-identical across variants (no
// fused multiply-add, elementwise IEEE ops only). dot and sum reassociate and
// agree with the scalar reference to a few ulps.

#include <cstddef>
#include <span>
#include <string_view>

namespace randcomp::kernels {

enum class Isa { scalar, avx2 };

/// True when the running CPU and the build both support the AVX2 variants.
bool avx2_available() noexcept;

/// The variant the dispatching entry points currently use.
Isa active_isa() noexcept;

/// Forces the scalar reference path (for equivalence testing and debugging).
void set_force_scalar(bool force) noexcept;

std::string_view isa_name(Isa isa) noexcept;

// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
// y = alpha * x
void scaled_copy(double alpha, std::span<const double> x, std::span<double> y);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
double dot(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> a);

namespace scalar {
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept;
void scaled_copy(double alpha, const double* x, double* y, std::size_t n) noexcept;
double max_abs_diff(const double* a, const double* b, std::size_t n) noexcept;
double dot(const double* a, const double* b, std::size_t n) noexcept;
double sum(const double* a, std::size_t n) noexcept;
}  // namespace scalar

// Only callable when avx2_available() is true.
namespace avx2 {
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept;
void scaled_copy(double alpha, const double* x, double* y, std::size_t n) noexcept;
double max_abs_diff(const double* a, const double* b, std::size_t n) noexcept;
double dot(const double* a, const double* b, std::size_t n) noexcept;
double sum(const double* a, std::size_t n) noexcept;
}  // namespace avx2

}  // namespace randcomp::kernels
