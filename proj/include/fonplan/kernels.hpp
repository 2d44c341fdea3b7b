#pragma once

#include <cstddef>
#include <string>

// Dense vector kernels used by the simplex tableau update and the physics
// sampling loops.  A scalar reference implementation is always available;
// on x86-64 an AVX2 variant is selected at runtime when the CPU supports it.
// Both variants are written without fused multiply-add and the project is
// compiled with -ffp-contract=off, so their results are bit-identical and
// solver pivot decisions do not depend on which variant ran.

namespace fon::kern {

enum class Isa { Scalar, Avx2 };

// The variant currently dispatched to.
Isa active_isa();

// Overrides dispatch (used by the equivalence tests).  Requesting Avx2 on a
// machine without AVX2 support keeps the scalar variant and returns false.
bool force_isa(Isa isa);

std::string isa_name(Isa isa);

// y[i] += a * x[i]
void axpy(double a, const double* x, double* y, std::size_t n);

// x[i] *= a
void scale(double a, double* x, std::size_t n);

// Sum of x[i] * y[i].  Accumulation order differs between variants, so the
// result is only equal up to rounding; nothing order-sensitive may use it.
double dot(const double* x, const double* y, std::size_t n);

namespace detail {
void axpy_scalar(double a, const double* x, double* y, std::size_t n);
void scale_scalar(double a, double* x, std::size_t n);
double dot_scalar(const double* x, const double* y, std::size_t n);
#if defined(__x86_64__) || defined(_M_X64)
void axpy_avx2(double a, const double* x, double* y, std::size_t n);
void scale_avx2(double a, double* x, std::size_t n);
double dot_avx2(const double* x, const double* y, std::size_t n);
bool cpu_has_avx2();
#endif
}  // namespace detail

}  // namespace fon::kern
