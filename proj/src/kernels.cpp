#include "fonplan/kernels.hpp"

namespace fon::kern {

namespace {

struct Dispatch {
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scale)(double, double*, std::size_t);
  double (*dot)(const double*, const double*, std::size_t);
  Isa isa;
};

Dispatch pick(Isa wanted) {
#if defined(__x86_64__) || defined(_M_X64)
  if (wanted == Isa::Avx2 && detail::cpu_has_avx2()) {
    return {detail::axpy_avx2, detail::scale_avx2, detail::dot_avx2, Isa::Avx2};
  }
#endif
  return {detail::axpy_scalar, detail::scale_scalar, detail::dot_scalar,
          Isa::Scalar};
}

Dispatch g_dispatch = pick(Isa::Avx2);

}  // namespace

Isa active_isa() { return g_dispatch.isa; }

bool force_isa(Isa isa) {
  g_dispatch = pick(isa);
  return g_dispatch.isa == isa;
}

std::string isa_name(Isa isa) {
  return isa == Isa::Avx2 ? "avx2" : "scalar";
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  g_dispatch.axpy(a, x, y, n);
}

void scale(double a, double* x, std::size_t n) { g_dispatch.scale(a, x, n); }

double dot(const double* x, const double* y, std::size_t n) {
  return g_dispatch.dot(x, y, n);
}

namespace detail {

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_scalar(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

}  // namespace detail

}  // namespace fon::kern
