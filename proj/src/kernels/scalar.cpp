#include "natr/kernels.hpp"

namespace natr::kernels::detail {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) noexcept {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void axpby_scalar(double a, const double* x, double b, double* y, std::size_t n) noexcept {
  for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

void trmv_scalar(const double* R, const double* x, double* y, std::size_t n) noexcept {
  for (std::size_t i = 0; i < n; ++i) y[i] = dot_scalar(R + i * n + i, x + i, n - i);
}

void trmv_t_scalar(const double* R, const double* x, double* y, std::size_t n) noexcept {
  for (std::size_t i = 0; i < n; ++i) y[i] = 0.0;
  for (std::size_t i = 0; i < n; ++i) axpy_scalar(x[i], R + i * n + i, y + i, n - i);
}

void rot_scalar(double* x, double* y, double c, double s, std::size_t n) noexcept {
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi + s * yi;
    y[i] = c * yi - s * xi;
  }
}

}  // namespace

const KernelTable kScalar{Backend::scalar, dot_scalar,  axpy_scalar, axpby_scalar,
                          trmv_scalar,     trmv_t_scalar, rot_scalar};

}  // namespace natr::kernels::detail
