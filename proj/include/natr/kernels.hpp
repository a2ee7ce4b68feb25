#pragma once

// Dense double-precision kernels used by the trust-region inner loops.
//
// Every routine has a scalar reference implementation. Vectorised variants
// (AVX2+FMA on x86-64, NEON on AArch64) are compiled when the target supports
// them and picked at runtime. Reductions may round differently between
// backends, so results agree to a few ulps rather than bitwise; within one
// backend every call is deterministic.

#include <cstddef>
#include <span>
#include <string_view>

namespace natr::kernels {

enum class Backend { scalar, avx2, neon };

struct KernelTable {
  Backend backend;
  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n) noexcept;
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n) noexcept;
  // y = a * x + b * y
  void (*axpby)(double a, const double* x, double b, double* y, std::size_t n) noexcept;
  // y = R x and y = R' x for an n x n row-major upper-triangular R; entries
  // below the diagonal are never read.
  void (*trmv)(const double* R, const double* x, double* y, std::size_t n) noexcept;
  void (*trmv_t)(const double* R, const double* x, double* y, std::size_t n) noexcept;
  // (x, y) <- (c x + s y, c y - s x)
  void (*rot)(double* x, double* y, double c, double s, std::size_t n) noexcept;
};

const KernelTable& scalar_table() noexcept;
// nullptr when the backend was not compiled in.
const KernelTable* avx2_table() noexcept;
const KernelTable* neon_table() noexcept;

bool cpu_supports(Backend b) noexcept;
Backend best_available() noexcept;

// The table used by the convenience wrappers below. Defaults to
// best_available(), or to NATR_KERNELS=scalar|avx2|neon when set.
const KernelTable& active() noexcept;

// Switches the active backend. Returns false (and leaves the selection
// unchanged) if the backend is unavailable on this build or CPU. Not meant
// to be called while solves are running on other threads.
bool select(Backend b) noexcept;

std::string_view to_string(Backend b) noexcept;

double dot(std::span<const double> x, std::span<const double> y) noexcept;
double norm2(std::span<const double> x) noexcept;
void axpy(double a, std::span<const double> x, std::span<double> y) noexcept;
void axpby(double a, std::span<const double> x, double b, std::span<double> y) noexcept;
void trmv(std::span<const double> R, std::span<const double> x, std::span<double> y) noexcept;
void trmv_t(std::span<const double> R, std::span<const double> x, std::span<double> y) noexcept;
void rot(std::span<double> x, std::span<double> y, double c, double s) noexcept;

namespace detail {
extern const KernelTable kScalar;
#if defined(__x86_64__) || defined(_M_X64)
extern const KernelTable kAvx2;
#endif
#if defined(__aarch64__)
extern const KernelTable kNeon;
#endif
}  // namespace detail

}  // namespace natr::kernels
