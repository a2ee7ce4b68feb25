#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string_view>

#include "natr/kernels.hpp"

namespace natr::kernels {

const KernelTable& scalar_table() noexcept { return detail::kScalar; }

const KernelTable* avx2_table() noexcept {
#if defined(__x86_64__) || defined(_M_X64)
  return &detail::kAvx2;
#else
  return nullptr;
#endif
}

const KernelTable* neon_table() noexcept {
#if defined(__aarch64__)
  return &detail::kNeon;
#else
  return nullptr;
#endif
}

bool cpu_supports(Backend b) noexcept {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::neon:
      return neon_table() != nullptr;
  }
  return false;
}

Backend best_available() noexcept {
  if (avx2_table() && cpu_supports(Backend::avx2)) return Backend::avx2;
  if (neon_table() && cpu_supports(Backend::neon)) return Backend::neon;
  return Backend::scalar;
}

namespace {

const KernelTable* table_for(Backend b) noexcept {
  if (!cpu_supports(b)) return nullptr;
  switch (b) {
    case Backend::scalar:
      return &scalar_table();
    case Backend::avx2:
      return avx2_table();
    case Backend::neon:
      return neon_table();
  }
  return nullptr;
}

const KernelTable* initial_table() noexcept {
  if (const char* env = std::getenv("NATR_KERNELS")) {
    const std::string_view want(env);
    for (Backend b : {Backend::scalar, Backend::avx2, Backend::neon}) {
      if (want == to_string(b)) {
        if (const KernelTable* t = table_for(b)) return t;
      }
    }
  }
  return table_for(best_available());
}

std::atomic<const KernelTable*>& active_slot() noexcept {
  static std::atomic<const KernelTable*> slot{initial_table()};
  return slot;
}

}  // namespace

const KernelTable& active() noexcept { return *active_slot().load(std::memory_order_acquire); }

bool select(Backend b) noexcept {
  const KernelTable* t = table_for(b);
  if (!t) return false;
  active_slot().store(t, std::memory_order_release);
  return true;
}

std::string_view to_string(Backend b) noexcept {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
    case Backend::neon:
      return "neon";
  }
  return "unknown";
}

double dot(std::span<const double> x, std::span<const double> y) noexcept {
  return active().dot(x.data(), y.data(), x.size());
}

double norm2(std::span<const double> x) noexcept { return std::sqrt(dot(x, x)); }

void axpy(double a, std::span<const double> x, std::span<double> y) noexcept {
  active().axpy(a, x.data(), y.data(), x.size());
}

void axpby(double a, std::span<const double> x, double b, std::span<double> y) noexcept {
  active().axpby(a, x.data(), b, y.data(), x.size());
}

void trmv(std::span<const double> R, std::span<const double> x, std::span<double> y) noexcept {
  active().trmv(R.data(), x.data(), y.data(), x.size());
}

void trmv_t(std::span<const double> R, std::span<const double> x, std::span<double> y) noexcept {
  active().trmv_t(R.data(), x.data(), y.data(), x.size());
}

void rot(std::span<double> x, std::span<double> y, double c, double s) noexcept {
  active().rot(x.data(), y.data(), c, s, x.size());
}

}  // namespace natr::kernels
