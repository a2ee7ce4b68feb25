#pragma once

// Dense symmetric positive-definite Hessian approximation maintained by a
// modified BFGS update.
//
// The update perturbs the gradient difference,
//
//     ybar = y + r s,   r = max(0, -y's / ||s||^2) + 1e-6,
//
// so ybar's >= 1e-6 ||s||^2 and B stays positive definite whatever the sign of
// y's. The Frobenius norm is capped; exceeding the cap resets B to identity.
//
// B is held as B = R'R with R upper triangular and updated by Givens
// rotations, O(n^2) per update. Forming B explicitly and applying the rank-two
// formula loses definiteness to cancellation once cond(B) nears 1/eps.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "natr/subproblem.hpp"

namespace natr {

inline constexpr double kDefaultNormCap = 1e8;
inline constexpr double kCurvatureShift = 1e-6;

class HessianApprox {
 public:
  // Throws PreconditionError for n == 0 or a non-positive cap.
  static HessianApprox identity(std::size_t n, double norm_cap = kDefaultNormCap);

  std::size_t dim() const noexcept { return n_; }
  double norm_cap() const noexcept { return norm_cap_; }
  std::size_t updates_applied() const noexcept { return applied_; }
  std::size_t updates_skipped() const noexcept { return skipped_; }
  // Subset of updates_skipped caused by the norm cap.
  std::size_t resets() const noexcept { return resets_; }

  // Row-major n x n upper-triangular factor; the strict lower part is zero.
  std::span<const double> factor() const noexcept { return r_; }
  // B(i, j) formed from the factor in O(n); bitwise symmetric in (i, j).
  double operator()(std::size_t i, std::size_t j) const noexcept;
  // Row-major n x n copy of B, O(n^3).
  std::vector<double> dense() const;

  void apply(std::span<const double> x, std::span<double> y) const noexcept;
  // The returned operator refers to *this and must not outlive it.
  LinearOperator as_operator() const;

  // Maintained alongside the factor through the update identity for
  // ||B - uu' + ww'||_F^2, so it agrees with the formed matrix to roundoff.
  double frobenius_norm() const noexcept { return std::sqrt(frob2_); }

 private:
  friend struct MbfgsAccess;
  HessianApprox(std::size_t n, double cap);
  void reset_identity();

  std::size_t n_ = 0;
  double norm_cap_ = kDefaultNormCap;
  std::vector<double> r_;
  double frob2_ = 0.0;
  std::size_t applied_ = 0;
  std::size_t skipped_ = 0;
  std::size_t resets_ = 0;
};

inline HessianApprox init_identity(std::size_t n, double norm_cap = kDefaultNormCap) {
  return HessianApprox::identity(n, norm_cap);
}

enum class UpdateOutcome { applied, skipped_small_step, skipped_degenerate, reset_norm_cap };

struct UpdateReport {
  UpdateOutcome outcome = UpdateOutcome::applied;
  double shift = 0.0;       // r
  double ybar_dot_s = 0.0;  // ybar's
  double s_norm2 = 0.0;     // s's
  std::vector<double> ybar;
};

// In-place MBFGS update with s = x_{k+1} - x_k, y = g_{k+1} - g_k.
// x_norm is ||x_{k+1}||, used only for the tiny-step skip rule
// ||s|| <= 1e-14 max(1, ||x||).
UpdateReport mbfgs_update(HessianApprox& H, std::span<const double> s, std::span<const double> y,
                          double x_norm = 0.0);

}  // namespace natr
