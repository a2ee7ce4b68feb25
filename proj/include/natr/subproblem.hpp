#pragma once

// Approximate minimisation of the quadratic model
//
//     m(d) = g'd + 1/2 d'Bd   subject to ||d|| <= delta
//
// by Steihaug-Toint truncated conjugate gradients. The first CG step is the
// Cauchy step, so the model decrease always satisfies the Cauchy-type bound
// pred >= 1/2 ||g|| min(delta, ||g|| / ||B||).

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace natr {

// y = B x. B must be symmetric; the subproblem never forms it explicitly.
using LinearOperator = std::function<void(std::span<const double> x, std::span<double> y)>;

enum class CgTermination { residual_converged, boundary, negative_curvature, max_iters };

std::string_view to_string(CgTermination t) noexcept;

struct SubproblemResult {
  std::vector<double> d;
  double pred = 0.0;  // m(0) - m(d)
  bool boundary_hit = false;
  std::size_t cg_iters = 0;
  CgTermination termination = CgTermination::residual_converged;
};

// min(0.1, sqrt(||g||))
double default_cg_tolerance(double gnorm) noexcept;

// Throws PreconditionError for ||g|| == 0, delta <= 0 or max_cg == 0, and
// NumericalError when the recursion produces non-finite values.
// If model_trace is non-null it receives pred for every CG iterate.
SubproblemResult solve_subproblem(std::span<const double> g, const LinearOperator& B, double delta,
                                  double cg_rel_tol, std::size_t max_cg,
                                  std::vector<double>* model_trace = nullptr);

// -(g'd + 1/2 d'Bd)
double predicted_reduction(std::span<const double> g, const LinearOperator& B,
                           std::span<const double> d);

// Positive root t of ||d + t p|| = delta, given dd = d'd, dp = d'p, pp = p'p.
double boundary_step(double dd, double dp, double pp, double delta) noexcept;

}  // namespace natr
