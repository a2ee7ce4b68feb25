#include "natr/subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "natr/errors.hpp"
#include "natr/kernels.hpp"

namespace natr {

namespace kn = kernels;

std::string_view to_string(CgTermination t) noexcept {
  switch (t) {
    case CgTermination::residual_converged:
      return "residual-converged";
    case CgTermination::boundary:
      return "boundary";
    case CgTermination::negative_curvature:
      return "negative-curvature";
    case CgTermination::max_iters:
      return "max-iters";
  }
  return "unknown";
}

double default_cg_tolerance(double gnorm) noexcept { return std::min(0.1, std::sqrt(gnorm)); }

double boundary_step(double dd, double dp, double pp, double delta) noexcept {
  const double c = std::min(0.0, dd - delta * delta);
  const double s = std::sqrt(dp * dp - pp * c);
  if (dp > 0.0) return -c / (s + dp);
  return (s - dp) / pp;
}

double predicted_reduction(std::span<const double> g, const LinearOperator& B,
                           std::span<const double> d) {
  if (d.size() != g.size()) throw PreconditionError("predicted_reduction: length mismatch");
  std::vector<double> Bd(d.size());
  B(d, Bd);
  return -(kn::dot(g, d) + 0.5 * kn::dot(d, Bd));
}

namespace {

#ifndef NDEBUG
void spot_check_symmetry(const LinearOperator& B, std::size_t n) {
  std::mt19937_64 rng(n);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> u(n), v(n), Bu(n), Bv(n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = dist(rng);
    v[i] = dist(rng);
  }
  B(u, Bu);
  B(v, Bv);
  const double lhs = kn::dot(u, Bv);
  const double rhs = kn::dot(Bu, v);
  const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
  if (std::abs(lhs - rhs) > 1e-8 * scale)
    throw PreconditionError("solve_subproblem: operator is not symmetric");
}
#endif

}  // namespace

SubproblemResult solve_subproblem(std::span<const double> g, const LinearOperator& B, double delta,
                                  double cg_rel_tol, std::size_t max_cg,
                                  std::vector<double>* model_trace) {
  const std::size_t n = g.size();
  const double gnorm = kn::norm2(g);
  if (!(gnorm > 0.0)) throw PreconditionError("solve_subproblem: gradient must be nonzero");
  if (!(delta > 0.0)) throw PreconditionError("solve_subproblem: radius must be positive");
  if (max_cg == 0) throw PreconditionError("solve_subproblem: max_cg must be positive");
#ifndef NDEBUG
  spot_check_symmetry(B, n);
#endif

  SubproblemResult res;
  res.d.assign(n, 0.0);
  std::vector<double> r(g.begin(), g.end());
  std::vector<double> p(n);
  std::vector<double> Bp(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = -g[i];

  const double tol = cg_rel_tol * gnorm;
  double rr = gnorm * gnorm;
  res.termination = CgTermination::max_iters;

  for (std::size_t it = 0; it < max_cg; ++it) {
    B(p, Bp);
    const double kappa = kn::dot(p, Bp);
    const double dd = kn::dot(res.d, res.d);
    const double dp = kn::dot(res.d, p);
    const double pp = kn::dot(p, p);
    if (!std::isfinite(kappa) || !std::isfinite(pp))
      throw NumericalError("solve_subproblem: non-finite curvature");
    res.cg_iters = it + 1;

    if (kappa <= 0.0) {
      kn::axpy(boundary_step(dd, dp, pp, delta), p, res.d);
      res.termination = CgTermination::negative_curvature;
      break;
    }
    const double alpha = rr / kappa;
    if (dd + alpha * (2.0 * dp + alpha * pp) >= delta * delta) {
      kn::axpy(boundary_step(dd, dp, pp, delta), p, res.d);
      res.termination = CgTermination::boundary;
      break;
    }
    kn::axpy(alpha, p, res.d);
    kn::axpy(alpha, Bp, r);
    const double rr_next = kn::dot(r, r);
    if (!std::isfinite(rr_next)) throw NumericalError("solve_subproblem: non-finite residual");
    if (model_trace) model_trace->push_back(predicted_reduction(g, B, res.d));
    if (std::sqrt(rr_next) <= tol) {
      res.termination = CgTermination::residual_converged;
      break;
    }
    kn::axpby(-1.0, r, rr_next / rr, p);
    rr = rr_next;
  }

  res.boundary_hit = res.termination == CgTermination::boundary ||
                     res.termination == CgTermination::negative_curvature;
  res.pred = predicted_reduction(g, B, res.d);
  if (res.boundary_hit && model_trace) model_trace->push_back(res.pred);
  if (!std::isfinite(res.pred)) throw NumericalError("solve_subproblem: non-finite model value");
  return res;
}

}  // namespace natr
