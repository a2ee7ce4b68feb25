#include "natr/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

#include "natr/errors.hpp"
#include "natr/kernels.hpp"

namespace natr {

namespace kn = kernels;

std::string_view policy_name(Policy p) noexcept {
  switch (p) {
    case Policy::monotone:
      return "monotone";
    case Policy::max_window:
      return "niatr1";
    case Policy::relaxed_max:
      return "niatr2";
    case Policy::natr:
      return "natr";
    case Policy::iatr_monotone:
      return "iatr";
  }
  return "unknown";
}

std::optional<Policy> parse_policy(std::string_view name) noexcept {
  for (Policy p : {Policy::natr, Policy::iatr_monotone, Policy::max_window, Policy::relaxed_max,
                   Policy::monotone})
    if (policy_name(p) == name) return p;
  return std::nullopt;
}

std::string_view to_string(RunStatus s) noexcept {
  switch (s) {
    case RunStatus::converged:
      return "converged";
    case RunStatus::max_iters:
      return "max-iters";
    case RunStatus::max_fevals:
      return "max-fevals";
    case RunStatus::numerical_failure:
      return "numerical-failure";
  }
  return "unknown";
}

std::optional<RunStatus> parse_status(std::string_view s) noexcept {
  for (RunStatus r : {RunStatus::converged, RunStatus::max_iters, RunStatus::max_fevals,
                      RunStatus::numerical_failure})
    if (to_string(r) == s) return r;
  return std::nullopt;
}

void TrustRegionConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("invalid configuration: ") + what);
  };
  require(mu > 0.0 && mu < 1.0, "mu must lie in (0, 1)");
  require(tau > 0.0 && tau < 1.0, "tau must lie in (0, 1)");
  require(gamma >= 1.0, "gamma must be >= 1");
  require(delta_bar > 0.0 && std::isfinite(delta_bar), "delta_bar must be positive");
  require(alpha0 > 0.0 && alpha0 < alpha1 && alpha1 < 1.0, "need 0 < alpha0 < alpha1 < 1");
  require(nu > 0.0, "nu must be positive");
  require(c_fixed > 0.0 && c_fixed < 1.0, "c_fixed must lie in (0, 1)");
  require(eps_rel >= 0.0, "eps_rel must be nonnegative");
  require(max_fevals >= 1, "max_fevals must be >= 1");
  require(eta >= 0.0 && eta <= 1.0, "eta must lie in [0, 1]");
  require(relaxed_scale >= 0.0, "relaxed_scale must be nonnegative");
  require(relaxed_power > 1.0, "relaxed_power must exceed 1");
  require(!cg_rel_tol || (*cg_rel_tol > 0.0 && *cg_rel_tol < 1.0), "cg_rel_tol must lie in (0, 1)");
  require(!max_cg || *max_cg >= 1, "max_cg must be >= 1");
}

// ---------------------------------------------------------------------------
// Nonmonotone bookkeeping

NonmonotoneState::NonmonotoneState(const TrustRegionConfig& cfg, double f0)
    : history_{f0}, capacity_(std::max(cfg.N, cfg.N_bar) + 1), N_(cfg.N) {}

NonmonotoneState NonmonotoneState::from_parts(const TrustRegionConfig& cfg,
                                              std::deque<double> history, std::size_t k,
                                              std::size_t M, std::size_t I) {
  if (history.empty()) throw PreconditionError("NonmonotoneState: empty history");
  NonmonotoneState s;
  s.capacity_ = std::max(cfg.N, cfg.N_bar) + 1;
  while (history.size() > s.capacity_) history.pop_front();
  s.history_ = std::move(history);
  s.N_ = cfg.N;
  s.k_ = k;
  s.M_ = M;
  s.I_ = I;
  return s;
}

double NonmonotoneState::window_max(std::size_t count) const noexcept {
  const std::size_t take = std::min(count + 1, history_.size());
  return *std::max_element(history_.end() - std::ptrdiff_t(take), history_.end());
}

double NonmonotoneState::max_reference() const noexcept { return window_max(std::min(k_, N_)); }

void update_counters(NonmonotoneState& s, double f_new, const TrustRegionConfig& cfg) {
  const double f_prev = s.history_.back();
  s.history_.push_back(f_new);
  while (s.history_.size() > s.capacity_) s.history_.pop_front();
  s.N_ = cfg.N;
  ++s.k_;
  s.I_ = (f_new < f_prev) ? 0 : s.I_ + 1;
  s.M_ = (s.max_reference() - f_new > cfg.nu * std::abs(f_new)) ? 0 : s.M_ + 1;
}

double reference_value(const NonmonotoneState& s, const TrustRegionConfig& cfg) {
  const double fk = s.current();
  switch (cfg.policy) {
    case Policy::monotone:
    case Policy::iatr_monotone:
      return fk;
    case Policy::natr:
      if (s.I() > cfg.I_bar) return fk;
      return s.window_max(std::min(s.M(), cfg.N_bar));
    case Policy::max_window:
      return cfg.eta * s.max_reference() + (1.0 - cfg.eta) * fk;
    case Policy::relaxed_max: {
      const double R = cfg.eta * s.max_reference() + (1.0 - cfg.eta) * fk;
      const double mu_k = cfg.relaxed_scale / std::pow(double(s.k() + 1), cfg.relaxed_power);
      return (R > 0.0) ? (1.0 + mu_k) * R : R;
    }
  }
  return fk;
}

// ---------------------------------------------------------------------------
// Radius selection

std::vector<double> compute_qk(std::span<const double> g,
                               std::optional<std::span<const double>> d_prev, double tau) {
  std::vector<double> q(g.size());
  if (d_prev) {
    if (d_prev->size() != g.size()) throw PreconditionError("compute_qk: length mismatch");
    const double dn = kn::norm2(*d_prev);
    const double gn = kn::norm2(g);
    if (dn > 0.0 && gn > 0.0 && -kn::dot(g, *d_prev) / (gn * dn) > tau) {
      std::copy(d_prev->begin(), d_prev->end(), q.begin());
      return q;
    }
  }
  for (std::size_t i = 0; i < g.size(); ++i) q[i] = -g[i];
  return q;
}

double compute_sk(std::span<const double> q, std::span<const double> g, const LinearOperator& B,
                  std::optional<double> delta_prev, double gamma, bool* used_fallback) {
  std::vector<double> Bq(q.size());
  B(q, Bq);
  const double qBq = kn::dot(q, Bq);
  double base;
  bool fallback = false;
  if (qBq <= 1e-300 || !std::isfinite(qBq)) {
    base = kn::norm2(g);
    fallback = true;
  } else {
    base = -kn::dot(g, q) / qBq * kn::norm2(q);
  }
  if (used_fallback) *used_fallback = fallback;
  return delta_prev ? std::max(base, gamma * *delta_prev) : base;
}

double shrink_factor(double delta, const TrustRegionConfig& cfg) noexcept {
  const double d = std::clamp(delta, 0.0, cfg.delta_bar);
  return (cfg.alpha0 - cfg.alpha1) * d / cfg.delta_bar + cfg.alpha1;
}

double acceptance_ratio(double C, double f_trial, double pred) {
  if (!(pred > 1e-300)) throw NumericalError("acceptance ratio undefined: model decrease too small");
  return (C - f_trial) / pred;
}

// ---------------------------------------------------------------------------
// Driver

namespace {

constexpr double kMinRadius = 1e-16;
constexpr std::size_t kInnerSafety = 10;

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double a) { return std::isfinite(a); });
}

std::size_t inner_cap(const TrustRegionConfig& cfg) {
  const double c = cfg.radius_dependent_shrink() ? cfg.alpha1 : cfg.c_fixed;
  const double steps = std::ceil(std::log(kMinRadius / cfg.delta_bar) / std::log(c));
  return std::size_t(std::max(0.0, steps)) + kInnerSafety;
}

}  // namespace

RunResult solve(const Problem& p, const TrustRegionConfig& cfg, const SolveObserver* observer) {
  return solve(p, cfg, HessianApprox::identity(p.dim), observer);
}

RunResult solve(const Problem& p, const TrustRegionConfig& cfg, HessianApprox B,
                const SolveObserver* observer) {
  cfg.validate();
  if (B.dim() != p.dim) throw PreconditionError("solve: Hessian dimension does not match problem");
  if (p.x0.size() != p.dim) throw PreconditionError("solve: start point has wrong length");

  const auto t_start = std::chrono::steady_clock::now();
  const std::size_t n = p.dim;
  const LinearOperator Bop = B.as_operator();
  const std::size_t p_max = inner_cap(cfg);
  const std::size_t max_cg = cfg.max_cg.value_or(2 * n);

  RunResult res;
  std::vector<double> x = p.x0;
  std::vector<double> g(n), g_next(n), x_trial(n);

  auto finish = [&](RunStatus status) {
    res.status = status;
    res.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return res;
  };

  double f = p.eval_f(x);
  res.fevals = 1;
  res.x = x;
  res.final_f = f;
  res.final_gnorm = std::numeric_limits<double>::quiet_NaN();
  if (!std::isfinite(f)) return finish(RunStatus::numerical_failure);
  p.eval_g(x, g);
  res.gevals = 1;
  double gnorm = kn::norm2(g);
  res.final_gnorm = gnorm;
  if (!all_finite(g)) return finish(RunStatus::numerical_failure);

  const double tol = cfg.eps_rel * gnorm;
  NonmonotoneState state(cfg, f);

  // Best iterate so far, returned on budget exhaustion or failure.
  std::vector<double> x_best = x;
  double f_best = f;
  double gnorm_best = gnorm;
  auto keep_best = [&] {
    res.x = x_best;
    res.final_f = f_best;
    res.final_gnorm = gnorm_best;
  };

  std::vector<double> d_prev;
  std::optional<double> delta_prev;
  std::vector<InnerAttempt> attempts;

  while (true) {
    if (gnorm <= tol) {
      res.x = x;
      res.final_f = f;
      res.final_gnorm = gnorm;
      return finish(RunStatus::converged);
    }
    if (res.iters >= cfg.max_iters) {
      keep_best();
      return finish(RunStatus::max_iters);
    }

    const bool have_prev = delta_prev.has_value();
    std::optional<std::span<const double>> prev_step;
    if (have_prev) prev_step = std::span<const double>(d_prev);
    const std::vector<double> q = compute_qk(g, prev_step, cfg.tau);
    const bool reused = have_prev && std::equal(q.begin(), q.end(), d_prev.begin());
    bool fallback = false;
    const double s_k = compute_sk(q, g, Bop, delta_prev, cfg.gamma, &fallback);
    if (fallback) ++res.curvature_fallbacks;
    const double delta0 = std::min(s_k, cfg.delta_bar);
    const double C = reference_value(state, cfg);
    const double cg_tol = cfg.cg_rel_tol.value_or(default_cg_tolerance(gnorm));

    attempts.clear();
    double delta = delta0;
    double f_trial = 0.0;
    SubproblemResult sub;
    try {
      while (true) {
        if (res.fevals >= cfg.max_fevals) {
          keep_best();
          return finish(RunStatus::max_fevals);
        }
        if (attempts.size() > p_max || !(delta >= kMinRadius)) {
          keep_best();
          return finish(RunStatus::numerical_failure);
        }
        sub = solve_subproblem(g, Bop, delta, cg_tol, max_cg);
        for (std::size_t i = 0; i < n; ++i) x_trial[i] = x[i] + sub.d[i];
        f_trial = p.eval_f(x_trial);
        ++res.fevals;
        // A non-finite trial value is an ordinary rejection.
        const double ratio = std::isfinite(f_trial)
                                 ? acceptance_ratio(C, f_trial, sub.pred)
                                 : -std::numeric_limits<double>::infinity();
        const double step_norm = kn::norm2(sub.d);
        attempts.push_back(InnerAttempt{delta, step_norm, sub.pred, f_trial, ratio,
                                        sub.termination, sub.cg_iters});
        if (ratio >= cfg.mu) break;
        delta = cfg.radius_dependent_shrink() ? shrink_factor(delta, cfg) * step_norm
                                              : cfg.c_fixed * delta;
      }
    } catch (const NumericalError&) {
      keep_best();
      return finish(RunStatus::numerical_failure);
    }

    ++res.iters;
    p.eval_g(x_trial, g_next);
    ++res.gevals;
    const double gnorm_next = kn::norm2(g_next);
    if (!all_finite(g_next)) {
      keep_best();
      return finish(RunStatus::numerical_failure);
    }

    if (observer && observer->on_iteration) {
      observer->on_iteration(OuterIterationView{res.iters - 1, f, gnorm, x, g, B, s_k, reused,
                                                fallback, delta0, C, state.M(), state.I(),
                                                f_trial, attempts});
    }
    if (cfg.record_trace) {
      res.trace.push_back(IterationRecord{res.iters - 1, f, gnorm, delta0, attempts.size() - 1, C,
                                          attempts.back().step_norm, res.fevals, res.gevals});
    }

    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = g_next[i] - g[i];
    const UpdateReport rep = mbfgs_update(B, sub.d, y, kn::norm2(x_trial));
    if (observer && observer->on_update) observer->on_update(B, sub.d, rep);

    update_counters(state, f_trial, cfg);
    d_prev = std::move(sub.d);
    delta_prev = delta;
    x.swap(x_trial);
    g.swap(g_next);
    f = f_trial;
    gnorm = gnorm_next;
    if (f < f_best) {
      x_best = x;
      f_best = f;
      gnorm_best = gnorm;
    }
  }
}

void write_trace(std::ostream& os, std::span<const IterationRecord> trace) {
  os << "# k f gnorm delta0 p C step_norm fevals gevals\n";
  char buf[320];
  for (const IterationRecord& r : trace) {
    std::snprintf(buf, sizeof buf, "%zu %.17g %.17g %.17g %zu %.17g %.17g %zu %zu\n", r.k, r.f,
                  r.gnorm, r.delta0, r.inner_rejections, r.C, r.accepted_step_norm,
                  r.fevals_so_far, r.gevals_so_far);
    os << buf;
  }
}

}  // namespace natr
