#pragma once

// Adaptive-radius trust-region driver with pluggable nonmonotone acceptance.
//
// Each outer iteration picks an initial radius from the previous step and the
// current curvature estimate, then solves the model subproblem and shrinks the
// radius until the (possibly nonmonotone) ratio test accepts the step:
//
//   * natr      reference value from a window of recent objective values whose
//               length grows while progress is small and collapses after a big
//               relative decrease; a run of increases longer than I_bar forces
//               a monotone step. Rejected steps shrink to c(delta) * ||d||, with
//               c decreasing linearly from alpha1 (small radii) to alpha0 (delta_bar).
//   * monotone  natr's radius rule with the reference fixed at f_k.
//   * iatr      reference f_k, radius shrunk by the constant c_fixed.
//   * niatr1    iatr with reference eta * max(last N+1 values) + (1 - eta) * f_k.
//   * niatr2    niatr1's reference inflated by (1 + mu_k) while it is positive,
//               mu_k = 0.5 / (k + 1)^1.1.

#include <chrono>
#include <cstddef>
#include <deque>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "natr/problems.hpp"
#include "natr/quasinewton.hpp"
#include "natr/subproblem.hpp"

namespace natr {

enum class Policy { monotone, max_window, relaxed_max, natr, iatr_monotone };

// CLI names: monotone, niatr1, niatr2, natr, iatr.
std::string_view policy_name(Policy p) noexcept;
std::optional<Policy> parse_policy(std::string_view name) noexcept;

struct TrustRegionConfig {
  double mu = 0.01;          // ratio-test threshold
  double tau = 0.1;          // angle threshold for reusing the previous step
  double gamma = 1.7;        // radius growth
  double delta_bar = 100.0;  // maximum radius
  double alpha0 = 0.15;      // c(delta_bar)
  double alpha1 = 0.35;      // c(0+)
  std::size_t N = 10;        // window for the max-based reference
  std::size_t N_bar = 10;    // natr window cap
  std::size_t I_bar = 3;     // natr cap on consecutive non-decreases
  double nu = 0.25;          // natr relative-gap threshold
  double c_fixed = 0.35;     // constant shrink for iatr / niatr1 / niatr2
  double eps_rel = 1e-6;     // stop when ||g_k|| <= eps_rel ||g_0||
  std::size_t max_iters = 10000;
  std::size_t max_fevals = 100000;
  double eta = 0.85;             // niatr1 / niatr2 weight
  double relaxed_scale = 0.5;    // niatr2: mu_k = scale / (k + 1)^power
  double relaxed_power = 1.1;
  std::optional<double> cg_rel_tol;  // default min(0.1, sqrt(||g_k||))
  std::optional<std::size_t> max_cg; // default 2n
  Policy policy = Policy::natr;
  bool record_trace = false;

  // Throws ConfigError naming the first violated constraint.
  void validate() const;
  bool radius_dependent_shrink() const noexcept {
    return policy == Policy::natr || policy == Policy::monotone;
  }
};

class NonmonotoneState {
 public:
  NonmonotoneState(const TrustRegionConfig& cfg, double f0);

  std::size_t k() const noexcept { return k_; }
  std::size_t M() const noexcept { return M_; }
  std::size_t I() const noexcept { return I_; }
  double current() const noexcept { return history_.back(); }
  const std::deque<double>& history() const noexcept { return history_; }

  // max over the newest count + 1 values (clamped to what is stored).
  double window_max(std::size_t count) const noexcept;
  // f_{l_k}: max over the newest min(k, N) + 1 values.
  double max_reference() const noexcept;

  // Test hook: set counters and history directly. history.back() is f_k.
  static NonmonotoneState from_parts(const TrustRegionConfig& cfg, std::deque<double> history,
                                     std::size_t k, std::size_t M, std::size_t I);

 private:
  friend void update_counters(NonmonotoneState&, double, const TrustRegionConfig&);
  NonmonotoneState() = default;

  std::deque<double> history_;
  std::size_t capacity_ = 1;
  std::size_t N_ = 0;
  std::size_t k_ = 0;
  std::size_t M_ = 0;
  std::size_t I_ = 0;
};

// Appends f_{k+1} and advances k, M and I.
void update_counters(NonmonotoneState& state, double f_new, const TrustRegionConfig& cfg);

// C_k for the configured policy.
double reference_value(const NonmonotoneState& state, const TrustRegionConfig& cfg);

// -g, or the previous step when it is still a good enough descent direction.
std::vector<double> compute_qk(std::span<const double> g,
                               std::optional<std::span<const double>> d_prev, double tau);

// Curvature-based radius estimate along q, grown to at least gamma * delta_prev.
// Falls back to ||g|| when q'Bq <= 1e-300 and reports that via used_fallback.
double compute_sk(std::span<const double> q, std::span<const double> g, const LinearOperator& B,
                  std::optional<double> delta_prev, double gamma, bool* used_fallback = nullptr);

// c(delta) = (alpha0 - alpha1) delta / delta_bar + alpha1, delta clamped to (0, delta_bar].
double shrink_factor(double delta, const TrustRegionConfig& cfg) noexcept;

// (C - f_trial) / pred. Throws NumericalError when pred <= 1e-300.
double acceptance_ratio(double C, double f_trial, double pred);

enum class RunStatus { converged, max_iters, max_fevals, numerical_failure };
std::string_view to_string(RunStatus s) noexcept;
std::optional<RunStatus> parse_status(std::string_view s) noexcept;

struct IterationRecord {
  std::size_t k = 0;
  double f = 0.0;
  double gnorm = 0.0;
  double delta0 = 0.0;
  std::size_t inner_rejections = 0;
  double C = 0.0;
  double accepted_step_norm = 0.0;
  std::size_t fevals_so_far = 0;
  std::size_t gevals_so_far = 0;
};

struct RunResult {
  RunStatus status = RunStatus::converged;
  std::size_t iters = 0;
  std::size_t fevals = 0;
  std::size_t gevals = 0;
  double wall_time = 0.0;  // seconds
  double final_f = 0.0;
  double final_gnorm = 0.0;
  std::vector<double> x;
  std::size_t curvature_fallbacks = 0;
  std::vector<IterationRecord> trace;  // filled when cfg.record_trace
};

struct InnerAttempt {
  double radius = 0.0;
  double step_norm = 0.0;
  double pred = 0.0;
  double f_trial = 0.0;
  double ratio = 0.0;
  CgTermination termination = CgTermination::residual_converged;
  std::size_t cg_iters = 0;
};

// Everything known about outer iteration k once its step has been accepted,
// before B_k is updated.
struct OuterIterationView {
  std::size_t k;
  double f;
  double gnorm;
  std::span<const double> x;
  std::span<const double> g;
  const HessianApprox& B;
  double s_k;
  bool reused_previous_step;
  bool curvature_fallback;
  double delta0;
  double C;
  std::size_t M;
  std::size_t I;
  double f_next;
  std::span<const InnerAttempt> attempts;  // the last one was accepted
};

struct SolveObserver {
  std::function<void(const OuterIterationView&)> on_iteration;
  std::function<void(const HessianApprox& updated, std::span<const double> s,
                     const UpdateReport&)>
      on_update;
};

// Runs the method from p.x0. hessian.dim() must equal p.dim.
RunResult solve(const Problem& p, const TrustRegionConfig& cfg, HessianApprox hessian,
                const SolveObserver* observer = nullptr);
RunResult solve(const Problem& p, const TrustRegionConfig& cfg,
                const SolveObserver* observer = nullptr);

// One line per record: k f gnorm delta0 p C step_norm fevals gevals, after a
// '#' header line. Values use round-trip precision.
void write_trace(std::ostream& os, std::span<const IterationRecord> trace);

}  // namespace natr
