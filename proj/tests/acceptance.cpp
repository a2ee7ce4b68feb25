// Acceptance run: one PASS/FAIL line per criterion.
//
//   natr_acceptance            all criteria
//   natr_acceptance 2 5 9      a subset
//   natr_acceptance --strict   exit 1 on any FAIL
//
// Without --strict the exit status is 0 once every selected criterion has
// produced a verdict, and 2 if one of them threw.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "natr/bench.hpp"
#include "natr/problems.hpp"
#include "natr/quasinewton.hpp"
#include "natr/solver.hpp"
#include "natr/subproblem.hpp"
#include "oracles.hpp"

using namespace natr;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
  int shown = 0;

  void fail(const std::string& what) {
    pass = false;
    if (shown++ < 3) detail += (detail.empty() ? "" : "; ") + what;
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool le_rel(double a, double b, double rel) {
  return a <= b + rel * std::max(std::abs(a), std::abs(b));
}

// Small instances of every registered family; 12 satisfies every structural
// constraint in the registry.
constexpr std::size_t kSmallDim = 12;

std::vector<ProblemSpec> small_suite() {
  std::vector<ProblemSpec> out;
  for (const ProblemInfo& info : problem_registry()) out.push_back({info.name, kSmallDim});
  return out;
}

struct IterLog {
  double f = 0.0;
  double f_next = 0.0;
  double C = 0.0;
  std::size_t I = 0;
};

struct TracedRun {
  std::string label;
  RunResult result;
  double f0 = 0.0;
  std::vector<IterLog> iters;
};

TracedRun traced(const ProblemSpec& ps, const TrustRegionConfig& cfg, SolveObserver obs = {}) {
  const Problem p = make_problem(ps.name, ps.dim);
  TracedRun run;
  run.label = fmt("%s/%zu/%s", ps.name.c_str(), ps.dim, std::string(policy_name(cfg.policy)).c_str());
  run.f0 = p.value(p.x0);
  auto user = obs.on_iteration;
  obs.on_iteration = [&run, user](const OuterIterationView& v) {
    run.iters.push_back(IterLog{v.f, v.f_next, v.C, v.I});
    if (user) user(v);
  };
  run.result = solve(p, cfg, &obs);
  return run;
}

TrustRegionConfig with_policy(Policy pol) {
  TrustRegionConfig c;
  c.policy = pol;
  return c;
}

// Criterion 1 and 10 share the suite records.
std::vector<RunRecord> run_default_suite() {
  BenchOptions opts;
  opts.parallelism = 1;
  opts.warmup = false;
  return run_suite(default_suite(), comparison_solvers(), opts);
}

std::vector<RunRecord>& suite_records() {
  static std::vector<RunRecord> records = run_default_suite();
  return records;
}

Verdict criterion1() {
  Verdict v;
  std::map<std::string, std::size_t> failures;
  for (const SolverSpec& s : comparison_solvers()) failures[s.name] = 0;
  std::vector<std::string> natr_failed;
  double total_time = 0.0;
  for (const RunRecord& r : suite_records()) {
    total_time += r.wall_time;
    if (r.status != RunStatus::converged) {
      ++failures[r.solver];
      if (r.solver == "natr") natr_failed.push_back(r.problem);
    }
  }
  const std::size_t natr = failures["natr"];
  if (natr != 0) v.fail(fmt("natr failed on %zu problem(s), first %s", natr, natr_failed[0].c_str()));
  for (const auto& [name, count] : failures)
    if (count < natr) v.fail(fmt("%s has fewer failures (%zu) than natr", name.c_str(), count));
  std::string counts;
  for (const auto& [name, count] : failures) counts += fmt(" %s=%zu", name.c_str(), count);
  v.detail = fmt("%zu problems, failures:%s, %.1fs", default_suite().size(), counts.c_str(),
                 total_time) +
             (v.detail.empty() ? "" : "; " + v.detail);
  return v;
}

std::vector<TracedRun>& natr_suite_runs() {
  static std::vector<TracedRun> runs = [] {
    std::vector<TracedRun> out;
    for (const ProblemSpec& ps : default_suite()) out.push_back(traced(ps, with_policy(Policy::natr)));
    for (const ProblemSpec& ps : small_suite()) out.push_back(traced(ps, with_policy(Policy::natr)));
    return out;
  }();
  return runs;
}

Verdict criterion2() {
  Verdict v;
  std::size_t checked = 0;
  for (const TracedRun& run : natr_suite_runs()) {
    if (run.iters.empty()) continue;
    if (run.iters[0].C != run.f0) v.fail(run.label + ": C_0 != f_0");
    for (std::size_t k = 0; k < run.iters.size(); ++k) {
      const IterLog& it = run.iters[k];
      if (!le_rel(it.f_next, run.f0, 1e-12)) v.fail(fmt("%s k=%zu: f above f_0", run.label.c_str(), k));
      if (k + 1 == run.iters.size()) break;
      const double C_next = run.iters[k + 1].C;
      ++checked;
      if (!le_rel(it.f_next, C_next, 1e-12))
        v.fail(fmt("%s k=%zu: f_{k+1}=%.17g > C_{k+1}=%.17g", run.label.c_str(), k, it.f_next, C_next));
      if (!le_rel(C_next, it.C, 1e-12))
        v.fail(fmt("%s k=%zu: C_{k+1}=%.17g > C_k=%.17g", run.label.c_str(), k, C_next, it.C));
    }
  }
  v.detail = fmt("%zu runs, %zu transitions", natr_suite_runs().size(), checked) +
             (v.detail.empty() ? "" : "; " + v.detail);
  return v;
}

// Criteria 3 and 4 on the small suite.
struct RadiusChecks {
  Verdict sandwich, floors;
  std::size_t rejections = 0, iterations = 0, converged_exits = 0, early_exits_below = 0;
};

RadiusChecks& radius_checks() {
  static RadiusChecks rc = [] {
    RadiusChecks out;
    const Policy policies[] = {Policy::natr, Policy::monotone, Policy::iatr_monotone,
                               Policy::max_window, Policy::relaxed_max};
    for (Policy pol : policies) {
      const TrustRegionConfig cfg = with_policy(pol);
      for (const ProblemSpec& ps : small_suite()) {
        const std::string label = ps.name + "/" + std::string(policy_name(pol));
        SolveObserver obs;
        obs.on_iteration = [&](const OuterIterationView& view) {
          ++out.iterations;
          const double bnorm = oracle::spectral_norm(oracle::to_matrix(view.B));
          const double floor0 = std::min(cfg.tau * view.gnorm / bnorm, cfg.delta_bar);
          if (!(view.delta0 >= floor0 - 1e-8))
            out.floors.fail(fmt("%s k=%zu: delta0=%.3e < %.3e", label.c_str(), view.k, view.delta0, floor0));
          const InnerAttempt& a0 = view.attempts[0];
          const double step_floor = std::min(view.gnorm / bnorm, view.delta0) - 1e-8;
          if (a0.termination == CgTermination::residual_converged) {
            ++out.converged_exits;
            if (!(a0.step_norm >= step_floor))
              out.floors.fail(fmt("%s k=%zu: ||d0||=%.3e < %.3e", label.c_str(), view.k, a0.step_norm, step_floor));
          } else if (!(a0.step_norm >= step_floor)) {
            ++out.early_exits_below;
          }
          if (!cfg.radius_dependent_shrink()) return;
          for (std::size_t p = 0; p < view.attempts.size(); ++p) {
            const double r = view.attempts[p].radius;
            const double lo = std::pow(cfg.alpha0, double(p)) * floor0 - 1e-8;
            const double hi = std::pow(cfg.alpha1, double(p)) * cfg.delta_bar + 1e-8;
            if (!(r >= lo && r <= hi))
              out.sandwich.fail(fmt("%s k=%zu p=%zu: radius %.3e outside [%.3e, %.3e]", label.c_str(), view.k, p, r, lo, hi));
            if (p + 1 < view.attempts.size()) {
              ++out.rejections;
              if (!(view.attempts[p + 1].radius < view.attempts[p].step_norm))
                out.sandwich.fail(fmt("%s k=%zu p=%zu: next radius not below ||d||", label.c_str(), view.k, p));
            }
          }
        };
        (void)traced(ps, cfg, obs);
      }
    }
    return out;
  }();
  return rc;
}

Verdict criterion3() {
  RadiusChecks& rc = radius_checks();
  Verdict v = rc.sandwich;
  v.detail = fmt("n=%zu, %zu inner rejections", kSmallDim, rc.rejections) +
             (v.detail.empty() ? "" : "; " + v.detail);
  return v;
}

Verdict criterion4() {
  RadiusChecks& rc = radius_checks();
  Verdict v = rc.floors;
  v.detail = fmt("%zu iterations, %zu residual-converged first steps, %zu early exits below the step floor (not asserted)",
                 rc.iterations, rc.converged_exits, rc.early_exits_below) +
             (v.detail.empty() ? "" : "; " + v.detail);
  return v;
}

LinearOperator dense_op(const Eigen::MatrixXd& B) {
  return [&B](std::span<const double> x, std::span<double> y) {
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), Eigen::Index(x.size()));
    Eigen::Map<Eigen::VectorXd>(y.data(), Eigen::Index(y.size())) = B * xv;
  };
}

SubproblemResult steihaug(const oracle::RandomInstance& inst, double tol) {
  const std::vector<double> g(inst.g.data(), inst.g.data() + inst.g.size());
  return solve_subproblem(g, dense_op(inst.B), inst.delta, tol, 2 * g.size());
}

Verdict criterion5() {
  Verdict v;
  std::mt19937_64 rng(20240917);
  std::size_t indefinite = 0, oracle_misses = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto inst = oracle::random_instance(rng, 2, 10, true);
    indefinite += inst.indefinite;
    const double gn = inst.g.norm();
    const SubproblemResult r = steihaug(inst, default_cg_tolerance(gn));
    const double bound = 0.5 * gn * std::min(inst.delta, gn / oracle::spectral_norm(inst.B));
    if (!(r.pred >= 0.999 * bound)) v.fail(fmt("instance %d: pred %.6e < Cauchy bound %.6e", i, r.pred, bound));
  }
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 200; ++i) {
    const auto inst = oracle::random_instance(rng, 2, 3, true);
    const SubproblemResult r = steihaug(inst, 1e-12);
    const double exact = oracle::exact_trust_region(inst.g, inst.B, inst.delta).pred;
    worst = std::min(worst, r.pred / exact);
    if (!(r.pred >= 0.95 * exact - 1e-10 && r.pred <= exact + 1e-10)) ++oracle_misses;
    if (!(r.pred >= 0.95 * exact - 1e-10 && r.pred <= exact + 1e-10))
      v.fail(fmt("oracle instance %d (n=%td, %s): pred %.6e vs exact %.6e", i, inst.g.size(),
                 inst.indefinite ? "indefinite" : "spd", r.pred, exact));
  }
  v.detail = fmt("1000 Cauchy instances n=2..10 (%zu indefinite), 200 oracle instances n=2..3 (%zu outside the 5%% band), worst pred/exact %.4f",
                 indefinite, oracle_misses, worst) +
             (v.detail.empty() ? "" : "; " + v.detail);
  return v;
}

// Every sub-check is the literal one. The detail line adds the quantities
// that show whether a miss sits at the rounding floor: the secant residual
// against eps |B||s|, the curvature deficit against eps r ||s||^2, and
// cond(B) where Cholesky of the formed matrix fails.
Verdict criterion6() {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  Verdict v;
  std::size_t applied = 0, runs = 0, secant_miss = 0, curv_miss = 0, chol_miss = 0, cap_miss = 0;
  double secant_floor = 0.0, curv_floor = 0.0, min_cond = std::numeric_limits<double>::infinity();
  for (Policy pol : {Policy::natr, Policy::monotone, Policy::iatr_monotone, Policy::max_window,
                     Policy::relaxed_max}) {
    for (const ProblemSpec& ps : small_suite()) {
      ++runs;
      const std::string label = ps.name + "/" + std::string(policy_name(pol));
      SolveObserver obs;
      obs.on_update = [&](const HessianApprox& B, std::span<const double> s, const UpdateReport& rep) {
        if (!(B.frobenius_norm() <= 1e8)) {
          ++cap_miss;
          v.fail(label + ": ||B||_F above cap");
        }
        if (rep.outcome != UpdateOutcome::applied) return;
        ++applied;
        const Eigen::MatrixXd M = oracle::to_matrix(B);
        Eigen::Map<const Eigen::VectorXd> sv(s.data(), Eigen::Index(s.size()));
        Eigen::Map<const Eigen::VectorXd> yb(rep.ybar.data(), Eigen::Index(rep.ybar.size()));

        const double res = (M * sv - yb).norm();
        if (!(res <= 1e-10 * std::max(1.0, yb.norm()))) {
          ++secant_miss;
          secant_floor = std::max(secant_floor, res / (eps * (M.cwiseAbs() * sv.cwiseAbs()).norm()));
          v.fail(fmt("%s: ||B s - ybar|| = %.2e", label.c_str(), res));
        }
        if (!oracle::cholesky_ok(M)) {
          ++chol_miss;
          min_cond = std::min(min_cond, oracle::factor_condition(B));
          v.fail(label + ": Cholesky of B failed");
        }
        const double curv = yb.dot(sv), ss = sv.squaredNorm();
        if (!(curv >= 1e-6 * ss)) {
          ++curv_miss;
          curv_floor = std::max(curv_floor, (1e-6 * ss - curv) / (eps * rep.shift * ss));
          v.fail(fmt("%s: ybar's = %.9e < 1e-6 ||s||^2 = %.9e", label.c_str(), curv, 1e-6 * ss));
        }
      };
      (void)traced(ps, with_policy(pol), obs);
    }
  }
  std::string d = fmt("n=%zu, %zu runs, %zu applied updates; misses: secant %zu, Cholesky %zu, curvature %zu, cap %zu",
                      kSmallDim, runs, applied, secant_miss, chol_miss, curv_miss, cap_miss);
  if (secant_miss) d += fmt("; worst secant residual %.1f x eps|B||s|", secant_floor);
  if (chol_miss) d += fmt("; Cholesky misses all at cond(B) >= %.1e", min_cond);
  if (curv_miss) d += fmt("; worst curvature deficit %.1f x eps r||s||^2", curv_floor);
  v.detail = d + (v.detail.empty() ? "" : "; " + v.detail);
  return v;
}

Verdict criterion7() {
  Verdict v;
  double worst = 0.0;
  for (const ProblemSpec& ps : small_suite()) {
    const Problem p = make_problem(ps.name, ps.dim);
    const auto pts = random_points(p.dim, 10, -2.0, 2.0, 7);
    const GradCheckReport rep = check_gradient(p, pts, 1e-6);
    worst = std::max(worst, rep.max_rel_err);
    if (!(rep.max_rel_err <= 1e-5)) v.fail(fmt("%s: %.3e", ps.name.c_str(), rep.max_rel_err));
  }
  v.detail = fmt("%zu problems at n=%zu, worst %.3e", small_suite().size(), kSmallDim, worst) +
             (v.detail.empty() ? "" : "; " + v.detail);
  return v;
}

Verdict criterion8() {
  Verdict v;
  const std::size_t I_bar = TrustRegionConfig{}.I_bar;
  std::size_t forced = 0, longest = 0;
  for (const TracedRun& run : natr_suite_runs()) {
    std::size_t streak = 0;
    for (std::size_t k = 0; k < run.iters.size(); ++k) {
      const IterLog& it = run.iters[k];
      if (it.I > I_bar) {
        ++forced;
        if (!(it.f_next < it.f)) v.fail(fmt("%s k=%zu: forced step did not decrease f", run.label.c_str(), k));
      }
      streak = it.f_next >= it.f ? streak + 1 : 0;
      longest = std::max(longest, streak);
      if (streak > I_bar + 1) v.fail(fmt("%s k=%zu: %zu non-decreasing steps in a row", run.label.c_str(), k, streak));
    }
  }
  v.detail = fmt("%zu forced monotone steps, longest non-decreasing run %zu", forced, longest) +
             (v.detail.empty() ? "" : "; " + v.detail);
  return v;
}

RunRecord rec(const std::string& p, const std::string& s, std::size_t fevals, double time = 1.0,
              RunStatus st = RunStatus::converged) {
  RunRecord r;
  r.problem = p;
  r.dim = 10;
  r.solver = s;
  r.status = st;
  r.iters = fevals;
  r.fevals = fevals;
  r.wall_time = time;
  return r;
}

Verdict criterion9() {
  Verdict v;
  const std::vector<RunRecord> hand = {rec("P1", "A", 1), rec("P1", "B", 2), rec("P2", "A", 4),
                                       rec("P2", "B", 2)};
  const auto curves = performance_profile(hand, CostIndex::fevals);
  const std::vector<std::pair<double, double>> expect = {{1.0, 0.5}, {2.0, 1.0}};
  if (curves.size() != 2 || curves[0].solver != "A" || curves[1].solver != "B")
    v.fail("hand example: wrong curve set");
  else
    for (const ProfileCurve& c : curves)
      if (c.points != expect) v.fail("hand example: curve " + c.solver + " differs");

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> cost(1e-3, 10.0), scale(1e-2, 1e2), unit(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    const int np = 2 + int(rng() % 9), ns = 2 + int(rng() % 4);
    const double c = scale(rng);
    std::vector<RunRecord> a, b;
    for (int i = 0; i < np; ++i)
      for (int j = 0; j < ns; ++j) {
        const auto st = unit(rng) < 0.15 ? RunStatus::max_fevals : RunStatus::converged;
        const double w = cost(rng);
        a.push_back(rec("P" + std::to_string(i), "S" + std::to_string(j), 1, w, st));
        b.push_back(rec("P" + std::to_string(i), "S" + std::to_string(j), 1, w * c, st));
      }
    const auto ca = performance_profile(a, CostIndex::time);
    const auto cb = performance_profile(b, CostIndex::time);
    for (std::size_t s = 0; s < ca.size(); ++s) {
      double prev = 0.0;
      for (const auto& [tau, rho] : ca[s].points) {
        if (rho < prev || rho > 1.0 || tau < 1.0) v.fail(fmt("table %d: curve not monotone", t));
        prev = rho;
        // Compare just above each breakpoint so ratio roundoff cannot flip a step.
        const double probe = tau * (1.0 + 1e-9);
        if (profile_value(cb[s], probe) != profile_value(ca[s], probe))
          v.fail(fmt("table %d: scaling by %.3g changes rho at tau=%.6g", t, c, tau));
      }
      if (ca[s].solved_fraction != cb[s].solved_fraction) v.fail(fmt("table %d: solved fraction", t));
    }
  }
  v.detail = "hand 2x2 profile, 100 random scaled tables" + (v.detail.empty() ? "" : "; " + v.detail);
  return v;
}

Verdict criterion10() {
  Verdict v;
  const auto& first = suite_records();
  const auto second = run_default_suite();
  if (first.size() != second.size()) v.fail("record counts differ");
  for (std::size_t i = 0; i < std::min(first.size(), second.size()); ++i) {
    const RunRecord &a = first[i], &b = second[i];
    if (a.problem != b.problem || a.solver != b.solver || a.status != b.status || a.iters != b.iters ||
        a.fevals != b.fevals)
      v.fail(fmt("%s/%s differs between runs", a.problem.c_str(), a.solver.c_str()));
  }
  v.detail = fmt("%zu records compared", first.size()) + (v.detail.empty() ? "" : "; " + v.detail);
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Verdict()>> criteria = {
      criterion1, criterion2, criterion3, criterion4, criterion5,
      criterion6, criterion7, criterion8, criterion9, criterion10};
  std::set<int> only;
  bool strict = false;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--strict")
      strict = true;
    else
      only.insert(std::atoi(argv[i]));
  }
  bool all_pass = true;
  bool crashed = false;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = int(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Verdict v;
    try {
      v = criteria[i]();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
      crashed = true;
    }
    all_pass = all_pass && v.pass;
    std::printf("criterion %2d: %s  %s\n", id, v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
  }
  if (crashed) return 2;
  return (strict && !all_pass) ? 1 : 0;
}
