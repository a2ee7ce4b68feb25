#include "natr/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "natr/bench.hpp"
#include "natr/errors.hpp"
#include "natr/kernels.hpp"
#include "natr/problems.hpp"
#include "natr/solver.hpp"

namespace natr {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

using Setter = std::function<void(TrustRegionConfig&, const std::string&)>;

double to_real(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::logic_error&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) throw UsageError("--param " + key + ": not a number: " + v);
  return out;
}

std::size_t to_count(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  unsigned long long out = 0;
  try {
    out = std::stoull(v, &pos);
  } catch (const std::logic_error&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size() || v.front() == '-')
    throw UsageError("--param " + key + ": not a nonnegative integer: " + v);
  return std::size_t(out);
}

const std::map<std::string, Setter>& param_setters() {
  static const std::map<std::string, Setter> kSetters = [] {
    std::map<std::string, Setter> m;
    auto real = [&m](const char* key, double TrustRegionConfig::*field) {
      m[key] = [key, field](TrustRegionConfig& c, const std::string& v) {
        c.*field = to_real(key, v);
      };
    };
    auto count = [&m](const char* key, std::size_t TrustRegionConfig::*field) {
      m[key] = [key, field](TrustRegionConfig& c, const std::string& v) {
        c.*field = to_count(key, v);
      };
    };
    real("mu", &TrustRegionConfig::mu);
    real("tau", &TrustRegionConfig::tau);
    real("gamma", &TrustRegionConfig::gamma);
    real("delta_bar", &TrustRegionConfig::delta_bar);
    real("alpha0", &TrustRegionConfig::alpha0);
    real("alpha1", &TrustRegionConfig::alpha1);
    real("nu", &TrustRegionConfig::nu);
    real("c_fixed", &TrustRegionConfig::c_fixed);
    real("eps_rel", &TrustRegionConfig::eps_rel);
    real("eta", &TrustRegionConfig::eta);
    real("relaxed_scale", &TrustRegionConfig::relaxed_scale);
    real("relaxed_power", &TrustRegionConfig::relaxed_power);
    count("N", &TrustRegionConfig::N);
    count("N_bar", &TrustRegionConfig::N_bar);
    count("I_bar", &TrustRegionConfig::I_bar);
    count("max_iters", &TrustRegionConfig::max_iters);
    count("max_fevals", &TrustRegionConfig::max_fevals);
    m["cg_rel_tol"] = [](TrustRegionConfig& c, const std::string& v) {
      c.cg_rel_tol = to_real("cg_rel_tol", v);
    };
    m["max_cg"] = [](TrustRegionConfig& c, const std::string& v) {
      c.max_cg = to_count("max_cg", v);
    };
    return m;
  }();
  return kSetters;
}

void apply_params(TrustRegionConfig& cfg, const std::vector<std::string>& params) {
  for (const std::string& kv : params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--param expects k=v, got '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    const auto it = param_setters().find(key);
    if (it == param_setters().end()) throw UsageError("--param: unknown key '" + key + "'");
    it->second(cfg, kv.substr(eq + 1));
  }
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
}

void print_config(std::ostream& out, const TrustRegionConfig& c) {
  out << "policy = " << policy_name(c.policy) << '\n'
      << "mu = " << num(c.mu) << '\n'
      << "tau = " << num(c.tau) << '\n'
      << "gamma = " << num(c.gamma) << '\n'
      << "delta_bar = " << num(c.delta_bar) << '\n'
      << "alpha0 = " << num(c.alpha0) << '\n'
      << "alpha1 = " << num(c.alpha1) << '\n'
      << "N = " << c.N << '\n'
      << "N_bar = " << c.N_bar << '\n'
      << "I_bar = " << c.I_bar << '\n'
      << "nu = " << num(c.nu) << '\n'
      << "c_fixed = " << num(c.c_fixed) << '\n'
      << "eps_rel = " << num(c.eps_rel) << "  # stop when ||g_k|| <= eps_rel * ||g_0||\n"
      << "eta = " << num(c.eta) << '\n'
      << "relaxed_scale = " << num(c.relaxed_scale) << '\n'
      << "relaxed_power = " << num(c.relaxed_power) << '\n'
      << "cg_rel_tol = " << (c.cg_rel_tol ? num(*c.cg_rel_tol) : "auto") << '\n'
      << "max_cg = " << (c.max_cg ? std::to_string(*c.max_cg) : "auto") << '\n'
      << "max_iters = " << c.max_iters << '\n'
      << "max_fevals = " << c.max_fevals << '\n';
}

Problem build_problem(const std::string& name, std::size_t dim) {
  try {
    return make_problem(name, dim);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

std::string join_dims(const std::vector<std::size_t>& dims) {
  std::string s;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(dims[i]);
  }
  return s;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(dir + ": cannot create directory: " + ec.message());
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err,
            const CliEnvironment& env) {
  CLI::App app{"Nonmonotone adaptive trust-region solver and benchmark harness", "natr"};
  app.require_subcommand(1, 1);

  // solve
  std::string problem_name;
  std::size_t dim = 0;
  std::string policy = "natr";
  std::vector<std::string> params;
  std::string trace_path;
  bool print_cfg = false;
  std::string kernel_name;
  auto* solve_cmd = app.add_subcommand("solve", "Solve one problem and print a summary line");
  solve_cmd->add_option("--problem", problem_name, "Problem name (see list-problems)");
  solve_cmd->add_option("--dim", dim, "Problem dimension");
  solve_cmd->add_option("--policy", policy, "natr|iatr|niatr1|niatr2|monotone")
      ->check(CLI::IsMember({"natr", "iatr", "niatr1", "niatr2", "monotone"}));
  solve_cmd->add_option("--param", params, "Override a parameter, k=v (repeatable)");
  solve_cmd->add_option("--trace", trace_path, "Write the iteration trace to FILE");
  solve_cmd->add_flag("--print-config", print_cfg, "Print the effective configuration and exit");
  solve_cmd->add_option("--kernels", kernel_name, "Force a kernel backend: scalar|avx2|neon");

  // bench
  std::string suite = "default";
  std::string out_dir;
  std::size_t parallel = 1;
  std::string solvers_list = "natr,iatr,niatr1,niatr2";
  std::vector<std::string> bench_params;
  bool no_warmup = false;
  auto* bench_cmd = app.add_subcommand("bench", "Run a solver x problem grid and write records CSV");
  bench_cmd->add_option("--suite", suite, "'default' or a suite file with NAME DIM lines");
  bench_cmd->add_option("--out", out_dir, "Output directory")->required();
  bench_cmd->add_option("--parallel", parallel, "Worker threads")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--solvers", solvers_list, "Comma-separated policies");
  bench_cmd->add_option("--param", bench_params, "Override a parameter for every solver, k=v");
  bench_cmd->add_flag("--no-warmup", no_warmup, "Skip the discarded warm-up run");

  // profile
  std::string records_path;
  std::string index_name = "fevals";
  std::string profile_out;
  bool linear = false;
  auto* profile_cmd = app.add_subcommand("profile", "Dolan-More profile from a records CSV");
  profile_cmd->add_option("--records", records_path, "Records CSV written by bench")->required();
  profile_cmd->add_option("--index", index_name, "fevals|iters|time")
      ->check(CLI::IsMember({"fevals", "iters", "time"}));
  profile_cmd->add_option("--out", profile_out, "Output directory")->required();
  profile_cmd->add_flag("--linear", linear, "Linear tau axis instead of log2");

  // check-grad
  std::string cg_problem;
  std::size_t cg_dim = 0;
  std::size_t cg_points = 0;
  double cg_step = 1e-6;
  std::uint64_t cg_seed = 42;
  auto* check_cmd = app.add_subcommand("check-grad", "Compare gradients with central differences");
  check_cmd->add_option("--problem", cg_problem, "Problem name")->required();
  check_cmd->add_option("--dim", cg_dim, "Problem dimension")->required();
  check_cmd->add_option("--points", cg_points, "Extra random points in [-2, 2]^n");
  check_cmd->add_option("--step", cg_step, "Difference step h")->check(CLI::PositiveNumber);
  check_cmd->add_option("--seed", cg_seed, "Seed for the random points");

  auto* list_cmd = app.add_subcommand("list-problems", "Print the problem registry");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*list_cmd) {
      char line[256];
      std::snprintf(line, sizeof line, "%-10s  %-24s  %s\n", "NAME", "DIMS", "CONSTRAINT");
      out << line;
      for (const ProblemInfo& info : problem_registry()) {
        std::snprintf(line, sizeof line, "%-10s  %-24s  %s\n", info.name.c_str(),
                      join_dims(info.listed_dims).c_str(), info.constraint().c_str());
        out << line;
      }
      return kExitOk;
    }

    if (*solve_cmd) {
      TrustRegionConfig cfg;
      cfg.policy = *parse_policy(policy);
      apply_params(cfg, params);
      if (print_cfg) {
        print_config(out, cfg);
        return kExitOk;
      }
      if (!kernel_name.empty()) {
        bool ok = false;
        for (auto b : {kernels::Backend::scalar, kernels::Backend::avx2, kernels::Backend::neon})
          if (kernels::to_string(b) == kernel_name) ok = kernels::select(b);
        if (!ok) throw UsageError("--kernels: backend '" + kernel_name + "' unavailable");
      }
      if (problem_name.empty()) throw UsageError("solve: --problem is required");
      if (solve_cmd->count("--dim") == 0) throw UsageError("solve: --dim is required");
      const Problem p = build_problem(problem_name, dim);
      cfg.record_trace = !trace_path.empty();
      const RunResult r = solve(p, cfg);
      if (!trace_path.empty()) {
        std::ofstream tf(trace_path);
        if (!tf) throw IoError(trace_path + ": cannot open trace file");
        write_trace(tf, r.trace);
      }
      const char* color = "";
      const char* reset = "";
      if (env.color) {
        color = r.status == RunStatus::converged ? "\033[32m" : "\033[31m";
        reset = "\033[0m";
      }
      char line[512];
      std::snprintf(line, sizeof line,
                    "%s %zu %s status=%s%s%s iters=%zu fevals=%zu gevals=%zu f=%.10g gnorm=%.3e "
                    "time_s=%.4f\n",
                    p.name.c_str(), p.dim, std::string(policy_name(cfg.policy)).c_str(), color,
                    std::string(to_string(r.status)).c_str(), reset, r.iters, r.fevals, r.gevals,
                    r.final_f, r.final_gnorm, r.wall_time);
      out << line;
      switch (r.status) {
        case RunStatus::converged:
          return kExitOk;
        case RunStatus::max_iters:
        case RunStatus::max_fevals:
          return kExitBudget;
        case RunStatus::numerical_failure:
          return kExitNumerical;
      }
    }

    if (*bench_cmd) {
      TrustRegionConfig base;
      apply_params(base, bench_params);
      std::vector<SolverSpec> solvers;
      for (const std::string& name : split_list(solvers_list)) {
        const auto pol = parse_policy(name);
        if (!pol) throw UsageError("--solvers: unknown policy '" + name + "'");
        TrustRegionConfig cfg = base;
        cfg.policy = *pol;
        solvers.push_back(SolverSpec{name, cfg});
      }
      if (solvers.empty()) throw UsageError("--solvers: empty list");
      std::vector<ProblemSpec> problems = suite == "default" ? default_suite() : read_suite(suite);
      if (problems.empty()) throw UsageError("bench: suite is empty");
      for (const ProblemSpec& ps : problems) (void)build_problem(ps.name, ps.dim);

      BenchOptions opts;
      opts.parallelism = parallel;
      opts.warmup = !no_warmup;
      const auto records = run_suite(problems, solvers, opts);
      ensure_dir(out_dir);
      const auto path = std::filesystem::path(out_dir) / "records.csv";
      export_records_csv(records, path);
      for (const SolverSpec& s : solvers) {
        std::size_t failures = 0;
        for (const RunRecord& r : records)
          if (r.solver == s.name && r.status != RunStatus::converged) ++failures;
        out << s.name << ": " << failures << " failure(s) of " << problems.size() << '\n';
      }
      out << "wrote " << path.string() << '\n';
      return kExitOk;
    }

    if (*profile_cmd) {
      const auto records = read_records_csv(records_path);
      const CostIndex index = *parse_cost_index(index_name);
      const auto curves = performance_profile(records, index);
      ensure_dir(profile_out);
      const auto base = std::filesystem::path(profile_out) / ("profile_" + index_name);
      export_curves_csv(curves, base.string() + ".csv");
      export_svg(curves, base.string() + ".svg", !linear,
                 "Performance profile (" + index_name + ")");
      for (const ProfileCurve& c : curves) {
        out << c.solver << ": rho(1) = " << num(profile_value(c, 1.0))
            << ", solved = " << num(c.solved_fraction) << '\n';
      }
      out << "wrote " << base.string() << ".csv and .svg\n";
      return kExitOk;
    }

    if (*check_cmd) {
      const Problem p = build_problem(cg_problem, cg_dim);
      std::vector<std::vector<double>> pts{p.x0};
      for (auto& x : random_points(p.dim, cg_points, -2.0, 2.0, cg_seed)) pts.push_back(std::move(x));
      const GradCheckReport rep = check_gradient(p, pts, cg_step);
      char line[256];
      std::snprintf(line, sizeof line, "%s %zu max_rel_err=%.3e worst_index=%zu points=%zu\n",
                    p.name.c_str(), p.dim, rep.max_rel_err, rep.worst_index, rep.points_tested);
      out << line;
      return rep.max_rel_err <= 1e-5 ? kExitOk : kExitCheckFailed;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  } catch (const EvaluationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace natr
