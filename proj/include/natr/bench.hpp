#pragma once

// Solver x problem benchmarking and Dolan-More performance profiles.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "natr/solver.hpp"

namespace natr {

struct ProblemSpec {
  std::string name;
  std::size_t dim = 0;
  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

struct SolverSpec {
  std::string name;
  TrustRegionConfig config;
};

struct RunRecord {
  std::string problem;
  std::size_t dim = 0;
  std::string solver;
  RunStatus status = RunStatus::converged;
  std::size_t iters = 0;
  std::size_t fevals = 0;
  double wall_time = 0.0;
};

// Every registered problem at its smallest listed dimension.
std::vector<ProblemSpec> default_suite();

// "NAME DIM" per line; '#' starts a comment. Throws IoError with the
// offending line number on malformed input.
std::vector<ProblemSpec> parse_suite(std::istream& in, const std::string& source = "<suite>");
std::vector<ProblemSpec> read_suite(const std::filesystem::path& path);

// natr, iatr, niatr1, niatr2 on top of a shared base configuration.
std::vector<SolverSpec> comparison_solvers(const TrustRegionConfig& base = {});

struct BenchOptions {
  std::size_t parallelism = 1;
  // Run each pair once untimed before the recorded run.
  bool warmup = true;
  // Override the budgets of every solver config when set.
  std::optional<std::size_t> max_iters;
  std::optional<std::size_t> max_fevals;
};

// One record per (problem, solver), ordered problem-major in input order.
// Individual failures (including exceptions thrown by evaluators) are
// recorded as numerical-failure and never abort the suite.
std::vector<RunRecord> run_suite(std::span<const ProblemSpec> problems,
                                 std::span<const SolverSpec> solvers,
                                 const BenchOptions& options = {});

enum class CostIndex { fevals, iters, time };
std::string_view to_string(CostIndex c) noexcept;
std::optional<CostIndex> parse_cost_index(std::string_view s) noexcept;

struct ProfileCurve {
  std::string solver;
  // (tau, rho) at every distinct finite ratio over all solvers, ascending.
  std::vector<std::pair<double, double>> points;
  double solved_fraction = 0.0;  // rho(infinity)
  std::size_t problems = 0;      // retained problems in the denominator
};

// Problems on which every solver failed are dropped. Counts are floored at 1
// and times at 1e-9 s before ratios are formed. Throws PreconditionError for
// duplicate or missing (problem, solver) pairs.
std::vector<ProfileCurve> performance_profile(std::span<const RunRecord> records, CostIndex index);

// rho_s(tau) as a step function of the emitted curve.
double profile_value(const ProfileCurve& curve, double tau) noexcept;

void write_records_csv(std::ostream& os, std::span<const RunRecord> records);
void export_records_csv(std::span<const RunRecord> records, const std::filesystem::path& path);
std::vector<RunRecord> parse_records_csv(std::istream& in, const std::string& source = "<records>");
std::vector<RunRecord> read_records_csv(const std::filesystem::path& path);

void write_curves_csv(std::ostream& os, std::span<const ProfileCurve> curves);
void export_curves_csv(std::span<const ProfileCurve> curves, const std::filesystem::path& path);

void write_svg(std::ostream& os, std::span<const ProfileCurve> curves, bool log2_axis,
               const std::string& title = "Performance profile");
void export_svg(std::span<const ProfileCurve> curves, const std::filesystem::path& path,
                bool log2_axis, const std::string& title = "Performance profile");

}  // namespace natr
