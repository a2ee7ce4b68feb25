#pragma once

// Native test problems with analytic gradients, keyed by (name, dimension).
//
// Families follow the CUTEst / More-Garbow-Hillstrom definitions, with the
// standard start point of each family. Evaluators are pure and may be called
// concurrently.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace natr {

struct Problem {
  std::string name;
  std::size_t dim = 0;
  std::vector<double> x0;
  std::function<double(std::span<const double>)> eval_f;
  // Writes the full gradient into g (g.size() == dim).
  std::function<void(std::span<const double>, std::span<double>)> eval_g;

  double value(std::span<const double> x) const;
  void gradient(std::span<const double> x, std::span<double> g) const;
  std::vector<double> gradient(std::span<const double> x) const;
};

struct ProblemInfo {
  std::string name;
  // Dimensions used for this family in the reference problem list.
  std::vector<std::size_t> listed_dims;
  std::size_t min_dim = 1;
  std::size_t multiple_of = 1;

  std::string constraint() const;
  bool accepts(std::size_t n) const noexcept { return n >= min_dim && n % multiple_of == 0; }
  std::size_t smallest_listed() const { return listed_dims.front(); }
};

// Every registered name in registration order.
const std::vector<ProblemInfo>& problem_registry();
const ProblemInfo& problem_info(std::string_view name);

// Throws UnknownProblemError or UnsupportedDimensionError.
Problem make_problem(std::string_view name, std::size_t dim);

struct KnownMinimum {
  std::vector<double> x;
  double f = 0.0;
};

// Closed-form global minimiser, for the families that have one.
std::optional<KnownMinimum> known_minimum(std::string_view name, std::size_t dim);

struct GradCheckReport {
  double max_rel_err = 0.0;
  std::size_t worst_index = 0;
  std::size_t points_tested = 0;
};

// max_i |g_i(x) - (f(x + h e_i) - f(x - h e_i)) / (2h)| / max(1, |g_i(x)|)
GradCheckReport check_gradient(const Problem& p, std::span<const double> x, double h);

// Worst case over several points; points_tested counts them.
GradCheckReport check_gradient(const Problem& p, std::span<const std::vector<double>> points,
                               double h);

// Uniform points in [lo, hi]^dim from a fixed-seed generator.
std::vector<std::vector<double>> random_points(std::size_t dim, std::size_t count, double lo,
                                               double hi, std::uint64_t seed);

}  // namespace natr
