#include "doctest.h"

#include <cmath>
#include <vector>

#include "natr/errors.hpp"
#include "natr/kernels.hpp"
#include "natr/problems.hpp"

using namespace natr;

TEST_CASE("SROSENBR start point and value") {
  const Problem p = make_problem("SROSENBR", 4);
  CHECK(p.x0 == std::vector<double>{-1.2, 1.0, -1.2, 1.0});
  // 2 * (100 (1 - 1.44)^2 + (-2.2)^2)
  CHECK(p.value(p.x0) == doctest::Approx(48.4).epsilon(1e-14));

  const Problem big = make_problem("SROSENBR", 100);
  CHECK(big.value(big.x0) == doctest::Approx(50 * 24.2).epsilon(1e-14));
  const std::vector<double> ones(100, 1.0);
  CHECK(big.value(ones) == 0.0);
  CHECK(kernels::norm2(big.gradient(ones)) == 0.0);
}

TEST_CASE("DQDRTIC vanishes at the origin") {
  const Problem p = make_problem("DQDRTIC", 100);
  const std::vector<double> zero(100, 0.0);
  CHECK(p.value(zero) == 0.0);
  CHECK(kernels::norm2(p.gradient(zero)) == 0.0);
}

TEST_CASE("registry lookups") {
  CHECK_THROWS_AS(make_problem("NOSUCHNAME", 100), UnknownProblemError);
  CHECK_THROWS_AS(make_problem("WOODS", 6), UnsupportedDimensionError);
  const ProblemInfo& info = problem_info("SROSENBR");
  CHECK(info.listed_dims == std::vector<std::size_t>{100, 500, 1000, 5000});
  CHECK(problem_registry().size() >= 20);
}

TEST_CASE("known minima are stationary") {
  for (const ProblemInfo& info : problem_registry()) {
    const auto km = known_minimum(info.name, 12);
    if (!km) continue;
    CAPTURE(info.name);
    const Problem p = make_problem(info.name, 12);
    CHECK(p.value(km->x) == doctest::Approx(km->f).epsilon(1e-12).scale(1.0));
    CHECK(kernels::norm2(p.gradient(km->x)) <= 1e-10);
  }
  for (const char* name : {"SROSENBR", "WOODS", "DQDRTIC", "TRIDIA", "POWELLSG", "LIARWHD",
                           "ARWHEAD", "NONDIA", "DIXON3DQ"})
    CHECK_MESSAGE(known_minimum(name, 12).has_value(), name);
}

TEST_CASE("evaluators are pure") {
  for (const ProblemInfo& info : problem_registry()) {
    CAPTURE(info.name);
    const Problem p = make_problem(info.name, 12);
    const auto pts = random_points(12, 2, -2.0, 2.0, 5);
    const double f1 = p.value(pts[0]);
    const auto g1 = p.gradient(pts[0]);
    (void)p.value(pts[1]);
    CHECK(p.value(pts[0]) == f1);
    CHECK(p.gradient(pts[0]) == g1);
  }
}

TEST_CASE("gradient check") {
  const Problem q = make_problem("DQDRTIC", 12);
  const auto pts = random_points(12, 5, -3.0, 3.0, 1);
  CHECK(check_gradient(q, pts, 1e-5).max_rel_err <= 1e-8);

  const Problem r = make_problem("SROSENBR", 100);
  const GradCheckReport rep = check_gradient(r, r.x0, 1e-6);
  CHECK(rep.points_tested == 1);
  CHECK(rep.max_rel_err <= 1e-5);

  const std::vector<double> short_x(11, 0.0);
  CHECK_THROWS_AS(check_gradient(q, short_x, 1e-5), PreconditionError);
  CHECK_THROWS_AS(check_gradient(q, q.x0, 0.0), PreconditionError);
}

TEST_CASE("every family passes the gradient check at n = 12") {
  const auto pts = random_points(12, 10, -2.0, 2.0, 7);
  for (const ProblemInfo& info : problem_registry()) {
    CAPTURE(info.name);
    const Problem p = make_problem(info.name, 12);
    CHECK(check_gradient(p, pts, 1e-6).max_rel_err <= 1e-5);
  }
}

TEST_CASE("random points are reproducible") {
  CHECK(random_points(3, 4, -1, 1, 9) == random_points(3, 4, -1, 1, 9));
  CHECK(random_points(3, 4, -1, 1, 9) != random_points(3, 4, -1, 1, 10));
}
