#pragma once

// Independent reference computations for the test suites. These use Eigen
// and share no code with the library.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "natr/quasinewton.hpp"

namespace natr::oracle {

inline Eigen::MatrixXd to_matrix(const HessianApprox& B) {
  const auto n = static_cast<Eigen::Index>(B.dim());
  Eigen::MatrixXd M(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) M(i, j) = B(std::size_t(i), std::size_t(j));
  return M;
}

inline double spectral_norm(const Eigen::MatrixXd& B) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

inline bool cholesky_ok(const Eigen::MatrixXd& B) {
  Eigen::LLT<Eigen::MatrixXd> llt(B);
  return llt.info() == Eigen::Success;
}

// (sigma_max / sigma_min)^2 of the stored triangular factor.
inline double factor_condition(const HessianApprox& B) {
  const auto n = static_cast<Eigen::Index>(B.dim());
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> R(
      B.factor().data(), n, n);
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(R).singularValues();
  const double c = sv.maxCoeff() / sv.minCoeff();
  return c * c;
}

struct ExactStep {
  Eigen::VectorXd d;
  double pred = 0.0;
  double lambda = 0.0;
  bool hard_case = false;
};

// Global minimiser of g'd + 1/2 d'Bd over ||d|| <= delta via the eigen
// decomposition and bisection on the secular equation ||d(lambda)|| = delta.
inline ExactStep exact_trust_region(const Eigen::VectorXd& g, const Eigen::MatrixXd& B,
                                    double delta) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
  const Eigen::VectorXd lam = es.eigenvalues();
  const Eigen::MatrixXd& Q = es.eigenvectors();
  const Eigen::VectorXd gh = Q.transpose() * g;
  const Eigen::Index n = g.size();

  auto step = [&](double l, bool drop_singular) {
    Eigen::VectorXd c(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double den = lam(i) + l;
      c(i) = (drop_singular && std::abs(den) <= 1e-12 * (1.0 + std::abs(lam(i)))) ? 0.0
                                                                               : -gh(i) / den;
    }
    return c;
  };
  auto model = [&](const Eigen::VectorXd& d) { return -(g.dot(d) + 0.5 * d.dot(B * d)); };

  ExactStep out;
  const double l1 = lam.minCoeff();
  if (l1 > 0.0) {
    const Eigen::VectorXd c = step(0.0, false);
    if (c.norm() <= delta) {
      out.d = Q * c;
      out.pred = model(out.d);
      return out;
    }
  }

  double lo = std::max(0.0, -l1);
  // Hard case: the step at the shift -l1 with the singular components removed
  // stays inside the ball.
  const Eigen::VectorXd c_lo = step(lo, true);
  bool singular_lo = false;
  bool orthogonal = true;
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::abs(lam(i) + lo) <= 1e-12 * (1.0 + std::abs(lam(i)))) {
      singular_lo = true;
      orthogonal = orthogonal && std::abs(gh(i)) <= 1e-12 * g.norm();
    }
  if (singular_lo && orthogonal && c_lo.norm() <= delta) {
    Eigen::Index j = 0;
    lam.minCoeff(&j);
    const double t = std::sqrt(std::max(0.0, delta * delta - c_lo.squaredNorm()));
    Eigen::VectorXd c = c_lo;
    c(j) += t;
    out.d = Q * c;
    out.pred = model(out.d);
    out.lambda = lo;
    out.hard_case = true;
    return out;
  }

  double hi = g.norm() / delta + std::abs(l1) + 1.0;
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (step(mid, false).norm() > delta)
      lo = mid;
    else
      hi = mid;
  }
  out.lambda = hi;
  out.d = Q * step(hi, false);
  out.pred = model(out.d);
  return out;
}

struct RandomInstance {
  Eigen::VectorXd g;
  Eigen::MatrixXd B;
  double delta = 1.0;
  bool indefinite = false;
};

// n in [min_n, max_n]; eigenvalues log-uniform in [1e-2, 1e2], about half of the
// instances with some negative eigenvalues; delta log-uniform in [1e-2, 1e1].
inline RandomInstance random_instance(std::mt19937_64& rng, int min_n, int max_n,
                                      bool allow_indefinite) {
  std::uniform_int_distribution<int> dim(min_n, max_n);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  RandomInstance r;
  const int n = dim(rng);
  Eigen::MatrixXd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = normal(rng);
  const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(A).householderQ();
  Eigen::VectorXd lam(n);
  r.indefinite = allow_indefinite && unit(rng) < 0.5;
  for (int i = 0; i < n; ++i) {
    lam(i) = std::pow(10.0, -2.0 + 4.0 * unit(rng));
    if (r.indefinite && unit(rng) < 0.5) lam(i) = -lam(i);
  }
  if (r.indefinite && lam.minCoeff() > 0.0) lam(0) = -lam(0);
  r.B = Q * lam.asDiagonal() * Q.transpose();
  r.B = 0.5 * (r.B + r.B.transpose()).eval();
  r.g.resize(n);
  for (int i = 0; i < n; ++i) r.g(i) = normal(rng);
  r.g *= std::pow(10.0, -1.0 + 2.0 * unit(rng));
  r.delta = std::pow(10.0, -2.0 + 3.0 * unit(rng));
  return r;
}

}  // namespace natr::oracle
