#include "natr/quasinewton.hpp"

#include <algorithm>
#include <cmath>

#include "natr/errors.hpp"
#include "natr/kernels.hpp"

namespace natr {

namespace kn = kernels;

HessianApprox::HessianApprox(std::size_t n, double cap) : n_(n), norm_cap_(cap), r_(n * n, 0.0) {
  reset_identity();
}

HessianApprox HessianApprox::identity(std::size_t n, double norm_cap) {
  if (n == 0) throw PreconditionError("HessianApprox: dimension must be positive");
  if (!(norm_cap > 0.0)) throw PreconditionError("HessianApprox: norm cap must be positive");
  return HessianApprox(n, norm_cap);
}

void HessianApprox::reset_identity() {
  std::fill(r_.begin(), r_.end(), 0.0);
  for (std::size_t i = 0; i < n_; ++i) r_[i * n_ + i] = 1.0;
  frob2_ = double(n_);
}

double HessianApprox::operator()(std::size_t i, std::size_t j) const noexcept {
  const std::size_t m = std::min(i, j);
  double s = 0.0;
  for (std::size_t k = 0; k <= m; ++k) s += r_[k * n_ + i] * r_[k * n_ + j];
  return s;
}

std::vector<double> HessianApprox::dense() const {
  std::vector<double> b(n_ * n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i; j < n_; ++j) b[i * n_ + j] = b[j * n_ + i] = (*this)(i, j);
  return b;
}

void HessianApprox::apply(std::span<const double> x, std::span<double> y) const noexcept {
  std::vector<double> t(n_);
  kn::trmv(r_, x, t);
  kn::trmv_t(r_, t, y);
}

LinearOperator HessianApprox::as_operator() const {
  return [this](std::span<const double> x, std::span<double> y) { apply(x, y); };
}

namespace {

// R <- triangular factor of R + a b', as in the classical QR rank-one update.
// a is overwritten.
void qr_rank1(std::vector<double>& R, std::size_t n, std::vector<double>& a,
              std::span<const double> b) {
  auto row = [&](std::size_t i, std::size_t from) {
    return std::span<double>(R.data() + i * n + from, n - from);
  };
  for (std::size_t k = n - 1; k >= 1; --k) {
    const double r = std::hypot(a[k - 1], a[k]);
    if (r == 0.0) continue;
    const double c = a[k - 1] / r, s = a[k] / r;
    kn::rot(row(k - 1, k - 1), row(k, k - 1), c, s);
    a[k - 1] = r;
    a[k] = 0.0;
  }
  kn::axpy(a[0], b, row(0, 0));
  for (std::size_t k = 0; k + 1 < n; ++k) {
    double& sub = R[(k + 1) * n + k];
    const double r = std::hypot(R[k * n + k], sub);
    if (r == 0.0) continue;
    const double c = R[k * n + k] / r, s = sub / r;
    kn::rot(row(k, k), row(k + 1, k), c, s);
    sub = 0.0;
  }
  for (std::size_t k = 0; k < n; ++k)
    if (R[k * n + k] < 0.0)
      for (double& v : row(k, k)) v = -v;
}

}  // namespace

struct MbfgsAccess {
  static UpdateReport update(HessianApprox& H, std::span<const double> s,
                             std::span<const double> y, double x_norm) {
    const std::size_t n = H.n_;
    if (s.size() != n || y.size() != n) throw PreconditionError("mbfgs_update: length mismatch");

    UpdateReport rep;
    rep.s_norm2 = kn::dot(s, s);
    if (std::sqrt(rep.s_norm2) <= 1e-14 * std::max(1.0, x_norm)) {
      ++H.skipped_;
      rep.outcome = UpdateOutcome::skipped_small_step;
      return rep;
    }

    rep.shift = std::max(0.0, -kn::dot(y, s) / rep.s_norm2) + kCurvatureShift;
    rep.ybar.assign(y.begin(), y.end());
    kn::axpy(rep.shift, s, rep.ybar);
    rep.ybar_dot_s = kn::dot(rep.ybar, s);

    std::vector<double> Rs(n), Bs(n);
    kn::trmv(H.r_, s, Rs);
    const double sBs = kn::dot(Rs, Rs);
    const double ys = rep.ybar_dot_s;
    if (!(sBs > 0.0) || !std::isfinite(sBs) || !(ys > 0.0) || !std::isfinite(ys)) {
      ++H.skipped_;
      rep.outcome = UpdateOutcome::skipped_degenerate;
      return rep;
    }
    kn::trmv_t(H.r_, Rs, Bs);

    // B+ = B - uu' + ww' with u = Bs / sqrt(s'Bs), w = ybar / sqrt(ybar's).
    std::vector<double> BBs(n), By(n);
    H.apply(Bs, BBs);
    H.apply(rep.ybar, By);
    const double uu = kn::dot(Bs, Bs) / sBs;
    const double ww = kn::dot(rep.ybar, rep.ybar) / ys;
    const double uw = kn::dot(Bs, rep.ybar);
    const double frob2 = H.frob2_ + uu * uu + ww * ww - 2.0 * kn::dot(Bs, BBs) / sBs +
                         2.0 * kn::dot(rep.ybar, By) / ys - 2.0 * (uw * uw) / (sBs * ys);
    if (!(std::sqrt(std::max(frob2, 0.0)) <= H.norm_cap_)) {
      H.reset_identity();
      ++H.skipped_;
      ++H.resets_;
      rep.outcome = UpdateOutcome::reset_norm_cap;
      return rep;
    }

    // R'R + ... = (R + a b')'(R + a b') with a = alpha R s / ybar's,
    // b = ybar - alpha B s, alpha = sqrt(ybar's / s'Bs).
    const double alpha = std::sqrt(ys / sBs);
    std::vector<double> a(n), b(rep.ybar);
    for (std::size_t i = 0; i < n; ++i) a[i] = alpha / ys * Rs[i];
    kn::axpy(-alpha, Bs, b);
    qr_rank1(H.r_, n, a, b);
    H.frob2_ = std::max(frob2, 0.0);

    ++H.applied_;
    rep.outcome = UpdateOutcome::applied;
    return rep;
  }
};

UpdateReport mbfgs_update(HessianApprox& H, std::span<const double> s, std::span<const double> y,
                          double x_norm) {
  return MbfgsAccess::update(H, s, y, x_norm);
}

}  // namespace natr
