#include "natr/problems.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "natr/errors.hpp"

namespace natr {

using Vec = std::span<const double>;
using Grad = std::span<double>;

namespace {

inline double sq(double v) { return v * v; }
inline double cube(double v) { return v * v * v; }
inline double quart(double v) { return sq(sq(v)); }

void zero(Grad g) { std::fill(g.begin(), g.end(), 0.0); }

// ---------------------------------------------------------------------------
// Family definitions. Indices are 0-based; comments use the usual 1-based sums.

// sum_{i<=n/2} 100 (x_{2i} - x_{2i-1}^2)^2 + (x_{2i-1} - 1)^2
double srosenbr_f(Vec x) {
  double f = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); i += 2) {
    const double t = x[i + 1] - sq(x[i]);
    f += 100.0 * sq(t) + sq(x[i] - 1.0);
  }
  return f;
}
void srosenbr_g(Vec x, Grad g) {
  for (std::size_t i = 0; i + 1 < x.size(); i += 2) {
    const double t = x[i + 1] - sq(x[i]);
    g[i] = -400.0 * t * x[i] + 2.0 * (x[i] - 1.0);
    g[i + 1] = 200.0 * t;
  }
}

// sum_{i<n} (-4 x_i + 3) + (x_i^2 + x_n^2)^2
double arwhead_f(Vec x) {
  const std::size_t n = x.size();
  const double xn2 = sq(x[n - 1]);
  double f = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) f += -4.0 * x[i] + 3.0 + sq(sq(x[i]) + xn2);
  return f;
}
void arwhead_g(Vec x, Grad g) {
  const std::size_t n = x.size();
  zero(g);
  const double xn2 = sq(x[n - 1]);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double s = sq(x[i]) + xn2;
    g[i] += -4.0 + 4.0 * s * x[i];
    g[n - 1] += 4.0 * s * x[n - 1];
  }
}

// Wood function repeated over blocks of four.
double woods_f(Vec x) {
  double f = 0.0;
  for (std::size_t j = 0; j + 3 < x.size(); j += 4) {
    const double a = x[j], b = x[j + 1], c = x[j + 2], d = x[j + 3];
    f += 100.0 * sq(b - sq(a)) + sq(1.0 - a) + 90.0 * sq(d - sq(c)) + sq(1.0 - c) +
         10.0 * sq(b + d - 2.0) + 0.1 * sq(b - d);
  }
  return f;
}
void woods_g(Vec x, Grad g) {
  for (std::size_t j = 0; j + 3 < x.size(); j += 4) {
    const double a = x[j], b = x[j + 1], c = x[j + 2], d = x[j + 3];
    const double t1 = b - sq(a);
    const double t2 = d - sq(c);
    const double t3 = b + d - 2.0;
    const double t4 = b - d;
    g[j] = -400.0 * t1 * a - 2.0 * (1.0 - a);
    g[j + 1] = 200.0 * t1 + 20.0 * t3 + 0.2 * t4;
    g[j + 2] = -360.0 * t2 * c - 2.0 * (1.0 - c);
    g[j + 3] = 180.0 * t2 + 20.0 * t3 - 0.2 * t4;
  }
}

// sum_i 4 (x_i^2 - x_1)^2 + (x_i - 1)^2
double liarwhd_f(Vec x) {
  double f = 0.0;
  for (double xi : x) f += 4.0 * sq(sq(xi) - x[0]) + sq(xi - 1.0);
  return f;
}
void liarwhd_g(Vec x, Grad g) {
  zero(g);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = sq(x[i]) - x[0];
    g[i] += 16.0 * t * x[i] + 2.0 * (x[i] - 1.0);
    g[0] += -8.0 * t;
  }
}

// sum_{i<=n-2} x_i^2 + 100 x_{i+1}^2 + 100 x_{i+2}^2
double dqdrtic_f(Vec x) {
  double f = 0.0;
  for (std::size_t i = 0; i + 2 < x.size(); ++i)
    f += sq(x[i]) + 100.0 * sq(x[i + 1]) + 100.0 * sq(x[i + 2]);
  return f;
}
void dqdrtic_g(Vec x, Grad g) {
  zero(g);
  for (std::size_t i = 0; i + 2 < x.size(); ++i) {
    g[i] += 2.0 * x[i];
    g[i + 1] += 200.0 * x[i + 1];
    g[i + 2] += 200.0 * x[i + 2];
  }
}

// sum_i (x_i - i)^4; DQRTIC and QUARTC share this definition.
double quartic_f(Vec x) {
  double f = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) f += quart(x[i] - double(i + 1));
  return f;
}
void quartic_g(Vec x, Grad g) {
  for (std::size_t i = 0; i < x.size(); ++i) g[i] = 4.0 * cube(x[i] - double(i + 1));
}

// (x_1 - 1)^2 + sum_{i>=2} i (2 x_i - x_{i-1})^2
double tridia_f(Vec x) {
  double f = sq(x[0] - 1.0);
  for (std::size_t i = 1; i < x.size(); ++i) f += double(i + 1) * sq(2.0 * x[i] - x[i - 1]);
  return f;
}
void tridia_g(Vec x, Grad g) {
  zero(g);
  g[0] = 2.0 * (x[0] - 1.0);
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double w = double(i + 1);
    const double t = 2.0 * x[i] - x[i - 1];
    g[i] += 4.0 * w * t;
    g[i - 1] += -2.0 * w * t;
  }
}

// (x_1 - 1)^2 + sum_{2<=j<=n-1} (x_j - x_{j+1})^2 + (x_n - 1)^2
double dixon3dq_f(Vec x) {
  const std::size_t n = x.size();
  double f = sq(x[0] - 1.0) + sq(x[n - 1] - 1.0);
  for (std::size_t j = 1; j + 1 < n; ++j) f += sq(x[j] - x[j + 1]);
  return f;
}
void dixon3dq_g(Vec x, Grad g) {
  const std::size_t n = x.size();
  zero(g);
  g[0] += 2.0 * (x[0] - 1.0);
  g[n - 1] += 2.0 * (x[n - 1] - 1.0);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double t = 2.0 * (x[j] - x[j + 1]);
    g[j] += t;
    g[j + 1] -= t;
  }
}

// Powell singular function repeated over blocks of four.
double powellsg_f(Vec x) {
  double f = 0.0;
  for (std::size_t j = 0; j + 3 < x.size(); j += 4) {
    const double a = x[j], b = x[j + 1], c = x[j + 2], d = x[j + 3];
    f += sq(a + 10.0 * b) + 5.0 * sq(c - d) + quart(b - 2.0 * c) + 10.0 * quart(a - d);
  }
  return f;
}
void powellsg_g(Vec x, Grad g) {
  for (std::size_t j = 0; j + 3 < x.size(); j += 4) {
    const double a = x[j], b = x[j + 1], c = x[j + 2], d = x[j + 3];
    const double t1 = a + 10.0 * b;
    const double t2 = c - d;
    const double t3 = cube(b - 2.0 * c);
    const double t4 = cube(a - d);
    g[j] = 2.0 * t1 + 40.0 * t4;
    g[j + 1] = 20.0 * t1 + 4.0 * t3;
    g[j + 2] = 10.0 * t2 - 8.0 * t3;
    g[j + 3] = -10.0 * t2 - 40.0 * t4;
  }
}

// (sum_i i x_i^2)^2
double power_f(Vec x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += double(i + 1) * sq(x[i]);
  return sq(s);
}
void power_g(Vec x, Grad g) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += double(i + 1) * sq(x[i]);
  for (std::size_t i = 0; i < x.size(); ++i) g[i] = 4.0 * s * double(i + 1) * x[i];
}

// (x_1 - 1)^2 + sum_{i>=2} 100 (x_1 - x_{i-1}^2)^2
double nondia_f(Vec x) {
  double f = sq(x[0] - 1.0);
  for (std::size_t i = 1; i < x.size(); ++i) f += 100.0 * sq(x[0] - sq(x[i - 1]));
  return f;
}
void nondia_g(Vec x, Grad g) {
  zero(g);
  g[0] = 2.0 * (x[0] - 1.0);
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double t = x[0] - sq(x[i - 1]);
    g[0] += 200.0 * t;
    g[i - 1] += -400.0 * t * x[i - 1];
  }
}

// sum_{i<n} (x_i^2 + x_{i+1}^2)^2 - 4 x_i + 3
double engval1_f(Vec x) {
  double f = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    f += sq(sq(x[i]) + sq(x[i + 1])) - 4.0 * x[i] + 3.0;
  return f;
}
void engval1_g(Vec x, Grad g) {
  zero(g);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double s = sq(x[i]) + sq(x[i + 1]);
    g[i] += 4.0 * s * x[i] - 4.0;
    g[i + 1] += 4.0 * s * x[i + 1];
  }
}

// 16 + sum_{i<n} (x_i - 2)^4 + (x_i x_{i+1} - 2 x_{i+1})^2 + (x_{i+1} + 1)^2
double edensch_f(Vec x) {
  double f = 16.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    f += quart(x[i] - 2.0) + sq(x[i] * x[i + 1] - 2.0 * x[i + 1]) + sq(x[i + 1] + 1.0);
  return f;
}
void edensch_g(Vec x, Grad g) {
  zero(g);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double t = x[i] * x[i + 1] - 2.0 * x[i + 1];
    g[i] += 4.0 * cube(x[i] - 2.0) + 2.0 * t * x[i + 1];
    g[i + 1] += 2.0 * t * (x[i] - 2.0) + 2.0 * (x[i + 1] + 1.0);
  }
}

// Chained Freudenstein-Roth.
double freuroth_f(Vec x) {
  double f = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i], b = x[i + 1];
    const double r1 = -13.0 + a + ((5.0 - b) * b - 2.0) * b;
    const double r2 = -29.0 + a + ((b + 1.0) * b - 14.0) * b;
    f += sq(r1) + sq(r2);
  }
  return f;
}
void freuroth_g(Vec x, Grad g) {
  zero(g);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i], b = x[i + 1];
    const double r1 = -13.0 + a + ((5.0 - b) * b - 2.0) * b;
    const double r2 = -29.0 + a + ((b + 1.0) * b - 14.0) * b;
    const double dr1 = 10.0 * b - 3.0 * sq(b) - 2.0;
    const double dr2 = 3.0 * sq(b) + 2.0 * b - 14.0;
    g[i] += 2.0 * (r1 + r2);
    g[i + 1] += 2.0 * (r1 * dr1 + r2 * dr2);
  }
}

// sum_{i<=n-4} (-4 x_i + 3)^2 + (x_i^2 + 2x_{i+1}^2 + 3x_{i+2}^2 + 4x_{i+3}^2 + 5x_n^2)^2
double bdqrtic_f(Vec x) {
  const std::size_t n = x.size();
  const double tail = 5.0 * sq(x[n - 1]);
  double f = 0.0;
  for (std::size_t i = 0; i + 4 < n; ++i) {
    const double s =
        sq(x[i]) + 2.0 * sq(x[i + 1]) + 3.0 * sq(x[i + 2]) + 4.0 * sq(x[i + 3]) + tail;
    f += sq(-4.0 * x[i] + 3.0) + sq(s);
  }
  return f;
}
void bdqrtic_g(Vec x, Grad g) {
  const std::size_t n = x.size();
  zero(g);
  const double tail = 5.0 * sq(x[n - 1]);
  for (std::size_t i = 0; i + 4 < n; ++i) {
    const double s =
        sq(x[i]) + 2.0 * sq(x[i + 1]) + 3.0 * sq(x[i + 2]) + 4.0 * sq(x[i + 3]) + tail;
    g[i] += -8.0 * (-4.0 * x[i] + 3.0) + 4.0 * s * x[i];
    g[i + 1] += 8.0 * s * x[i + 1];
    g[i + 2] += 12.0 * s * x[i + 2];
    g[i + 3] += 16.0 * s * x[i + 3];
    g[n - 1] += 20.0 * s * x[n - 1];
  }
}

// sum_{i<n} cos(x_i^2 - x_{i+1}/2)
double cosine_f(Vec x) {
  double f = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) f += std::cos(-0.5 * x[i + 1] + sq(x[i]));
  return f;
}
void cosine_g(Vec x, Grad g) {
  zero(g);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double s = std::sin(-0.5 * x[i + 1] + sq(x[i]));
    g[i] += -2.0 * x[i] * s;
    g[i + 1] += 0.5 * s;
  }
}

// Chained Cragg-Levy over overlapping blocks of four.
double cragglvy_f(Vec x) {
  double f = 0.0;
  for (std::size_t j = 0; j + 3 < x.size(); j += 2) {
    const double a = x[j], b = x[j + 1], c = x[j + 2], d = x[j + 3];
    const double e = std::exp(a) - b;
    const double t = std::tan(c - d) + c - d;
    f += quart(e) + 100.0 * cube(sq(b - c)) + quart(t) + sq(quart(a)) + sq(d - 1.0);
  }
  return f;
}
void cragglvy_g(Vec x, Grad g) {
  zero(g);
  for (std::size_t j = 0; j + 3 < x.size(); j += 2) {
    const double a = x[j], b = x[j + 1], c = x[j + 2], d = x[j + 3];
    const double ea = std::exp(a);
    const double e = ea - b;
    const double tn = std::tan(c - d);
    const double t = tn + c - d;
    const double bc5 = sq(sq(b - c)) * (b - c);
    const double dt = 4.0 * cube(t) * (sq(tn) + 2.0);  // d/dc of t^4; sec^2 + 1 = tan^2 + 2
    g[j] += 4.0 * cube(e) * ea + 8.0 * cube(a) * quart(a);
    g[j + 1] += -4.0 * cube(e) + 600.0 * bc5;
    g[j + 2] += -600.0 * bc5 + dt;
    g[j + 3] += -dt + 2.0 * (d - 1.0);
  }
}

// (x_1 - 1)^2 + sum_{i>=2} 4 (x_i - x_{i-1}^2)^2
double nonscomp_f(Vec x) {
  double f = sq(x[0] - 1.0);
  for (std::size_t i = 1; i < x.size(); ++i) f += 4.0 * sq(x[i] - sq(x[i - 1]));
  return f;
}
void nonscomp_g(Vec x, Grad g) {
  zero(g);
  g[0] = 2.0 * (x[0] - 1.0);
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double t = x[i] - sq(x[i - 1]);
    g[i] += 8.0 * t;
    g[i - 1] += -16.0 * t * x[i - 1];
  }
}

struct DixmaanParams {
  double alpha, beta, gamma, delta;
  int k1, k2, k3, k4;
};

// Dixon-Maany family, n = 3m:
//   1 + sum_i a x_i^2 (i/n)^k1 + sum_{i<n} b x_i^2 (x_{i+1} + x_{i+1}^2)^2 (i/n)^k2
//     + sum_{i<=2m} c x_i^2 x_{i+m}^4 (i/n)^k3 + sum_{i<=m} d x_i x_{i+2m} (i/n)^k4
double dixmaan_f(const DixmaanParams& p, Vec x) {
  const std::size_t n = x.size();
  const std::size_t m = n / 3;
  const double dn = double(n);
  double f = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = double(i + 1) / dn;
    f += p.alpha * sq(x[i]) * std::pow(r, p.k1);
    if (i + 1 < n) f += p.beta * sq(x[i]) * sq(x[i + 1] + sq(x[i + 1])) * std::pow(r, p.k2);
    if (i < 2 * m) f += p.gamma * sq(x[i]) * quart(x[i + m]) * std::pow(r, p.k3);
    if (i < m) f += p.delta * x[i] * x[i + 2 * m] * std::pow(r, p.k4);
  }
  return f;
}
void dixmaan_g(const DixmaanParams& p, Vec x, Grad g) {
  const std::size_t n = x.size();
  const std::size_t m = n / 3;
  const double dn = double(n);
  zero(g);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = double(i + 1) / dn;
    g[i] += 2.0 * p.alpha * x[i] * std::pow(r, p.k1);
    if (i + 1 < n) {
      const double w = p.beta * std::pow(r, p.k2);
      const double u = x[i + 1] + sq(x[i + 1]);
      g[i] += 2.0 * w * x[i] * sq(u);
      g[i + 1] += 2.0 * w * sq(x[i]) * u * (1.0 + 2.0 * x[i + 1]);
    }
    if (i < 2 * m) {
      const double w = p.gamma * std::pow(r, p.k3);
      g[i] += 2.0 * w * x[i] * quart(x[i + m]);
      g[i + m] += 4.0 * w * sq(x[i]) * cube(x[i + m]);
    }
    if (i < m) {
      const double w = p.delta * std::pow(r, p.k4);
      g[i] += w * x[i + 2 * m];
      g[i + 2 * m] += w * x[i];
    }
  }
}

constexpr DixmaanParams kDixmaan[12] = {
    {1.0, 0.0, 0.125, 0.125, 0, 0, 0, 0},          // A
    {1.0, 0.0625, 0.0625, 0.0625, 0, 0, 0, 1},     // B
    {1.0, 0.125, 0.125, 0.125, 0, 0, 0, 0},        // C
    {1.0, 0.26, 0.26, 0.26, 0, 0, 0, 0},           // D
    {1.0, 0.0, 0.125, 0.125, 1, 0, 0, 1},          // E
    {1.0, 0.0625, 0.0625, 0.0625, 1, 0, 0, 1},     // F
    {1.0, 0.125, 0.125, 0.125, 1, 0, 0, 1},        // G
    {1.0, 0.26, 0.26, 0.26, 1, 0, 0, 1},           // H
    {1.0, 0.0, 0.125, 0.125, 2, 0, 0, 2},          // I
    {1.0, 0.0625, 0.0625, 0.0625, 2, 0, 0, 2},     // J
    {1.0, 0.125, 0.125, 0.125, 2, 0, 0, 2},        // K
    {1.0, 0.26, 0.26, 0.26, 2, 0, 0, 2},           // L
};

// ---------------------------------------------------------------------------

using StartFn = std::vector<double> (*)(std::size_t);

struct Entry {
  ProblemInfo info;
  double (*f)(Vec);
  void (*g)(Vec, Grad);
  StartFn start;
  int dixmaan = -1;  // index into kDixmaan, otherwise -1
};

std::vector<double> filled(std::size_t n, double v) { return std::vector<double>(n, v); }

const std::vector<std::size_t> kDims4{100, 500, 1000, 5000};

std::vector<Entry> build_entries() {
  std::vector<Entry> e;
  auto add = [&](std::string name, std::vector<std::size_t> dims, std::size_t min_dim,
                 std::size_t mult, double (*f)(Vec), void (*g)(Vec, Grad), StartFn s) {
    e.push_back(Entry{ProblemInfo{std::move(name), std::move(dims), min_dim, mult}, f, g, s});
  };
  add("SROSENBR", kDims4, 2, 2, srosenbr_f, srosenbr_g, [](std::size_t n) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = (i % 2 == 0) ? -1.2 : 1.0;
    return x;
  });
  add("ARWHEAD", kDims4, 2, 1, arwhead_f, arwhead_g, [](std::size_t n) { return filled(n, 1.0); });
  add("WOODS", {100, 1000, 4000}, 4, 4, woods_f, woods_g, [](std::size_t n) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = (i % 2 == 0) ? -3.0 : -1.0;
    return x;
  });
  add("LIARWHD", kDims4, 1, 1, liarwhd_f, liarwhd_g, [](std::size_t n) { return filled(n, 4.0); });
  add("DQDRTIC", kDims4, 3, 1, dqdrtic_f, dqdrtic_g, [](std::size_t n) { return filled(n, 3.0); });
  add("DQRTIC", kDims4, 1, 1, quartic_f, quartic_g, [](std::size_t n) { return filled(n, 2.0); });
  add("QUARTC", kDims4, 1, 1, quartic_f, quartic_g, [](std::size_t n) { return filled(n, 2.0); });
  add("TRIDIA", kDims4, 2, 1, tridia_f, tridia_g, [](std::size_t n) { return filled(n, 1.0); });
  add("DIXON3DQ", {100, 1000}, 2, 1, dixon3dq_f, dixon3dq_g,
      [](std::size_t n) { return filled(n, -1.0); });
  add("POWELLSG", kDims4, 4, 4, powellsg_f, powellsg_g, [](std::size_t n) {
    std::vector<double> x(n);
    constexpr double pattern[4] = {3.0, -1.0, 0.0, 1.0};
    for (std::size_t i = 0; i < n; ++i) x[i] = pattern[i % 4];
    return x;
  });
  add("POWER", kDims4, 1, 1, power_f, power_g, [](std::size_t n) { return filled(n, 1.0); });
  add("NONDIA", kDims4, 2, 1, nondia_f, nondia_g, [](std::size_t n) { return filled(n, -1.0); });
  add("ENGVAL1", {100, 1000, 5000}, 2, 1, engval1_f, engval1_g,
      [](std::size_t n) { return filled(n, 2.0); });
  add("EDENSCH", {2000}, 2, 1, edensch_f, edensch_g, [](std::size_t n) { return filled(n, 0.0); });
  add("FREUROTH", kDims4, 2, 1, freuroth_f, freuroth_g, [](std::size_t n) {
    std::vector<double> x(n, 0.0);
    x[0] = 0.5;
    x[1] = -2.0;
    return x;
  });
  add("BDQRTIC", kDims4, 5, 1, bdqrtic_f, bdqrtic_g, [](std::size_t n) { return filled(n, 1.0); });
  add("COSINE", {100, 1000}, 2, 1, cosine_f, cosine_g, [](std::size_t n) { return filled(n, 1.0); });
  add("CRAGGLVY", kDims4, 4, 2, cragglvy_f, cragglvy_g, [](std::size_t n) {
    std::vector<double> x(n, 2.0);
    x[0] = 1.0;
    return x;
  });
  for (int k = 0; k < 12; ++k) {
    std::string name = "DIXMAAN";
    name.push_back(char('A' + k));
    Entry entry{ProblemInfo{std::move(name), {300, 1500, 3000}, 3, 3}, nullptr, nullptr,
                [](std::size_t n) { return filled(n, 2.0); }, k};
    e.push_back(std::move(entry));
  }
  add("NONSCOMP", kDims4, 1, 1, nonscomp_f, nonscomp_g,
      [](std::size_t n) { return filled(n, 3.0); });
  return e;
}

const std::vector<Entry>& entries() {
  static const std::vector<Entry> kEntries = build_entries();
  return kEntries;
}

const Entry& find_entry(std::string_view name) {
  for (const Entry& e : entries())
    if (e.info.name == name) return e;
  throw UnknownProblemError("unknown problem '" + std::string(name) + "'");
}

}  // namespace

// ---------------------------------------------------------------------------

double Problem::value(std::span<const double> x) const {
  if (x.size() != dim) throw PreconditionError(name + ": point has wrong length");
  return eval_f(x);
}

void Problem::gradient(std::span<const double> x, std::span<double> g) const {
  if (x.size() != dim || g.size() != dim)
    throw PreconditionError(name + ": point or gradient has wrong length");
  eval_g(x, g);
}

std::vector<double> Problem::gradient(std::span<const double> x) const {
  std::vector<double> g(dim);
  gradient(x, g);
  return g;
}

std::string ProblemInfo::constraint() const {
  std::ostringstream os;
  os << "n >= " << min_dim;
  if (multiple_of > 1) os << " and n divisible by " << multiple_of;
  return os.str();
}

const std::vector<ProblemInfo>& problem_registry() {
  static const std::vector<ProblemInfo> kInfos = [] {
    std::vector<ProblemInfo> v;
    for (const Entry& e : entries()) v.push_back(e.info);
    return v;
  }();
  return kInfos;
}

const ProblemInfo& problem_info(std::string_view name) { return find_entry(name).info; }

Problem make_problem(std::string_view name, std::size_t dim) {
  const Entry& e = find_entry(name);
  if (!e.info.accepts(dim)) {
    throw UnsupportedDimensionError(e.info.name + ": dimension " + std::to_string(dim) +
                                    " violates " + e.info.constraint());
  }
  Problem p;
  p.name = e.info.name;
  p.dim = dim;
  p.x0 = e.start(dim);
  if (e.dixmaan >= 0) {
    const DixmaanParams params = kDixmaan[e.dixmaan];
    p.eval_f = [params](Vec x) { return dixmaan_f(params, x); };
    p.eval_g = [params](Vec x, Grad g) { dixmaan_g(params, x, g); };
  } else {
    p.eval_f = e.f;
    p.eval_g = e.g;
  }
  return p;
}

std::optional<KnownMinimum> known_minimum(std::string_view name, std::size_t dim) {
  const Entry& e = find_entry(name);
  if (!e.info.accepts(dim)) return std::nullopt;
  KnownMinimum km;
  const std::string_view n = e.info.name;
  if (n == "SROSENBR" || n == "WOODS" || n == "LIARWHD" || n == "NONDIA" || n == "DIXON3DQ" ||
      n == "NONSCOMP") {
    km.x.assign(dim, 1.0);
  } else if (n == "DQDRTIC" || n == "POWELLSG" || n == "POWER") {
    km.x.assign(dim, 0.0);
  } else if (n == "DQRTIC" || n == "QUARTC") {
    km.x.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) km.x[i] = double(i + 1);
  } else if (n == "TRIDIA") {
    km.x.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) km.x[i] = std::ldexp(1.0, -int(i));
  } else if (n == "ARWHEAD") {
    km.x.assign(dim, 1.0);
    km.x[dim - 1] = 0.0;
  } else if (e.dixmaan >= 0) {
    km.x.assign(dim, 0.0);
    km.f = 1.0;
  } else {
    return std::nullopt;
  }
  return km;
}

GradCheckReport check_gradient(const Problem& p, std::span<const double> x, double h) {
  if (!(h > 0.0)) throw PreconditionError("check_gradient: step h must be positive");
  if (x.size() != p.dim) throw PreconditionError("check_gradient: point has wrong length");

  const double fx = p.eval_f(x);
  std::vector<double> g(p.dim);
  p.eval_g(x, g);
  if (!std::isfinite(fx) || !std::all_of(g.begin(), g.end(), [](double v) { return std::isfinite(v); }))
    throw EvaluationError(p.name + ": non-finite objective or gradient at check point");

  GradCheckReport report;
  report.points_tested = 1;
  std::vector<double> xp(x.begin(), x.end());
  for (std::size_t i = 0; i < p.dim; ++i) {
    const double xi = xp[i];
    xp[i] = xi + h;
    const double fp = p.eval_f(xp);
    xp[i] = xi - h;
    const double fm = p.eval_f(xp);
    xp[i] = xi;
    const double fd = (fp - fm) / (2.0 * h);
    const double err = std::abs(g[i] - fd) / std::max(1.0, std::abs(g[i]));
    if (!(err <= report.max_rel_err)) {
      if (!std::isfinite(err))
        throw EvaluationError(p.name + ": non-finite difference quotient at coordinate " +
                              std::to_string(i));
      report.max_rel_err = err;
      report.worst_index = i;
    }
  }
  return report;
}

GradCheckReport check_gradient(const Problem& p, std::span<const std::vector<double>> points,
                               double h) {
  GradCheckReport worst;
  for (const auto& x : points) {
    const GradCheckReport r = check_gradient(p, x, h);
    if (r.max_rel_err > worst.max_rel_err || worst.points_tested == 0) {
      worst.max_rel_err = r.max_rel_err;
      worst.worst_index = r.worst_index;
    }
    ++worst.points_tested;
  }
  return worst;
}

std::vector<std::vector<double>> random_points(std::size_t dim, std::size_t count, double lo,
                                               double hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<std::vector<double>> pts(count, std::vector<double>(dim));
  for (auto& x : pts)
    for (double& v : x) v = dist(rng);
  return pts;
}

}  // namespace natr
