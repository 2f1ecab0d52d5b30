#pragma once

// Test-only reference implementations. Everything here is deliberately
// brute-force and independent of the library code paths it checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace oracle {

// ---------------------------------------------------------------------------
// Adaptive Simpson quadrature with a fixed absolute tolerance.
// ---------------------------------------------------------------------------

inline double adaptive_simpson_step(const std::function<double(double)>& f,
                                    double a, double b, double fa, double fm,
                                    double fb, double whole, double tol,
                                    int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson_step(f, a, m, fa, flm, fm, left, tol * 0.5, depth - 1) +
         adaptive_simpson_step(f, m, b, fm, frm, fb, right, tol * 0.5, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol = 1e-12, int depth = 60) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_step(f, a, b, fa, fm, fb, whole, tol, depth);
}

// Incomplete beta integral by quadrature. For a < 1 the integrand has an
// endpoint singularity at 0; the substitution u = y^a removes it:
//   int_0^z y^(a-1)(1-y)^(b-1) dy = (1/a) int_0^{z^a} (1 - u^(1/a))^(b-1) du.
// z must stay strictly below 1 when b < 1.
inline double incomplete_beta_quadrature(double z, double a, double b,
                                         double tol = 1e-12) {
  if (z <= 0.0) return 0.0;
  if (a >= 1.0) {
    auto f = [&](double y) {
      const double p = (a == 1.0) ? 1.0 : std::pow(y, a - 1.0);
      return p * std::pow(1.0 - y, b - 1.0);
    };
    return adaptive_simpson(f, 0.0, z, tol);
  }
  const double inv_a = 1.0 / a;
  auto g = [&](double u) {
    return std::pow(1.0 - std::pow(u, inv_a), b - 1.0);
  };
  return inv_a * adaptive_simpson(g, 0.0, std::pow(z, a), tol);
}

// ---------------------------------------------------------------------------
// Naive statistics.
// ---------------------------------------------------------------------------

inline double naive_mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Two-pass sample standard deviation, (n-1) denominator.
inline double naive_std(const std::vector<double>& v) {
  const double m = naive_mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

// Fractional ranks by sorting pairs, ties averaged. ascending=false gives
// rank 1 to the largest value.
inline std::vector<double> brute_ranks(const std::vector<double>& v,
                                       bool ascending = true) {
  const std::size_t n = v.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
    return ascending ? v[i] < v[j] : v[i] > v[j];
  });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  const double mx = naive_mean(x);
  const double my = naive_mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

inline double brute_spearman(const std::vector<double>& x,
                             const std::vector<double>& y) {
  return pearson(brute_ranks(x), brute_ranks(y));
}

// ---------------------------------------------------------------------------
// DET / EER by dense threshold sweep.
// ---------------------------------------------------------------------------

inline std::pair<double, double> rates_at(const std::vector<double>& genuine,
                                          const std::vector<double>& impostor,
                                          double t) {
  std::size_t fm = 0, fnm = 0;
  for (double s : impostor)
    if (s >= t) ++fm;
  for (double s : genuine)
    if (s < t) ++fnm;
  return {static_cast<double>(fm) / static_cast<double>(impostor.size()),
          static_cast<double>(fnm) / static_cast<double>(genuine.size())};
}

// EER by sweeping every observed score plus the midpoints between adjacent
// distinct scores, then interpolating linearly on the (fmr, fnmr) polyline
// across the sign change of fmr - fnmr.
inline double brute_eer(const std::vector<double>& genuine,
                        const std::vector<double>& impostor) {
  std::vector<double> grid;
  grid.reserve(2 * (genuine.size() + impostor.size()) + 2);
  for (double s : genuine) grid.push_back(s);
  for (double s : impostor) grid.push_back(s);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  std::vector<double> sweep;
  sweep.push_back(grid.front() - 1.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    sweep.push_back(grid[i]);
    if (i + 1 < grid.size()) sweep.push_back(0.5 * (grid[i] + grid[i + 1]));
  }
  sweep.push_back(grid.back() + 1.0);

  double prev_fmr = 1.0, prev_fnmr = 0.0, prev_d = 1.0;
  bool first = true;
  for (double t : sweep) {
    const auto [fmr, fnmr] = rates_at(genuine, impostor, t);
    const double d = fmr - fnmr;
    if (!first && prev_d >= 0.0 && d < 0.0) {
      const double s = prev_d / (prev_d - d);
      return prev_fmr + s * (fmr - prev_fmr);
    }
    if (d == 0.0) return fmr;
    prev_fmr = fmr;
    prev_fnmr = fnmr;
    prev_d = d;
    first = false;
  }
  (void)prev_fnmr;
  return prev_fmr;  // no crossing inside the sweep; boundary value
}

}  // namespace oracle
