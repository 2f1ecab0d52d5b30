#include "fpq/robust_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace fpq::stats {
namespace {

// Continued fraction for the regularized incomplete beta, modified Lentz.
// Converges quickly for z < (a+1)/(a+b+2); the caller flips to the
// complementary form otherwise.
double beta_continued_fraction(double z, double a, double b) {
  constexpr int kMaxIter = 500;
  const double eps = std::numeric_limits<double>::epsilon();
  const double fpmin = std::numeric_limits<double>::min() / eps;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;

  double c = 1.0;
  double d = 1.0 - qab * z / qap;
  if (std::fabs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;

  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * z / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;

    aa = -(a + m) * (qab + m) * z / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) <= eps) return h;
  }
  throw std::runtime_error("regularized_incomplete_beta: continued fraction "
                           "did not converge (a=" + std::to_string(a) +
                           ", b=" + std::to_string(b) + ")");
}

}  // namespace

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double regularized_incomplete_beta(double z, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::invalid_argument("regularized_incomplete_beta: a and b must be > 0");
  if (!(z >= 0.0) || !(z <= 1.0))
    throw std::invalid_argument("regularized_incomplete_beta: z outside [0,1]");
  if (z == 0.0) return 0.0;
  if (z == 1.0) return 1.0;

  const double log_bt =
      a * std::log(z) + b * std::log1p(-z) - log_beta(a, b);
  const double bt = std::exp(log_bt);
  if (z < (a + 1.0) / (a + b + 2.0)) {
    return bt * beta_continued_fraction(z, a, b) / a;
  }
  return 1.0 - bt * beta_continued_fraction(1.0 - z, b, a) / b;
}

double incomplete_beta(double z, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::invalid_argument("incomplete_beta: a and b must be > 0");
  if (z < 0.0 || z > 1.0)
    throw std::invalid_argument("incomplete_beta: z outside [0,1]");
  return regularized_incomplete_beta(z, a, b) * std::exp(log_beta(a, b));
}

HdWeights hd_weights(int n, double alpha) {
  if (n < 1) throw std::invalid_argument("hd_weights: n must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("hd_weights: alpha must lie in (0,1)");

  const double a = (n + 1) * alpha;
  const double b = (n + 1) * (1.0 - alpha);

  HdWeights out;
  out.n = n;
  out.alpha = alpha;
  out.weights.resize(n);

  // Evaluate the regularized CDF on the grid once; the weights are the
  // successive differences, so they telescope to exactly 1.
  double prev = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double cur =
        (i == n) ? 1.0
                 : regularized_incomplete_beta(static_cast<double>(i) / n, a, b);
    out.weights[i - 1] = cur - prev;
    prev = cur;
  }
  return out;
}

double hd_quantile(std::span<const double> samples, double alpha) {
  if (samples.empty())
    throw std::invalid_argument("hd_quantile: empty sample");
  const int n = static_cast<int>(samples.size());
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());

  const HdWeights w = hd_weights(n, alpha);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += w.weights[i] * sorted[i];
  // The weighted sum is a convex combination; clamp away rounding spill.
  return std::clamp(acc, sorted.front(), sorted.back());
}

double hd_median(std::span<const double> samples) {
  return hd_quantile(samples, 0.5);
}

double mean(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("mean: empty sample");
  return std::accumulate(samples.begin(), samples.end(), 0.0) /
         static_cast<double>(samples.size());
}

Moments mean_std(std::span<const double> samples) {
  if (samples.size() < 2)
    throw std::invalid_argument("mean_std: need at least 2 samples");
  double m = 0.0;
  double m2 = 0.0;
  std::size_t k = 0;
  for (const double x : samples) {
    ++k;
    const double d = x - m;
    m += d / static_cast<double>(k);
    m2 += d * (x - m);
  }
  const double var = m2 / static_cast<double>(samples.size() - 1);
  return {m, std::sqrt(std::max(0.0, var))};
}

std::vector<double> average_ranks(std::span<const double> values,
                                  bool ascending) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (values[i] != values[j])
      return ascending ? values[i] < values[j] : values[i] > values[j];
    return i < j;
  });

  std::vector<double> ranks(n);
  std::size_t pos = 0;
  while (pos < n) {
    std::size_t end = pos;
    while (end + 1 < n && values[order[end + 1]] == values[order[pos]]) ++end;
    // positions pos..end (0-based) share the value; average the 1-based ranks
    const double r = 0.5 * (static_cast<double>(pos) + static_cast<double>(end)) + 1.0;
    for (std::size_t k = pos; k <= end; ++k) ranks[order[k]] = r;
    pos = end + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw std::invalid_argument("spearman: length mismatch");
  if (x.size() < 2)
    throw std::invalid_argument("spearman: need at least 2 observations");

  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  const std::size_t n = rx.size();

  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = rx[i] - mx;
    const double dy = ry[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw std::invalid_argument("spearman: correlation undefined for constant input");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace fpq::stats
