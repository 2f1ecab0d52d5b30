#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

namespace fpq::stats {

// log of the complete beta function B(a, b).
double log_beta(double a, double b);

// Regularized incomplete beta I_z(a, b) in [0, 1], continued-fraction
// evaluation (modified Lentz), accurate to ~1e-14.
double regularized_incomplete_beta(double z, double a, double b);

// Non-regularized incomplete beta integral over [0, z] of
// y^(a-1) (1-y)^(b-1) dy, for z in [0, 1], a > 0, b > 0.
double incomplete_beta(double z, double a, double b);

// Harrell-Davis weights: beta(  (n+1)a, (n+1)(1-a) ) probability mass over
// the n order-statistic cells [ (i-1)/n, i/n ].
struct HdWeights {
  int n = 0;
  double alpha = 0.0;
  Eigen::VectorXd weights;  // size n, non-negative, sums to 1
};

HdWeights hd_weights(int n, double alpha);

// Harrell-Davis quantile estimate: weighted sum of the order statistics.
// Sorts a copy of the input; result lies in [min, max] of the samples.
double hd_quantile(std::span<const double> samples, double alpha);

// hd_quantile at alpha = 0.5. Serves as the robust location estimate.
double hd_median(std::span<const double> samples);

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, (n-1) denominator
};

// Arithmetic mean and sample standard deviation (Welford recurrence).
// Requires >= 2 samples.
Moments mean_std(std::span<const double> samples);

double mean(std::span<const double> samples);

// 1-based fractional ranks, ties receive the average of their positions.
// ascending=true ranks the smallest value 1; ascending=false the largest.
std::vector<double> average_ranks(std::span<const double> values,
                                  bool ascending = true);

// Spearman rank correlation with average-rank tie handling. Throws on
// length mismatch, fewer than two elements, or a constant input (the
// correlation is undefined there).
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace fpq::stats
