#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fpq/types.hpp"

namespace fpq::eval {

// Decision rule: match iff score >= threshold (a score equal to the
// threshold counts as a false match for impostors).
std::pair<double, double> fmr_fnmr(std::span<const double> genuine,
                                   std::span<const double> impostor,
                                   double threshold);

struct DetPoint {
  double threshold = 0.0;
  double fmr = 0.0;
  double fnmr = 0.0;
};

struct DetCurve {
  std::vector<DetPoint> points;  // thresholds ascending, +-inf sentinels
  double eer = 0.0;
};

// One point per distinct observed score plus the two sentinels; the EER is
// linearly interpolated across the sign change of fmr - fnmr.
DetCurve det_curve(std::span<const double> genuine, std::span<const double> impostor);

// Per finger, the sample with the best (lowest) class; ties resolve to the
// lowest imprint index. classes[i] < 1 means unlabeled; a finger without
// any labeled imprint yields -1 (callers report it).
std::vector<int> select_best_imprints(const Roster& roster,
                                      const std::vector<int>& classes);

// Pools the genuine and impostor scores of the selected imprints under the
// evaluation matcher. Fingers with selection -1 are skipped; a selected
// sample without scores is a hard error.
DetCurve quality_selected_det(const Roster& roster, const MatcherData& eval_matcher,
                              const std::vector<int>& selection);

struct DeviationHistogram {
  // |predicted - true| in buckets {0, 1, 2, 3+}
  std::array<std::int64_t, 4> counts{};
  std::array<double, 4> fractions{};  // sums to 1 exactly (closed last bucket)
};

DeviationHistogram deviation_histogram(const std::vector<int>& predicted,
                                       const std::vector<int>& truth);

struct CorrelationTable {
  std::vector<std::string> matchers;
  Eigen::MatrixXd coefficients;  // symmetric, unit diagonal
};

// Pairwise Spearman correlation of per-matcher statistic vectors; the
// vectors must be aligned over the same samples.
CorrelationTable correlation_table(const std::vector<std::string>& names,
                                   const std::vector<std::vector<double>>& statistics);

}  // namespace fpq::eval
