#pragma once

#include <string>
#include <vector>

#include "fpq/score_pipeline.hpp"
#include "fpq/types.hpp"

namespace fpq::classify {

// Fraction of samples per class, class 1 (best quality) first.
struct ClassScheme {
  std::string name;
  std::vector<double> fractions;

  int class_count() const { return static_cast<int>(fractions.size()); }

  static ClassScheme uniform(int classes);
  // Skewed 5-class split in the spirit of the historic quality measure
  // (class 1 holds just under half the samples). Non-normative default.
  static ClassScheme nfiq_like();
  static ClassScheme custom(std::vector<double> fractions);
  // "uniform10" | "uniform5" | "nfiq5"
  static ClassScheme by_name(const std::string& name);
};

struct FusedRanking {
  // Per sample; NaN where the sample was dropped.
  std::vector<double> fused_rank;  // 1 = best, average ranks on ties
  std::vector<int> kept;           // dense indices, ascending
  std::vector<int> dropped;        // unrankable under at least one matcher
};

// Mean of the per-matcher final ranks, re-ranked 1..N. Samples missing a
// rank under any matcher are dropped and reported.
FusedRanking fuse_ranks(const std::vector<pipeline::MatcherRanking>& rankings);

struct QualityLabel {
  int sample = -1;
  double fused_rank = 0.0;
  int class_label = 0;  // 1-based, 1 = best
};

// Cumulative fraction boundaries converted to rank thresholds via
// floor(N * cumulative); rank ties on a boundary go to the better class.
std::vector<QualityLabel> bin_classes(const FusedRanking& fused,
                                      const ClassScheme& scheme);

}  // namespace fpq::classify
