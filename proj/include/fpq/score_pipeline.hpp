#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fpq/types.hpp"

namespace fpq::pipeline {

// Quantile used for the dispersion-aware match score.
inline constexpr double kLowQuantileAlpha = 0.15;
// Minimum number of significant genuine scores for the quantile variant.
inline constexpr int kQuantileMinScores = 4;

struct ImpostorMoments {
  double mu = 0.0;
  double sigma = 0.0;
  bool degenerate = false;  // constant impostor scores; sample unrankable
};

// Mean and sample std of the impostor scores. A constant impostor vector
// marks the sample degenerate (sigma set to 0).
ImpostorMoments impostor_moments(const ScoreSet& scores);

struct PreliminaryRanking {
  // Per sample; NaN where degenerate.
  std::vector<double> nms;
  std::vector<double> rank;  // 1 = best, ties get average ranks
  std::vector<ImpostorMoments> moments;
  std::vector<int> degenerate;  // dense indices, ascending
  int ranked_count = 0;
};

// Phase 1: preliminary normalized match score from the mean over ALL
// genuine scores, ranked over every sample of the matcher.
PreliminaryRanking preliminary_rank(const Roster& roster, const MatcherData& data);

// Rank-window default: one sixth of the ranked population, rounded up.
int default_window(int ranked_count);

// Phase 2: per sample, the peer imprints whose preliminary rank is at most
// `window` positions below the sample's own rank. Degenerate peers are
// never significant; empty sets are legal.
std::vector<std::vector<int>> select_significant(const Roster& roster,
                                                 const PreliminaryRanking& prelim,
                                                 int window);

enum class NmsVariant { O1, O3, O2Sum, O2Rss };

const char* to_string(NmsVariant v);

// Normalized match score over the given significant genuine scores.
//   O1     : (hd_median - mu_n) / sigma_n
//   O3     : (hd_quantile(0.15) - mu_n) / sigma_n
//   O2Sum  : (hd_median - mu_n) / (sigma_n + sigma_m)
//   O2Rss  : (hd_median - mu_n) / sqrt(sigma_n^2 + sigma_m^2)
// Returns nullopt when the variant needs more scores than provided or the
// sample is degenerate.
std::optional<double> normalized_match_score(std::span<const double> significant,
                                             const ImpostorMoments& moments,
                                             NmsVariant variant);

enum class MergePolicy {
  // Quantile-ranked and median-ranked subpopulations are each ordered by
  // their own score and interleaved by preliminary rank.
  Interleave,
  // Final rank is the preliminary rank (single joint ranking).
  Preliminary,
};

struct RankOptions {
  std::optional<int> window;  // default: ceil(ranked/6)
  MergePolicy merge = MergePolicy::Interleave;
};

struct MatcherRanking {
  std::string matcher;
  // Per sample; NaN where degenerate.
  std::vector<double> nms;
  std::vector<NmsVariant> variant;
  std::vector<double> prelim_rank;
  std::vector<double> final_rank;  // 1 = best
  std::vector<std::vector<int>> significant;  // peer imprints per sample
  std::vector<int> degenerate;
  int ranked_count = 0;
};

// Phases 1-3 for one matcher: preliminary ranking, significant-score
// selection, per-variant scores and the merged final rank.
MatcherRanking per_matcher_quality_rank(const Roster& roster,
                                        const MatcherData& data,
                                        const RankOptions& options = {});

}  // namespace fpq::pipeline
