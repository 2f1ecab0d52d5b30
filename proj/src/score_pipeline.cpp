#include "fpq/score_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "fpq/error.hpp"
#include "fpq/robust_stats.hpp"

namespace fpq::pipeline {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Scores against the given peer imprints, in genuine-entry order.
std::vector<double> scores_for_peers(const ScoreSet& set,
                                     const std::vector<int>& peers) {
  std::vector<double> out;
  out.reserve(peers.size());
  for (const GenuineScore& g : set.genuine) {
    if (std::find(peers.begin(), peers.end(), g.peer_imprint) != peers.end())
      out.push_back(g.score);
  }
  return out;
}

std::vector<double> all_genuine_scores(const ScoreSet& set) {
  std::vector<double> out;
  out.reserve(set.genuine.size());
  for (const GenuineScore& g : set.genuine) out.push_back(g.score);
  return out;
}

}  // namespace

const char* to_string(NmsVariant v) {
  switch (v) {
    case NmsVariant::O1: return "o1";
    case NmsVariant::O3: return "o3";
    case NmsVariant::O2Sum: return "o2sum";
    case NmsVariant::O2Rss: return "o2rss";
  }
  return "?";
}

ImpostorMoments impostor_moments(const ScoreSet& scores) {
  if (scores.impostor.size() < 2)
    throw std::invalid_argument("impostor_moments: need at least 2 impostor scores");
  const auto [min_it, max_it] =
      std::minmax_element(scores.impostor.begin(), scores.impostor.end());
  ImpostorMoments out;
  if (*min_it == *max_it) {
    out.mu = *min_it;
    out.sigma = 0.0;
    out.degenerate = true;
    return out;
  }
  const stats::Moments m = stats::mean_std(scores.impostor);
  out.mu = m.mean;
  out.sigma = m.stddev;
  out.degenerate = false;
  return out;
}

PreliminaryRanking preliminary_rank(const Roster& roster, const MatcherData& data) {
  const int n = roster.size();
  if (static_cast<int>(data.sets.size()) != n)
    throw std::invalid_argument("preliminary_rank: score sets do not cover the roster");

  PreliminaryRanking out;
  out.nms.assign(n, kNaN);
  out.rank.assign(n, kNaN);
  out.moments.resize(n);

  std::vector<int> ranked;
  std::vector<double> ranked_nms;
  ranked.reserve(n);
  for (int i = 0; i < n; ++i) {
    const ScoreSet& set = data.sets[i];
    if (set.genuine.empty())
      throw std::invalid_argument("preliminary_rank: sample without genuine scores");
    out.moments[i] = impostor_moments(set);
    if (out.moments[i].degenerate) {
      out.degenerate.push_back(i);
      continue;
    }
    const double genuine_mean = stats::mean(all_genuine_scores(set));
    out.nms[i] = (genuine_mean - out.moments[i].mu) / out.moments[i].sigma;
    ranked.push_back(i);
    ranked_nms.push_back(out.nms[i]);
  }

  const std::vector<double> ranks = stats::average_ranks(ranked_nms, /*ascending=*/false);
  for (std::size_t k = 0; k < ranked.size(); ++k) out.rank[ranked[k]] = ranks[k];
  out.ranked_count = static_cast<int>(ranked.size());
  return out;
}

int default_window(int ranked_count) {
  return (ranked_count + 5) / 6;
}

std::vector<std::vector<int>> select_significant(const Roster& roster,
                                                 const PreliminaryRanking& prelim,
                                                 int window) {
  if (window < 1) throw std::invalid_argument("select_significant: window must be >= 1");
  const int n = roster.size();
  std::vector<std::vector<int>> out(n);
  for (int i = 0; i < n; ++i) {
    if (std::isnan(prelim.rank[i])) continue;
    const double limit = prelim.rank[i] + window;
    for (int j : roster.finger(roster.finger_of(i))) {
      if (j == i || std::isnan(prelim.rank[j])) continue;
      if (prelim.rank[j] <= limit) out[i].push_back(roster.sample(j).imprint);
    }
    std::sort(out[i].begin(), out[i].end());
  }
  return out;
}

std::optional<double> normalized_match_score(std::span<const double> significant,
                                             const ImpostorMoments& moments,
                                             NmsVariant variant) {
  if (moments.degenerate) return std::nullopt;
  switch (variant) {
    case NmsVariant::O1:
      if (significant.empty()) return std::nullopt;
      return (stats::hd_median(significant) - moments.mu) / moments.sigma;
    case NmsVariant::O3:
      if (significant.empty()) return std::nullopt;
      return (stats::hd_quantile(significant, kLowQuantileAlpha) - moments.mu) /
             moments.sigma;
    case NmsVariant::O2Sum: {
      if (significant.size() < 2) return std::nullopt;
      const double sigma_m = stats::mean_std(significant).stddev;
      return (stats::hd_median(significant) - moments.mu) / (moments.sigma + sigma_m);
    }
    case NmsVariant::O2Rss: {
      if (significant.size() < 2) return std::nullopt;
      const double sigma_m = stats::mean_std(significant).stddev;
      return (stats::hd_median(significant) - moments.mu) /
             std::sqrt(moments.sigma * moments.sigma + sigma_m * sigma_m);
    }
  }
  return std::nullopt;
}

MatcherRanking per_matcher_quality_rank(const Roster& roster,
                                        const MatcherData& data,
                                        const RankOptions& options) {
  const int n = roster.size();
  const PreliminaryRanking prelim = preliminary_rank(roster, data);
  const int window = options.window.value_or(default_window(prelim.ranked_count));

  MatcherRanking out;
  out.matcher = data.matcher;
  out.nms.assign(n, kNaN);
  out.variant.assign(n, NmsVariant::O1);
  out.prelim_rank = prelim.rank;
  out.final_rank.assign(n, kNaN);
  out.significant = select_significant(roster, prelim, window);
  out.degenerate = prelim.degenerate;
  out.ranked_count = prelim.ranked_count;

  std::vector<int> quantile_pop;  // ranked by O3 among themselves
  std::vector<int> median_pop;    // ranked by O1 among themselves
  for (int i = 0; i < n; ++i) {
    if (std::isnan(prelim.rank[i])) continue;
    const ScoreSet& set = data.sets[i];
    std::vector<double> sig = scores_for_peers(set, out.significant[i]);
    if (static_cast<int>(sig.size()) >= kQuantileMinScores) {
      out.variant[i] = NmsVariant::O3;
      out.nms[i] = *normalized_match_score(sig, prelim.moments[i], NmsVariant::O3);
      quantile_pop.push_back(i);
    } else {
      // Fewer than 4 comparable-quality peers: fall back to the median
      // variant; with no significant peers at all, over every genuine score.
      if (sig.empty()) sig = all_genuine_scores(set);
      out.variant[i] = NmsVariant::O1;
      out.nms[i] = *normalized_match_score(sig, prelim.moments[i], NmsVariant::O1);
      median_pop.push_back(i);
    }
  }

  if (options.merge == MergePolicy::Preliminary) {
    out.final_rank = prelim.rank;
    return out;
  }

  // Order each population by its own score; ties fall back to preliminary
  // rank, then to canonical sample order.
  const auto by_score = [&](int a, int b) {
    if (out.nms[a] != out.nms[b]) return out.nms[a] > out.nms[b];
    if (prelim.rank[a] != prelim.rank[b]) return prelim.rank[a] < prelim.rank[b];
    return a < b;
  };
  std::sort(quantile_pop.begin(), quantile_pop.end(), by_score);
  std::sort(median_pop.begin(), median_pop.end(), by_score);

  // Interleave the two orderings; the preliminary rank is the only scale the
  // two populations share.
  const auto before = [&](int a, int b) {
    if (prelim.rank[a] != prelim.rank[b]) return prelim.rank[a] < prelim.rank[b];
    return a < b;
  };
  std::vector<int> merged;
  merged.reserve(quantile_pop.size() + median_pop.size());
  std::size_t qa = 0, qb = 0;
  while (qa < quantile_pop.size() && qb < median_pop.size()) {
    if (before(quantile_pop[qa], median_pop[qb])) merged.push_back(quantile_pop[qa++]);
    else merged.push_back(median_pop[qb++]);
  }
  for (; qa < quantile_pop.size(); ++qa) merged.push_back(quantile_pop[qa]);
  for (; qb < median_pop.size(); ++qb) merged.push_back(median_pop[qb]);

  std::vector<double> position(n, kNaN);
  for (std::size_t p = 0; p < merged.size(); ++p)
    position[merged[p]] = static_cast<double>(p + 1);

  // Samples of one population with an identical score are indistinguishable;
  // they share the average of their merged positions.
  const auto average_tied = [&](const std::vector<int>& pop) {
    std::size_t i = 0;
    while (i < pop.size()) {
      std::size_t j = i;
      while (j + 1 < pop.size() && out.nms[pop[j + 1]] == out.nms[pop[i]]) ++j;
      double sum = 0.0;
      for (std::size_t k = i; k <= j; ++k) sum += position[pop[k]];
      const double avg = sum / static_cast<double>(j - i + 1);
      for (std::size_t k = i; k <= j; ++k) out.final_rank[pop[k]] = avg;
      i = j + 1;
    }
  };
  average_tied(quantile_pop);
  average_tied(median_pop);
  return out;
}

}  // namespace fpq::pipeline
