#include "fpq/classify_fuse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "fpq/error.hpp"
#include "fpq/robust_stats.hpp"

namespace fpq::classify {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void validate_fractions(const std::vector<double>& fractions) {
  if (fractions.size() < 2)
    throw std::invalid_argument("class scheme: need at least 2 classes");
  double sum = 0.0;
  for (double f : fractions) {
    if (!(f > 0.0)) throw std::invalid_argument("class scheme: fractions must be positive");
    sum += f;
  }
  if (std::fabs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("class scheme: fractions must sum to 1");
}

}  // namespace

ClassScheme ClassScheme::uniform(int classes) {
  if (classes < 2) throw std::invalid_argument("class scheme: need at least 2 classes");
  ClassScheme s;
  s.name = "uniform" + std::to_string(classes);
  s.fractions.assign(classes, 1.0 / classes);
  return s;
}

ClassScheme ClassScheme::nfiq_like() {
  ClassScheme s;
  s.name = "nfiq5";
  s.fractions = {0.46, 0.22, 0.16, 0.10, 0.06};
  return s;
}

ClassScheme ClassScheme::custom(std::vector<double> fractions) {
  validate_fractions(fractions);
  ClassScheme s;
  s.name = "custom" + std::to_string(fractions.size());
  s.fractions = std::move(fractions);
  return s;
}

ClassScheme ClassScheme::by_name(const std::string& name) {
  if (name == "uniform10") return uniform(10);
  if (name == "uniform5") return uniform(5);
  if (name == "nfiq5") return nfiq_like();
  throw std::invalid_argument("unknown class scheme: " + name);
}

FusedRanking fuse_ranks(const std::vector<pipeline::MatcherRanking>& rankings) {
  if (rankings.empty()) throw std::invalid_argument("fuse_ranks: no matchers");
  const std::size_t n = rankings.front().final_rank.size();
  for (const auto& r : rankings)
    if (r.final_rank.size() != n)
      throw std::invalid_argument("fuse_ranks: matcher rankings cover different rosters");

  FusedRanking out;
  out.fused_rank.assign(n, kNaN);

  std::vector<double> mean_rank;
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    bool ok = true;
    for (const auto& r : rankings) {
      if (std::isnan(r.final_rank[i])) {
        ok = false;
        break;
      }
      sum += r.final_rank[i];
    }
    if (!ok) {
      out.dropped.push_back(static_cast<int>(i));
      continue;
    }
    out.kept.push_back(static_cast<int>(i));
    mean_rank.push_back(sum / static_cast<double>(rankings.size()));
  }
  if (out.kept.empty()) throw DataError("fuse_ranks: no sample is rankable under every matcher");

  const std::vector<double> reranked = stats::average_ranks(mean_rank, /*ascending=*/true);
  for (std::size_t k = 0; k < out.kept.size(); ++k)
    out.fused_rank[out.kept[k]] = reranked[k];
  return out;
}

std::vector<QualityLabel> bin_classes(const FusedRanking& fused,
                                      const ClassScheme& scheme) {
  validate_fractions(scheme.fractions);
  const int n = static_cast<int>(fused.kept.size());
  const int k = scheme.class_count();
  if (n < k) throw std::invalid_argument("bin_classes: fewer samples than classes");

  // rank thresholds: class c covers ranks (t_{c-1}, t_c]; the epsilon keeps
  // accumulated fraction rounding from pulling an exact boundary down
  std::vector<double> thresholds(k);
  double cum = 0.0;
  for (int c = 0; c < k; ++c) {
    cum += scheme.fractions[c];
    thresholds[c] = std::floor(static_cast<double>(n) * cum + 1e-9);
  }
  thresholds[k - 1] = static_cast<double>(n);

  std::vector<QualityLabel> out;
  out.reserve(n);
  for (int idx : fused.kept) {
    const double rank = fused.fused_rank[idx];
    int cls = k;
    for (int c = 0; c < k; ++c) {
      if (rank <= thresholds[c]) {
        cls = c + 1;
        break;
      }
    }
    out.push_back({idx, rank, cls});
  }
  return out;
}

}  // namespace fpq::classify
