#include "fpq/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fpq/error.hpp"
#include "fpq/robust_stats.hpp"

namespace fpq::eval {

std::pair<double, double> fmr_fnmr(std::span<const double> genuine,
                                   std::span<const double> impostor,
                                   double threshold) {
  if (genuine.empty() || impostor.empty())
    throw std::invalid_argument("fmr_fnmr: empty score set");
  std::size_t false_matches = 0;
  for (double s : impostor)
    if (s >= threshold) ++false_matches;
  std::size_t false_non_matches = 0;
  for (double s : genuine)
    if (s < threshold) ++false_non_matches;
  return {static_cast<double>(false_matches) / impostor.size(),
          static_cast<double>(false_non_matches) / genuine.size()};
}

DetCurve det_curve(std::span<const double> genuine, std::span<const double> impostor) {
  if (genuine.empty() || impostor.empty())
    throw std::invalid_argument("det_curve: empty score set");

  std::vector<double> gen(genuine.begin(), genuine.end());
  std::vector<double> imp(impostor.begin(), impostor.end());
  std::sort(gen.begin(), gen.end());
  std::sort(imp.begin(), imp.end());

  std::vector<double> thresholds;
  thresholds.reserve(gen.size() + imp.size() + 2);
  thresholds.push_back(-std::numeric_limits<double>::infinity());
  std::merge(gen.begin(), gen.end(), imp.begin(), imp.end(),
             std::back_inserter(thresholds));
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());
  thresholds.push_back(std::numeric_limits<double>::infinity());

  DetCurve curve;
  curve.points.reserve(thresholds.size());
  const double ng = static_cast<double>(gen.size());
  const double ni = static_cast<double>(imp.size());
  for (double t : thresholds) {
    // counts via the sorted vectors: impostors >= t, genuines < t
    const auto imp_ge = imp.end() - std::lower_bound(imp.begin(), imp.end(), t);
    const auto gen_lt = std::lower_bound(gen.begin(), gen.end(), t) - gen.begin();
    curve.points.push_back({t, static_cast<double>(imp_ge) / ni,
                            static_cast<double>(gen_lt) / ng});
  }

  // fmr - fnmr runs from 1 at -inf to -1 at +inf; interpolate the crossing
  curve.eer = 0.0;
  for (std::size_t k = 0; k + 1 < curve.points.size(); ++k) {
    const double d0 = curve.points[k].fmr - curve.points[k].fnmr;
    const double d1 = curve.points[k + 1].fmr - curve.points[k + 1].fnmr;
    if (d0 == 0.0) {
      curve.eer = curve.points[k].fmr;
      break;
    }
    if (d0 > 0.0 && d1 < 0.0) {
      const double s = d0 / (d0 - d1);
      curve.eer = curve.points[k].fmr +
                  s * (curve.points[k + 1].fmr - curve.points[k].fmr);
      break;
    }
    if (k + 2 == curve.points.size() && d1 == 0.0) curve.eer = curve.points[k + 1].fmr;
  }
  return curve;
}

std::vector<int> select_best_imprints(const Roster& roster,
                                      const std::vector<int>& classes) {
  if (static_cast<int>(classes.size()) != roster.size())
    throw std::invalid_argument("select_best_imprints: class vector does not cover roster");
  std::vector<int> selection(roster.finger_count(), -1);
  for (int f = 0; f < roster.finger_count(); ++f) {
    int best = -1;
    for (int i : roster.finger(f)) {
      if (classes[i] < 1) continue;
      if (best == -1 || classes[i] < classes[best] ||
          (classes[i] == classes[best] &&
           roster.sample(i).imprint < roster.sample(best).imprint)) {
        best = i;
      }
    }
    selection[f] = best;
  }
  return selection;
}

DetCurve quality_selected_det(const Roster& roster, const MatcherData& eval_matcher,
                              const std::vector<int>& selection) {
  if (static_cast<int>(selection.size()) != roster.finger_count())
    throw std::invalid_argument("quality_selected_det: selection does not cover fingers");
  if (static_cast<int>(eval_matcher.sets.size()) != roster.size())
    throw std::invalid_argument("quality_selected_det: matcher does not cover roster");

  std::vector<double> genuine, impostor;
  std::string missing;
  for (int sel : selection) {
    if (sel < 0) continue;  // finger skipped upstream
    const ScoreSet& set = eval_matcher.sets[sel];
    if (set.genuine.empty() || set.impostor.empty()) {
      missing += (missing.empty() ? "" : ", ") + to_string(roster.sample(sel));
      continue;
    }
    for (const GenuineScore& g : set.genuine) genuine.push_back(g.score);
    impostor.insert(impostor.end(), set.impostor.begin(), set.impostor.end());
  }
  if (!missing.empty())
    throw DataError("quality_selected_det: no scores for selected samples: " + missing);
  return det_curve(genuine, impostor);
}

DeviationHistogram deviation_histogram(const std::vector<int>& predicted,
                                       const std::vector<int>& truth) {
  if (predicted.size() != truth.size())
    throw std::invalid_argument("deviation_histogram: length mismatch");
  if (predicted.empty())
    throw std::invalid_argument("deviation_histogram: empty input");
  DeviationHistogram h;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const int d = std::abs(predicted[i] - truth[i]);
    h.counts[std::min(d, 3)]++;
  }
  const double n = static_cast<double>(predicted.size());
  for (int b = 0; b < 3; ++b) h.fractions[b] = h.counts[b] / n;
  h.fractions[3] = 1.0 - h.fractions[0] - h.fractions[1] - h.fractions[2];
  return h;
}

CorrelationTable correlation_table(const std::vector<std::string>& names,
                                   const std::vector<std::vector<double>>& statistics) {
  if (names.size() != statistics.size())
    throw std::invalid_argument("correlation_table: name/statistic count mismatch");
  if (names.size() < 2)
    throw std::invalid_argument("correlation_table: need at least 2 matchers");
  const int m = static_cast<int>(names.size());
  for (const auto& v : statistics)
    if (v.size() != statistics.front().size())
      throw std::invalid_argument("correlation_table: statistic vectors not aligned");

  CorrelationTable table;
  table.matchers = names;
  table.coefficients = Eigen::MatrixXd::Identity(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      const double rho = stats::spearman(statistics[i], statistics[j]);
      table.coefficients(i, j) = rho;
      table.coefficients(j, i) = rho;
    }
  return table;
}

}  // namespace fpq::eval
