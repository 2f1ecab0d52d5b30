#include "fpq/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "fpq/error.hpp"
#include "fpq/rng.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace fpq;

TEST_CASE("fmr_fnmr hand cases") {
  const std::vector<double> genuine{5.0, 7.0};
  const std::vector<double> impostor{1.0, 6.0};

  auto [fmr_lo, fnmr_lo] = eval::fmr_fnmr(genuine, impostor, 0.0);
  CHECK(fmr_lo == doctest::Approx(1.0));
  CHECK(fnmr_lo == doctest::Approx(0.0));

  auto [fmr_hi, fnmr_hi] = eval::fmr_fnmr(genuine, impostor, 100.0);
  CHECK(fmr_hi == doctest::Approx(0.0));
  CHECK(fnmr_hi == doctest::Approx(1.0));

  auto [fmr, fnmr] = eval::fmr_fnmr(genuine, impostor, 6.0);
  CHECK(fmr == doctest::Approx(0.5));   // impostor 6 >= 6 counts as match
  CHECK(fnmr == doctest::Approx(0.5));  // genuine 5 < 6 rejected
}

TEST_CASE("det_curve on perfectly separated sets") {
  const std::vector<double> genuine{10.0, 11.0, 12.0};
  const std::vector<double> impostor{1.0, 2.0, 3.0};
  const auto curve = eval::det_curve(genuine, impostor);
  CHECK(curve.eer == doctest::Approx(0.0));
  CHECK(curve.points.front().fmr == doctest::Approx(1.0));
  CHECK(curve.points.back().fnmr == doctest::Approx(1.0));
}

TEST_CASE("det_curve on identical multisets lands near 0.5") {
  std::vector<double> scores;
  Rng rng(88);
  for (int i = 0; i < 200; ++i) scores.push_back(rng.uniform(0.0, 1.0));
  const auto curve = eval::det_curve(scores, scores);
  CHECK(std::fabs(curve.eer - 0.5) <= 1.0 / 200.0);
}

TEST_CASE("det_curve EER matches the dense-sweep oracle on overlapping normals") {
  Rng rng(89);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> genuine(300), impostor(500);
    for (double& s : genuine) s = 5.0 + 2.0 * rng.normal();
    for (double& s : impostor) s = 2.0 + 1.5 * rng.normal();
    const auto curve = eval::det_curve(genuine, impostor);
    CHECK(curve.eer == doctest::Approx(oracle::brute_eer(genuine, impostor)).epsilon(1e-9));
  }
}

TEST_CASE("det_curve satisfies the monotonicity invariants") {
  Rng rng(90);
  std::vector<double> genuine(80), impostor(120);
  for (double& s : genuine) s = 4.0 + rng.normal();
  for (double& s : impostor) s = 2.0 + rng.normal();
  const auto curve = eval::det_curve(genuine, impostor);
  for (std::size_t k = 1; k < curve.points.size(); ++k) {
    CHECK(curve.points[k].threshold > curve.points[k - 1].threshold);
    CHECK(curve.points[k].fmr <= curve.points[k - 1].fmr);
    CHECK(curve.points[k].fnmr >= curve.points[k - 1].fnmr);
  }
  // eer lies inside the sign-change bracket
  bool bracketed = false;
  for (std::size_t k = 0; k + 1 < curve.points.size(); ++k) {
    const double d0 = curve.points[k].fmr - curve.points[k].fnmr;
    const double d1 = curve.points[k + 1].fmr - curve.points[k + 1].fnmr;
    if (d0 >= 0.0 && d1 < 0.0) {
      const double lo = std::min({curve.points[k].fmr, curve.points[k + 1].fmr,
                                  curve.points[k].fnmr, curve.points[k + 1].fnmr});
      const double hi = std::max({curve.points[k].fmr, curve.points[k + 1].fmr,
                                  curve.points[k].fnmr, curve.points[k + 1].fnmr});
      CHECK(curve.eer >= lo);
      CHECK(curve.eer <= hi);
      bracketed = true;
      break;
    }
  }
  CHECK(bracketed);
}

TEST_CASE("EER is invariant under strictly increasing score transforms") {
  Rng rng(91);
  std::vector<double> genuine(100), impostor(150);
  for (double& s : genuine) s = 3.0 + rng.normal();
  for (double& s : impostor) s = 1.0 + rng.normal();
  const double base = eval::det_curve(genuine, impostor).eer;

  auto warp = [](double s) { return std::exp(0.3 * s) + s * s * s * 0.01; };
  std::vector<double> wg = genuine, wi = impostor;
  for (double& s : wg) s = warp(s);
  for (double& s : wi) s = warp(s);
  CHECK(eval::det_curve(wg, wi).eer == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("select_best_imprints basics") {
  Roster roster = testsup::make_roster(1, 3);
  // classes by imprint: imprint0=3, imprint1=1, imprint2=2
  std::vector<int> classes{3, 1, 2};
  auto sel = eval::select_best_imprints(roster, classes);
  REQUIRE(sel.size() == 1);
  CHECK(roster.sample(sel[0]).imprint == 1);

  classes = {2, 2, 2};
  sel = eval::select_best_imprints(roster, classes);
  CHECK(roster.sample(sel[0]).imprint == 0);

  classes = {0, 0, 0};  // nothing labeled
  sel = eval::select_best_imprints(roster, classes);
  CHECK(sel[0] == -1);
}

TEST_CASE("select_best_imprints matches a brute-force oracle") {
  Rng rng(92);
  Roster roster = testsup::make_roster(100, 9);
  std::vector<int> classes(roster.size());
  for (int& c : classes) c = 1 + static_cast<int>(rng.uniform_index(5));

  const auto sel = eval::select_best_imprints(roster, classes);
  for (int f = 0; f < roster.finger_count(); ++f) {
    int want = -1;
    for (int i : roster.finger(f)) {
      if (want == -1) { want = i; continue; }
      const bool better = classes[i] < classes[want] ||
                          (classes[i] == classes[want] &&
                           roster.sample(i).imprint < roster.sample(want).imprint);
      if (better) want = i;
    }
    CHECK(sel[f] == want);
  }
}

TEST_CASE("quality_selected_det pools the selected imprints") {
  Rng rng(93);
  Roster roster = testsup::make_roster(5, 9);
  MatcherData md = testsup::random_matcher(roster, rng);

  std::vector<int> selection(roster.finger_count());
  for (int f = 0; f < roster.finger_count(); ++f)
    selection[f] = roster.finger(f)[static_cast<int>(rng.uniform_index(9))];

  const auto curve = eval::quality_selected_det(roster, md, selection);

  std::vector<double> genuine, impostor;
  for (int sel : selection) {
    for (const auto& g : md.sets[sel].genuine) genuine.push_back(g.score);
    for (double s : md.sets[sel].impostor) impostor.push_back(s);
  }
  const auto want = eval::det_curve(genuine, impostor);
  CHECK(curve.eer == want.eer);
  REQUIRE(curve.points.size() == want.points.size());

  // determinism
  const auto again = eval::quality_selected_det(roster, md, selection);
  CHECK(again.eer == curve.eer);
}

TEST_CASE("quality_selected_det rejects selections without scores") {
  Rng rng(94);
  Roster roster = testsup::make_roster(3, 9);
  MatcherData md = testsup::random_matcher(roster, rng);
  md.sets[roster.finger(1)[0]].genuine.clear();
  std::vector<int> selection{roster.finger(0)[0], roster.finger(1)[0],
                             roster.finger(2)[0]};
  CHECK_THROWS_AS(eval::quality_selected_det(roster, md, selection), DataError);
}

TEST_CASE("deviation_histogram exact and statistical cases") {
  const std::vector<int> truth{1, 2, 3, 4, 5, 1, 2};
  const auto exact = eval::deviation_histogram(truth, truth);
  CHECK(exact.fractions[0] == doctest::Approx(1.0));
  CHECK(exact.fractions[1] == 0.0);
  CHECK(exact.fractions[3] == 0.0);

  // uniform random predictions over 5 classes vs uniform truth
  Rng rng(95);
  const int n = 200000;
  std::vector<int> pred(n), tr(n);
  for (int i = 0; i < n; ++i) {
    pred[i] = 1 + static_cast<int>(rng.uniform_index(5));
    tr[i] = 1 + static_cast<int>(rng.uniform_index(5));
  }
  const auto h = eval::deviation_histogram(pred, tr);
  // combinatorics of |i-j| over 25 uniform pairs: 5/25, 8/25, 6/25, 6/25
  const double expect[4] = {0.2, 0.32, 0.24, 0.24};
  for (int b = 0; b < 4; ++b) {
    const double sigma = std::sqrt(expect[b] * (1 - expect[b]) / n);
    CHECK(std::fabs(h.fractions[b] - expect[b]) < 3.0 * sigma);
  }
  CHECK(h.fractions[0] + h.fractions[1] + h.fractions[2] + h.fractions[3] == 1.0);
}

TEST_CASE("correlation_table basics") {
  Rng rng(96);
  std::vector<double> a(50);
  for (double& v : a) v = rng.uniform(0.0, 1.0);
  std::vector<double> reversed(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) reversed[i] = -a[i];

  const auto table = eval::correlation_table({"A", "B"}, {a, reversed});
  CHECK(table.coefficients(0, 0) == 1.0);
  CHECK(table.coefficients(1, 1) == 1.0);
  CHECK(table.coefficients(0, 1) == doctest::Approx(-1.0));
  CHECK(table.coefficients(1, 0) == doctest::Approx(-1.0));

  const auto self = eval::correlation_table({"A", "A2"}, {a, a});
  CHECK(self.coefficients(0, 1) == doctest::Approx(1.0));
}
