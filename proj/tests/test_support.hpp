#pragma once

// Shared fixtures for building small synthetic rosters and matcher data
// directly, without the library's generator.

#include <string>
#include <vector>

#include "fpq/rng.hpp"
#include "fpq/types.hpp"

namespace testsup {

inline std::string pad(int v, int width = 3) {
  std::string s = std::to_string(v);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

inline fpq::Roster make_roster(int fingers, int imprints) {
  std::vector<fpq::SampleId> ids;
  for (int f = 0; f < fingers; ++f)
    for (int i = 0; i < imprints; ++i)
      ids.push_back({"s" + pad(f / 2), "f" + pad(f), i});
  return fpq::Roster::build(std::move(ids));
}

// Matcher data where each finger has a base genuine level and every pair
// score wiggles around it; impostors are Normal(imp_mu, imp_sd) draws.
struct ScoreModel {
  double level_lo = 30.0;
  double level_hi = 80.0;
  double pair_wiggle = 4.0;
  double imp_mu = 10.0;
  double imp_sd = 5.0;
  int impostors = 40;
};

inline fpq::MatcherData random_matcher(const fpq::Roster& roster, fpq::Rng& rng,
                                       const ScoreModel& model = {},
                                       const std::string& name = "M1") {
  fpq::MatcherData md;
  md.matcher = name;
  md.sets.resize(roster.size());
  for (int i = 0; i < roster.size(); ++i) md.sets[i].sample = i;

  for (int f = 0; f < roster.finger_count(); ++f) {
    const auto& members = roster.finger(f);
    const double level = rng.uniform(model.level_lo, model.level_hi);
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        const double score = level + model.pair_wiggle * rng.normal();
        const int ia = members[a];
        const int ib = members[b];
        md.sets[ia].genuine.push_back({roster.sample(ib).imprint, score});
        md.sets[ib].genuine.push_back({roster.sample(ia).imprint, score});
      }
    }
  }
  for (int i = 0; i < roster.size(); ++i) {
    md.sets[i].impostor.resize(model.impostors);
    for (double& x : md.sets[i].impostor)
      x = model.imp_mu + model.imp_sd * rng.normal();
  }
  return md;
}

}  // namespace testsup
