#include "fpq/types.hpp"

#include <algorithm>
#include <map>

#include "fpq/error.hpp"

namespace fpq {

Roster Roster::build(std::vector<SampleId> ids) {
  if (ids.empty()) throw DataError("roster: no samples");
  std::sort(ids.begin(), ids.end());
  const auto dup = std::adjacent_find(ids.begin(), ids.end());
  if (dup != ids.end())
    throw DataError("roster: duplicate sample " + to_string(*dup));

  Roster r;
  r.samples_ = std::move(ids);
  r.finger_of_.resize(r.samples_.size());

  std::map<std::string, int> finger_index;
  std::map<std::string, std::string> finger_subject;
  for (std::size_t i = 0; i < r.samples_.size(); ++i) {
    const SampleId& id = r.samples_[i];
    auto [it, inserted] = finger_index.try_emplace(id.finger,
                                                   static_cast<int>(r.fingers_.size()));
    if (inserted) {
      r.fingers_.emplace_back();
      finger_subject[id.finger] = id.subject;
    } else if (finger_subject[id.finger] != id.subject) {
      throw DataError("roster: finger " + id.finger + " appears under subjects " +
                      finger_subject[id.finger] + " and " + id.subject);
    }
    r.fingers_[it->second].push_back(static_cast<int>(i));
    r.finger_of_[i] = it->second;
  }

  r.imprints_per_finger_ = static_cast<int>(r.fingers_.front().size());
  for (const auto& f : r.fingers_) {
    if (static_cast<int>(f.size()) != r.imprints_per_finger_)
      throw DataError("roster: finger " + r.samples_[f.front()].finger + " has " +
                      std::to_string(f.size()) + " imprints, expected " +
                      std::to_string(r.imprints_per_finger_));
  }
  return r;
}

int Roster::index_of(const SampleId& id) const {
  const auto it = std::lower_bound(samples_.begin(), samples_.end(), id);
  if (it == samples_.end() || *it != id) return -1;
  return static_cast<int>(it - samples_.begin());
}

}  // namespace fpq
