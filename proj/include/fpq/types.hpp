#pragma once

#include <compare>
#include <string>
#include <vector>

namespace fpq {

// One imprint of one physical finger. Finger identifiers are globally
// unique; imprint is the index within the finger.
struct SampleId {
  std::string subject;
  std::string finger;
  int imprint = 0;

  auto operator<=>(const SampleId&) const = default;
};

inline std::string to_string(const SampleId& id) {
  return id.subject + "/" + id.finger + "/" + std::to_string(id.imprint);
}

// Identity table shared by every matcher: samples in canonical
// (subject, finger, imprint) order, grouped by finger.
class Roster {
 public:
  // Sorts, groups and validates: unique ids, one subject per finger, and
  // the same imprint count for every finger. Throws DataError.
  static Roster build(std::vector<SampleId> ids);

  int size() const { return static_cast<int>(samples_.size()); }
  const std::vector<SampleId>& samples() const { return samples_; }
  const SampleId& sample(int i) const { return samples_[i]; }

  int finger_count() const { return static_cast<int>(fingers_.size()); }
  // Sample indices of one finger, ordered by imprint.
  const std::vector<int>& finger(int f) const { return fingers_[f]; }
  int finger_of(int sample) const { return finger_of_[sample]; }

  int imprints_per_finger() const { return imprints_per_finger_; }

  // Dense index of an id, or -1.
  int index_of(const SampleId& id) const;

 private:
  std::vector<SampleId> samples_;
  std::vector<std::vector<int>> fingers_;
  std::vector<int> finger_of_;
  int imprints_per_finger_ = 0;
};

// Scores of one sample under one matcher. Genuine entries are keyed by the
// peer imprint index within the same finger.
struct GenuineScore {
  int peer_imprint = 0;
  double score = 0.0;
};

struct ScoreSet {
  int sample = -1;  // dense roster index
  std::vector<GenuineScore> genuine;
  std::vector<double> impostor;
};

struct MatcherData {
  std::string matcher;
  std::vector<ScoreSet> sets;  // aligned with Roster::samples()
};

}  // namespace fpq
