#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "fpq/types.hpp"

namespace fpq::synth {

// Seeded generator of matcher scores and image-feature vectors from a
// latent per-imprint quality. The genuine score of a pair depends on the
// worse imprint only; impostor scores are independent of quality. Every
// random draw comes from the project generator, so output is reproducible
// bit for bit.
struct SynthConfig {
  int subjects = 50;
  int fingers_per_subject = 8;
  int imprints_per_finger = 9;
  int matchers = 3;
  int impostors_per_sample = 442;
  // when true the last matcher clamps impostor scores below its cutoff to 0
  bool thresholding_matcher = true;
  double threshold_quantile = 0.30;  // cutoff on the impostor distribution
  double quality_noise = 1.0;        // score channel noise
  double feature_noise = 1.0;        // multiplies the per-feature noise scales
  std::uint64_t seed = 0;
};

inline constexpr int kFeatureCount = 11;

struct SynthData {
  Roster roster;
  std::vector<MatcherData> matchers;      // named M1..Mk
  Eigen::MatrixXd features;               // kFeatureCount x N, raw values
  Eigen::VectorXd latent_quality;         // per sample, in (0,1)
  // impostor partner sample per (sample, slot); shared across matchers
  std::vector<std::vector<std::int32_t>> impostor_partners;
};

SynthData generate(const SynthConfig& config);

// --- generator internals, exposed for tests -------------------------------

// Location of the genuine-score distribution for a pair: strictly
// increasing in min(q_a, q_b) and independent of the better imprint.
double genuine_location(double q_a, double q_b);

// Inverse CDF of the right-skewed latent quality distribution (Beta(2,5)).
double latent_quality_quantile(double u);

// Inverse standard normal CDF (Acklam's rational approximation).
double inverse_normal_cdf(double p);

// Noise-free feature vector for a given quality; every component is
// strictly increasing in q. Component 0 plays the role of the pixel-count
// style coverage feature (largest scale).
Eigen::VectorXd feature_means(double q);

// Affine score transform of matcher m (0-based): distinct range and offset
// per matcher, so raw scores are not comparable across matchers.
double matcher_transform(int m, double base_score);

}  // namespace fpq::synth
