#include "fpq/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "fpq/error.hpp"
#include "fpq/rng.hpp"
#include "fpq/robust_stats.hpp"

namespace fpq::synth {
namespace {

// Base-space impostor distribution.
constexpr double kImpostorMean = 10.0;
constexpr double kImpostorStd = 5.0;
constexpr double kImpostorJitter = 1.0;  // scaled by quality_noise

// Genuine location curve g(x) = lo + span * logistic(steep * (x - mid)).
constexpr double kGenuineLow = 12.0;
constexpr double kGenuineSpan = 48.0;
constexpr double kGenuineSteepness = 7.0;
constexpr double kGenuineMid = 0.32;
constexpr double kGenuineNoise = 2.0;  // scaled by quality_noise

// Within-finger spread of the per-imprint quality around the finger base,
// scaled by quality_noise. At zero noise a finger's imprints share one
// quality, every stochastic term vanishes and the pipeline output is an
// exact function of the latent qualities.
constexpr double kImprintQualitySpread = 0.20;

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::string pad(int value, int width) {
  std::string s = std::to_string(value);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

}  // namespace

double genuine_location(double q_a, double q_b) {
  const double q = std::min(q_a, q_b);
  return kGenuineLow + kGenuineSpan * logistic(kGenuineSteepness * (q - kGenuineMid));
}

double latent_quality_quantile(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 64; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (stats::regularized_incomplete_beta(mid, 2.0, 5.0) < u) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("inverse_normal_cdf: p outside (0,1)");
  // Acklam's rational approximation, |relative error| < 1.15e-9.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00, 2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double q, r;
  if (p < p_low) {
    q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - p_low) {
    q = p - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  q = std::sqrt(-2.0 * std::log(1.0 - p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

Eigen::VectorXd feature_means(double q) {
  Eigen::VectorXd f(kFeatureCount);
  f[0] = 1500.0 + 6000.0 * q;                          // covered pixels
  f[1] = 8.0 + 70.0 * q;                               // minutiae count
  f[2] = 5.0 + 60.0 * std::pow(q, 1.2);                // minutiae above thresholds
  f[3] = 3.0 + 50.0 * std::pow(q, 1.5);
  f[4] = 2.0 + 40.0 * std::pow(q, 1.9);
  f[5] = 1.0 + 30.0 * std::pow(q, 2.4);
  f[6] = 350.0 * logistic(5.0 * (q - 0.20));           // blocks above thresholds
  f[7] = 330.0 * logistic(5.0 * (q - 0.35));
  f[8] = 300.0 * logistic(5.0 * (q - 0.50));
  f[9] = 260.0 * logistic(5.0 * (q - 0.65));
  f[10] = 0.15 + 0.70 * q;                             // coverage ratio
  return f;
}

namespace {

// Noise scale per feature, multiplied by config.feature_noise.
const double kFeatureNoiseScale[kFeatureCount] = {300.0, 6.0, 5.0,  4.0,  3.0, 2.5,
                                                  25.0,  25.0, 25.0, 25.0, 0.04};

}  // namespace

double matcher_transform(int m, double base_score) {
  const double scale = 1.0 + 0.6 * m;
  const double offset = 120.0 * m;
  return offset + scale * base_score;
}

SynthData generate(const SynthConfig& config) {
  if (config.subjects < 2 || config.fingers_per_subject < 1 ||
      config.imprints_per_finger < 2 || config.matchers < 1 ||
      config.impostors_per_sample < 2)
    throw std::invalid_argument("synth: counts out of range");
  if (config.quality_noise < 0.0 || config.feature_noise < 0.0)
    throw std::invalid_argument("synth: noise levels must be >= 0");
  if (!(config.threshold_quantile > 0.0 && config.threshold_quantile < 1.0))
    throw std::invalid_argument("synth: threshold quantile outside (0,1)");

  const int id_width =
      std::max(4, static_cast<int>(std::to_string(config.subjects * config.fingers_per_subject).size()));

  std::vector<SampleId> ids;
  for (int s = 0; s < config.subjects; ++s) {
    for (int f = 0; f < config.fingers_per_subject; ++f) {
      const int finger_index = s * config.fingers_per_subject + f + 1;
      for (int i = 0; i < config.imprints_per_finger; ++i)
        ids.push_back({"s" + pad(s + 1, id_width), "f" + pad(finger_index, id_width), i});
    }
  }

  SynthData data;
  data.roster = Roster::build(std::move(ids));
  const int n = data.roster.size();

  Rng rng(config.seed);

  // 1. latent quality: right-skewed base per finger plus a noise-scaled
  // per-imprint deviation, fingers in canonical order
  data.latent_quality.resize(n);
  for (int f = 0; f < data.roster.finger_count(); ++f) {
    const double base = latent_quality_quantile(rng.uniform());
    for (int i : data.roster.finger(f)) {
      const double q =
          base + config.quality_noise * kImprintQualitySpread * rng.normal();
      data.latent_quality[i] = std::clamp(q, 0.001, 0.999);
    }
  }

  // 2. features
  data.features.resize(kFeatureCount, n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd f = feature_means(data.latent_quality[i]);
    for (int j = 0; j < kFeatureCount; ++j)
      f[j] += config.feature_noise * kFeatureNoiseScale[j] * rng.normal();
    data.features.col(i) = f;
  }

  // 3. impostor partners, different subject, distinct when the pool allows
  data.impostor_partners.resize(n);
  {
    std::string current_subject;
    std::vector<std::int32_t> pool;
    for (int i = 0; i < n; ++i) {
      const std::string& subject = data.roster.sample(i).subject;
      if (subject != current_subject) {
        current_subject = subject;
        pool.clear();
        for (int j = 0; j < n; ++j)
          if (data.roster.sample(j).subject != subject)
            pool.push_back(static_cast<std::int32_t>(j));
      }
      auto& partners = data.impostor_partners[i];
      partners.resize(config.impostors_per_sample);
      const bool unique_draw =
          static_cast<int>(pool.size()) >= config.impostors_per_sample;
      std::unordered_set<std::int32_t> used;
      for (int k = 0; k < config.impostors_per_sample; ++k) {
        std::int32_t pick = pool[rng.uniform_index(pool.size())];
        while (unique_draw && used.count(pick))
          pick = pool[rng.uniform_index(pool.size())];
        if (unique_draw) used.insert(pick);
        partners[k] = pick;
      }
    }
  }

  // impostor base grid: identical location pattern for every sample, so the
  // zero-noise limit keeps the impostor moments constant across samples
  std::vector<double> impostor_grid(config.impostors_per_sample);
  for (int k = 0; k < config.impostors_per_sample; ++k) {
    const double u = (k + 0.5) / config.impostors_per_sample;
    impostor_grid[k] = kImpostorMean + kImpostorStd * inverse_normal_cdf(u);
  }

  // 4. per-matcher scores
  data.matchers.resize(config.matchers);
  for (int m = 0; m < config.matchers; ++m) {
    MatcherData& md = data.matchers[m];
    md.matcher = "M" + std::to_string(m + 1);
    md.sets.resize(n);
    for (int i = 0; i < n; ++i) md.sets[i].sample = i;

    const bool thresholds = config.thresholding_matcher && m == config.matchers - 1;
    const double cutoff = matcher_transform(
        m, kImpostorMean + kImpostorStd * inverse_normal_cdf(config.threshold_quantile));

    for (int f = 0; f < data.roster.finger_count(); ++f) {
      const auto& members = data.roster.finger(f);
      for (std::size_t a = 0; a < members.size(); ++a) {
        for (std::size_t b = a + 1; b < members.size(); ++b) {
          const int ia = members[a];
          const int ib = members[b];
          const double base =
              genuine_location(data.latent_quality[ia], data.latent_quality[ib]) +
              config.quality_noise * kGenuineNoise * rng.normal();
          const double score = matcher_transform(m, base);
          md.sets[ia].genuine.push_back({data.roster.sample(ib).imprint, score});
          md.sets[ib].genuine.push_back({data.roster.sample(ia).imprint, score});
        }
      }
    }
    for (int i = 0; i < n; ++i) {
      auto& impostor = md.sets[i].impostor;
      impostor.resize(config.impostors_per_sample);
      for (int k = 0; k < config.impostors_per_sample; ++k) {
        const double base =
            impostor_grid[k] + config.quality_noise * kImpostorJitter * rng.normal();
        double score = matcher_transform(m, base);
        if (thresholds && score < cutoff) score = 0.0;
        impostor[k] = score;
      }
    }
  }
  return data;
}

}  // namespace fpq::synth
