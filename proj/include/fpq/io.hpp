#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fpq/classify_fuse.hpp"
#include "fpq/evaluate.hpp"
#include "fpq/neuralnet.hpp"
#include "fpq/score_pipeline.hpp"
#include "fpq/types.hpp"

namespace fpq::io {

// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

// Comment header written at the top of every output file. No timestamps:
// identical inputs must produce byte-identical files.
struct FileHeader {
  std::uint64_t seed = 0;
  std::string config_hash;
};

// FNV-1a over the canonical "key=value\n" listing, hex-encoded.
std::string config_hash(const std::map<std::string, std::string>& effective);

// Flat key=value configuration file ('#' comments, blank lines allowed).
std::map<std::string, std::string> read_config_file(const std::string& path);

// --- scores ------------------------------------------------------------

// One row per comparison:
// matcher,probe_subject,probe_finger,probe_imprint,
// gallery_subject,gallery_finger,gallery_imprint,score,kind
// Genuine pairs appear once (probe = lower imprint); both samples receive
// the score at ingest.
void write_scores_csv(const std::string& path, const FileHeader& header,
                      const Roster& roster,
                      const std::vector<MatcherData>& matchers,
                      const std::vector<std::vector<std::int32_t>>& partners);

struct ScoresFile {
  Roster roster;
  std::vector<MatcherData> matchers;
};

ScoresFile read_scores_csv(const std::string& path);

// --- features / latent ---------------------------------------------------

void write_features_csv(const std::string& path, const FileHeader& header,
                        const Roster& roster, const Eigen::MatrixXd& features);

struct FeaturesFile {
  Roster roster;
  Eigen::MatrixXd features;  // n_features x N, roster order
};

FeaturesFile read_features_csv(const std::string& path);

void write_latent_csv(const std::string& path, const FileHeader& header,
                      const Roster& roster, const Eigen::VectorXd& quality);

// --- ranks ---------------------------------------------------------------

void write_ranks_csv(const std::string& path, const FileHeader& header,
                     const Roster& roster,
                     const std::vector<pipeline::MatcherRanking>& rankings);

struct RankRow {
  std::string matcher;
  SampleId sample;
  double nms = 0.0;
  std::string variant;
  double rank = 0.0;
};

std::vector<RankRow> read_ranks_csv(const std::string& path);

// --- labels / predictions --------------------------------------------------

void write_labels_csv(const std::string& path, const FileHeader& header,
                      const Roster& roster,
                      const std::vector<classify::QualityLabel>& labels);

struct LabelRow {
  SampleId sample;
  double fused_rank = 0.0;
  int class_label = 0;
};

std::vector<LabelRow> read_labels_csv(const std::string& path);

void write_predictions_csv(const std::string& path, const FileHeader& header,
                           const std::vector<SampleId>& samples,
                           const std::vector<int>& classes);

struct PredictionRow {
  SampleId sample;
  int class_label = 0;
};

std::vector<PredictionRow> read_predictions_csv(const std::string& path);

// subject,finger,imprint,weight
std::vector<std::pair<SampleId, double>> read_pattern_weights_csv(
    const std::string& path);

// --- evaluation outputs ----------------------------------------------------

// threshold,fmr,fnmr rows plus a trailing "# eer=<value>" comment.
void write_det_csv(const std::string& path, const FileHeader& header,
                   const eval::DetCurve& curve);

void write_histogram_csv(const std::string& path, const FileHeader& header,
                         const eval::DeviationHistogram& histogram);

void write_correlation_csv(const std::string& path, const FileHeader& header,
                           const eval::CorrelationTable& table);

// --- training outputs --------------------------------------------------------

void write_history_csv(const std::string& path, const FileHeader& header,
                       const std::vector<nn::RunRecord>& history);

// Self-describing text model file; weights in hex-float, so load/save
// round-trips reproduce predictions bit for bit.
void save_model(const std::string& path, const nn::NetworkModel& model);
nn::NetworkModel load_model(const std::string& path);

}  // namespace fpq::io
