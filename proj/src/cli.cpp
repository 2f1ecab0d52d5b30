#include "fpq/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fpq/classify_fuse.hpp"
#include "fpq/error.hpp"
#include "fpq/evaluate.hpp"
#include "fpq/io.hpp"
#include "fpq/neuralnet.hpp"
#include "fpq/rng.hpp"
#include "fpq/robust_stats.hpp"
#include "fpq/score_pipeline.hpp"
#include "fpq/synth.hpp"
#include "fpq/types.hpp"
#include "fpq/version.hpp"

namespace fs = std::filesystem;

namespace fpq::cli {
namespace {

// Applies flat key=value config-file entries to CLI11 options that were not
// given on the command line, and serializes the effective configuration for
// the output-file hash.
class Settings {
 public:
  explicit Settings(CLI::App* cmd) : cmd_(cmd) {}

  template <typename T>
  void bind(CLI::Option* option, const std::string& key, T* target) {
    entries_.push_back({key, option, [target](const std::string& value) {
                          T parsed{};
                          if (!CLI::detail::lexical_cast(value, parsed))
                            throw ConfigError("unparsable value: " + value);
                          *target = parsed;
                        },
                        [target] { return serialize(*target); }});
  }

  void apply(const std::map<std::string, std::string>& config) {
    std::set<std::string> known;
    for (auto& e : entries_) known.insert(e.key);
    for (const auto& [key, value] : config) {
      if (!known.count(key))
        throw ConfigError("config: unknown key '" + key + "' for subcommand " +
                          cmd_->get_name());
    }
    for (auto& e : entries_) {
      const auto it = config.find(e.key);
      if (it == config.end()) continue;
      if (e.option && e.option->count() > 0) continue;  // CLI wins
      try {
        e.set(it->second);
      } catch (const ConfigError&) {
        throw ConfigError("config: bad value for key '" + e.key + "': " + it->second);
      }
    }
  }

  std::map<std::string, std::string> effective() const {
    std::map<std::string, std::string> out;
    out["command"] = cmd_->get_name();
    for (const auto& e : entries_) out[e.key] = e.get();
    return out;
  }

 private:
  template <typename T>
  static std::string serialize(const T& v) {
    if constexpr (std::is_same_v<T, std::string>) return v;
    else if constexpr (std::is_same_v<T, bool>) return v ? "1" : "0";
    else if constexpr (std::is_same_v<T, double>) return io::format_double(v);
    else return std::to_string(v);
  }

  struct Entry {
    std::string key;
    CLI::Option* option;
    std::function<void(const std::string&)> set;
    std::function<std::string()> get;
  };

  CLI::App* cmd_;
  std::vector<Entry> entries_;
};

void require_input_file(const std::string& path, const std::string& what) {
  if (path.empty()) throw ConfigError(what + " path not set");
  if (!fs::is_regular_file(path))
    throw ConfigError(what + " file does not exist: " + path);
}

void require_out_dir(const std::string& dir) {
  if (dir.empty()) throw ConfigError("--out-dir not set");
  if (!fs::is_directory(dir))
    throw ConfigError("output directory does not exist: " + dir);
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

// --- synth ----------------------------------------------------------------

struct SynthArgs {
  std::string config_path, out_dir;
  synth::SynthConfig cfg;
};

int cmd_synth(const SynthArgs& args, const Settings& settings) {
  require_out_dir(args.out_dir);
  const auto data = synth::generate(args.cfg);

  io::FileHeader header{args.cfg.seed, io::config_hash(settings.effective())};
  io::write_scores_csv(join(args.out_dir, "scores.csv"), header, data.roster,
                       data.matchers, data.impostor_partners);
  io::write_features_csv(join(args.out_dir, "features.csv"), header, data.roster,
                         data.features);
  io::write_latent_csv(join(args.out_dir, "latent.csv"), header, data.roster,
                       data.latent_quality);
  std::cerr << "synth: " << data.roster.size() << " samples, "
            << data.matchers.size() << " matchers -> " << args.out_dir << "\n";
  return 0;
}

// --- rank -----------------------------------------------------------------

struct RankArgs {
  std::string config_path, scores, out_dir, merge = "interleave";
  int window = 0;  // 0 = default ceil(N/6)
  std::uint64_t seed = 0;
};

int cmd_rank(const RankArgs& args, const Settings& settings) {
  require_input_file(args.scores, "--scores");
  require_out_dir(args.out_dir);

  pipeline::RankOptions options;
  if (args.window > 0) options.window = args.window;
  if (args.merge == "preliminary") options.merge = pipeline::MergePolicy::Preliminary;
  else if (args.merge != "interleave")
    throw ConfigError("--merge must be interleave or preliminary");

  const io::ScoresFile scores = io::read_scores_csv(args.scores);
  std::vector<pipeline::MatcherRanking> rankings;
  for (const auto& md : scores.matchers) {
    rankings.push_back(pipeline::per_matcher_quality_rank(scores.roster, md, options));
    const auto& r = rankings.back();
    if (!r.degenerate.empty()) {
      std::cerr << "rank: " << md.matcher << ": " << r.degenerate.size()
                << " degenerate sample(s) excluded:";
      for (std::size_t k = 0; k < r.degenerate.size() && k < 8; ++k)
        std::cerr << ' ' << to_string(scores.roster.sample(r.degenerate[k]));
      if (r.degenerate.size() > 8) std::cerr << " ...";
      std::cerr << "\n";
    }
  }

  io::FileHeader header{args.seed, io::config_hash(settings.effective())};
  io::write_ranks_csv(join(args.out_dir, "ranks.csv"), header, scores.roster, rankings);
  return 0;
}

// --- classify ----------------------------------------------------------------

struct ClassifyArgs {
  std::string config_path, ranks, labels_out, out_dir;
  std::string classes = "uniform5";
  std::string class_fractions;  // comma-separated override
  std::string eval_matcher;     // excluded from fusion unless --fuse-all
  bool fuse_all = false;
  std::uint64_t seed = 0;
};

// Regroups rank rows into per-matcher rankings over the union roster.
std::pair<Roster, std::vector<pipeline::MatcherRanking>> rankings_from_rows(
    const std::vector<io::RankRow>& rows) {
  std::vector<SampleId> ids;
  ids.reserve(rows.size());
  for (const auto& r : rows) ids.push_back(r.sample);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  Roster roster = Roster::build(std::move(ids));

  std::vector<std::string> names;
  for (const auto& r : rows)
    if (std::find(names.begin(), names.end(), r.matcher) == names.end())
      names.push_back(r.matcher);

  std::vector<pipeline::MatcherRanking> rankings(names.size());
  for (std::size_t m = 0; m < names.size(); ++m) {
    auto& ranking = rankings[m];
    ranking.matcher = names[m];
    ranking.nms.assign(roster.size(), std::nan(""));
    ranking.final_rank.assign(roster.size(), std::nan(""));
    ranking.prelim_rank.assign(roster.size(), std::nan(""));
    ranking.variant.assign(roster.size(), pipeline::NmsVariant::O1);
  }
  for (const auto& r : rows) {
    const std::size_t m =
        std::find(names.begin(), names.end(), r.matcher) - names.begin();
    const int i = roster.index_of(r.sample);
    rankings[m].nms[i] = r.nms;
    rankings[m].final_rank[i] = r.rank;
    if (r.variant == "o3") rankings[m].variant[i] = pipeline::NmsVariant::O3;
  }
  return {std::move(roster), std::move(rankings)};
}

int cmd_classify(const ClassifyArgs& args, const Settings& settings) {
  require_input_file(args.ranks, "--ranks");
  std::string labels_path = args.labels_out;
  if (labels_path.empty()) {
    require_out_dir(args.out_dir);
    labels_path = join(args.out_dir, "labels.csv");
  }

  classify::ClassScheme scheme = classify::ClassScheme::by_name(args.classes);
  if (!args.class_fractions.empty()) {
    std::vector<double> fractions;
    std::stringstream ss(args.class_fractions);
    std::string tok;
    while (std::getline(ss, tok, ',')) fractions.push_back(std::stod(tok));
    scheme = classify::ClassScheme::custom(fractions);
  }

  auto [roster, rankings] = rankings_from_rows(io::read_ranks_csv(args.ranks));

  if (!args.fuse_all && !args.eval_matcher.empty()) {
    const auto it = std::remove_if(rankings.begin(), rankings.end(),
                                   [&](const pipeline::MatcherRanking& r) {
                                     return r.matcher == args.eval_matcher;
                                   });
    if (it != rankings.end()) {
      rankings.erase(it, rankings.end());
      std::cerr << "classify: excluding evaluation matcher " << args.eval_matcher
                << " from fusion\n";
    }
    if (rankings.empty())
      throw ConfigError("classify: no matchers left after excluding " +
                        args.eval_matcher);
  }

  const auto fused = classify::fuse_ranks(rankings);
  if (!fused.dropped.empty())
    std::cerr << "classify: " << fused.dropped.size()
              << " sample(s) unrankable under some matcher, dropped from fusion\n";
  const auto labels = classify::bin_classes(fused, scheme);

  io::FileHeader header{args.seed, io::config_hash(settings.effective())};
  io::write_labels_csv(labels_path, header, roster, labels);
  return 0;
}

// --- train ---------------------------------------------------------------------

struct TrainArgs {
  std::string config_path, features, labels, model_out, out_dir, pattern_weights;
  std::string optimizer = "scg", error_fn = "mse";
  int hidden = 22, max_runs = 200, patience = 5;
  double reg = 1e-4, min_delta = 0.001, boltzmann_temp = 0.0, train_fraction = 0.5;
  double opt_mse_c = 0.0;
  std::uint64_t seed = 0;
};

struct JoinedDataset {
  std::vector<SampleId> samples;
  Eigen::MatrixXd features;  // n_features x N, raw
  std::vector<int> labels;
  std::vector<int> finger_of;           // dense finger index per sample
  std::vector<std::string> finger_ids;  // finger index -> id
};

JoinedDataset join_features_labels(const io::FeaturesFile& features,
                                   const std::vector<io::LabelRow>& labels) {
  JoinedDataset out;
  std::map<std::string, int> fingers;
  std::size_t missing = 0;
  std::vector<int> columns;
  for (const auto& row : labels) {
    const int i = features.roster.index_of(row.sample);
    if (i < 0) {
      ++missing;
      continue;
    }
    out.samples.push_back(row.sample);
    columns.push_back(i);
    out.labels.push_back(row.class_label);
    const auto [it, inserted] =
        fingers.try_emplace(row.sample.finger, static_cast<int>(fingers.size()));
    if (inserted) out.finger_ids.push_back(row.sample.finger);
    out.finger_of.push_back(it->second);
  }
  if (missing > 0)
    std::cerr << "train: " << missing << " labeled sample(s) missing from features\n";
  if (out.samples.empty()) throw DataError("train: no overlap between features and labels");
  out.features.resize(features.features.rows(), columns.size());
  for (std::size_t k = 0; k < columns.size(); ++k)
    out.features.col(k) = features.features.col(columns[k]);
  return out;
}

int cmd_train(const TrainArgs& args, const Settings& settings) {
  require_input_file(args.features, "--features");
  require_input_file(args.labels, "--labels");
  if (args.model_out.empty()) throw ConfigError("--model output path not set");
  require_out_dir(args.out_dir);
  if (!(args.train_fraction > 0.0 && args.train_fraction < 1.0))
    throw ConfigError("--train-fraction must lie in (0,1)");

  nn::TrainConfig config;
  if (args.optimizer == "scg") config.optimizer = nn::OptimizerKind::Scg;
  else if (args.optimizer == "bfgs") config.optimizer = nn::OptimizerKind::Bfgs;
  else throw ConfigError("--optimizer must be scg or bfgs");
  if (args.error_fn == "mse") config.error_fn = nn::ErrorFn::Mse;
  else if (args.error_fn == "opt-mse") config.error_fn = nn::ErrorFn::OptMse;
  else throw ConfigError("--error-fn must be mse or opt-mse");
  if (args.reg < 0.0) throw ConfigError("--reg must be >= 0");
  if (args.boltzmann_temp < 0.0) throw ConfigError("--boltzmann-temp must be >= 0");
  config.regularization = args.reg;
  config.max_runs = args.max_runs;
  config.early_stop_patience = args.patience;
  config.early_stop_min_delta = args.min_delta;
  config.boltzmann_temperature = args.boltzmann_temp;
  config.opt_mse_c = args.opt_mse_c;
  config.seed = args.seed;

  const io::FeaturesFile features = io::read_features_csv(args.features);
  const auto label_rows = io::read_labels_csv(args.labels);
  const JoinedDataset data = join_features_labels(features, label_rows);

  const int n_classes = *std::max_element(data.labels.begin(), data.labels.end());
  if (n_classes < 2) throw DataError("train: need at least 2 classes");

  // deterministic train/test split by finger
  const int n_fingers = static_cast<int>(data.finger_ids.size());
  std::vector<int> order(n_fingers);
  for (int f = 0; f < n_fingers; ++f) order[f] = f;
  Rng rng(args.seed);
  for (int f = n_fingers - 1; f > 0; --f)
    std::swap(order[f], order[rng.uniform_index(f + 1)]);
  const int train_fingers = std::clamp(
      static_cast<int>(std::lround(n_fingers * args.train_fraction)), 1, n_fingers - 1);
  std::vector<bool> in_train(n_fingers, false);
  for (int f = 0; f < train_fingers; ++f) in_train[order[f]] = true;

  std::vector<int> train_cols, test_cols;
  for (std::size_t k = 0; k < data.samples.size(); ++k)
    (in_train[data.finger_of[k]] ? train_cols : test_cols).push_back(static_cast<int>(k));
  if (train_cols.empty() || test_cols.empty())
    throw DataError("train: empty train or test split");

  const auto take = [&](const std::vector<int>& cols) {
    nn::Batch batch;
    batch.features.resize(data.features.rows(), cols.size());
    batch.labels.resize(cols.size());
    for (std::size_t k = 0; k < cols.size(); ++k) {
      batch.features.col(k) = data.features.col(cols[k]);
      batch.labels[k] = data.labels[cols[k]];
    }
    return batch;
  };
  nn::Batch train_set = take(train_cols);
  nn::Batch test_set = take(test_cols);

  // optional per-sample pattern weights, matched by id
  if (!args.pattern_weights.empty()) {
    require_input_file(args.pattern_weights, "--pattern-weights");
    std::map<SampleId, double> weights;
    for (const auto& [sample, weight] : io::read_pattern_weights_csv(args.pattern_weights)) {
      if (weight < 0.0 || weight > 1.0)
        throw DataError("pattern weight outside [0,1] for " + to_string(sample));
      weights[sample] = weight;
    }
    train_set.pattern_weights = Eigen::VectorXd::Ones(train_set.size());
    for (std::size_t k = 0; k < train_cols.size(); ++k) {
      const auto it = weights.find(data.samples[train_cols[k]]);
      if (it != weights.end()) train_set.pattern_weights[k] = it->second;
    }
  }

  const nn::FeatureTransform transform = nn::fit_feature_transform(train_set.features);
  train_set.features = transform.apply(train_set.features);
  test_set.features = transform.apply(test_set.features);

  nn::NetworkModel model =
      nn::make_network(static_cast<int>(data.features.rows()), args.hidden, n_classes,
                       args.seed);
  model.transform = transform;
  {
    std::ostringstream echo;
    echo << "optimizer=" << args.optimizer << " error_fn=" << args.error_fn
         << " reg=" << io::format_double(args.reg) << " hidden=" << args.hidden
         << " max_runs=" << args.max_runs << " patience=" << args.patience
         << " min_delta=" << io::format_double(args.min_delta)
         << " boltzmann_temp=" << io::format_double(args.boltzmann_temp)
         << " seed=" << args.seed
         << " train_fraction=" << io::format_double(args.train_fraction);
    model.train_config_echo = echo.str();
  }

  nn::TrainResult result = nn::train(train_set, test_set, std::move(model), config);
  std::vector<nn::RunRecord> history = result.history;

  if (result.status != optim::Status::Diverged && args.boltzmann_temp > 0.0) {
    // prune, then fine-tune the surviving weights
    nn::NetworkModel pruned =
        nn::boltzmann_prune(std::move(result.model), args.boltzmann_temp, args.seed + 1);
    result = nn::train(train_set, test_set, std::move(pruned), config);
    const int offset = history.empty() ? 0 : history.back().run;
    for (auto r : result.history) {
      r.run += offset;
      history.push_back(r);
    }
  }

  io::FileHeader header{args.seed, io::config_hash(settings.effective())};
  io::save_model(args.model_out, result.model);
  io::write_history_csv(join(args.out_dir, "history.csv"), header, history);

  const double final_acc = history.empty() ? 0.0 : history.back().test_accuracy;
  std::cerr << "train: " << history.size() << " runs, test accuracy "
            << io::format_double(final_acc) << "\n";
  if (result.status == optim::Status::Diverged)
    throw DataError("train: objective diverged; last finite model written to " +
                    args.model_out);
  return 0;
}

// --- predict ----------------------------------------------------------------------

struct PredictArgs {
  std::string config_path, model, features, out_dir;
  std::uint64_t seed = 0;
};

int cmd_predict(const PredictArgs& args, const Settings& settings) {
  require_input_file(args.model, "--model");
  require_input_file(args.features, "--features");
  require_out_dir(args.out_dir);

  const nn::NetworkModel model = io::load_model(args.model);
  const io::FeaturesFile features = io::read_features_csv(args.features);
  if (features.features.rows() != model.n_in())
    throw DataError("predict: features have " +
                    std::to_string(features.features.rows()) +
                    " dimensions, model expects " + std::to_string(model.n_in()));

  std::vector<int> classes(features.roster.size());
  for (int i = 0; i < features.roster.size(); ++i)
    classes[i] = nn::predict_class(model, features.features.col(i));

  io::FileHeader header{args.seed, io::config_hash(settings.effective())};
  io::write_predictions_csv(join(args.out_dir, "predictions.csv"), header,
                            features.roster.samples(), classes);
  return 0;
}

// --- evaluate ----------------------------------------------------------------------

struct EvaluateArgs {
  std::string config_path, scores, labels, predictions, ranks, eval_matcher, out_dir;
  std::uint64_t seed = 0;
};

int cmd_evaluate(const EvaluateArgs& args, const Settings& settings) {
  require_input_file(args.scores, "--scores");
  require_input_file(args.labels, "--labels");
  require_input_file(args.predictions, "--predictions");
  require_input_file(args.ranks, "--ranks");
  require_out_dir(args.out_dir);
  if (args.eval_matcher.empty()) throw ConfigError("--eval-matcher not set");

  const io::ScoresFile scores = io::read_scores_csv(args.scores);
  const Roster& roster = scores.roster;

  const MatcherData* eval_matcher = nullptr;
  for (const auto& md : scores.matchers)
    if (md.matcher == args.eval_matcher) eval_matcher = &md;
  if (!eval_matcher)
    throw ConfigError("evaluation matcher '" + args.eval_matcher +
                      "' not present in scores");

  std::vector<int> true_classes(roster.size(), 0);
  for (const auto& row : io::read_labels_csv(args.labels)) {
    const int i = roster.index_of(row.sample);
    if (i >= 0) true_classes[i] = row.class_label;
  }
  std::vector<int> predicted_classes(roster.size(), 0);
  for (const auto& row : io::read_predictions_csv(args.predictions)) {
    const int i = roster.index_of(row.sample);
    if (i >= 0) predicted_classes[i] = row.class_label;
  }

  io::FileHeader header{args.seed, io::config_hash(settings.effective())};

  // three selection policies: trained network, statistically determined
  // classes, and the naive lowest imprint index
  const std::vector<int> all_ones(roster.size(), 1);
  const struct {
    const char* file;
    const std::vector<int>* classes;
  } selections[] = {
      {"det_trained.csv", &predicted_classes},
      {"det_perfect.csv", &true_classes},
      {"det_naive.csv", &all_ones},
  };
  for (const auto& sel : selections) {
    const auto picks = eval::select_best_imprints(roster, *sel.classes);
    int skipped = 0;
    for (int p : picks)
      if (p < 0) ++skipped;
    if (skipped > 0)
      std::cerr << "evaluate: " << sel.file << ": " << skipped
                << " finger(s) without labeled imprints skipped\n";
    const auto curve = eval::quality_selected_det(roster, *eval_matcher, picks);
    io::write_det_csv(join(args.out_dir, sel.file), header, curve);
    std::cerr << "evaluate: " << sel.file << " eer=" << io::format_double(curve.eer)
              << "\n";
  }

  // deviation histogram over samples carrying both classes
  std::vector<int> pred, truth;
  for (int i = 0; i < roster.size(); ++i) {
    if (true_classes[i] >= 1 && predicted_classes[i] >= 1) {
      pred.push_back(predicted_classes[i]);
      truth.push_back(true_classes[i]);
    }
  }
  if (pred.empty())
    throw DataError("evaluate: labels and predictions share no samples");
  io::write_histogram_csv(join(args.out_dir, "deviation_histogram.csv"), header,
                          eval::deviation_histogram(pred, truth));

  // correlation of normalized match scores across matchers (common samples)
  {
    const auto rows = io::read_ranks_csv(args.ranks);
    std::vector<std::string> names;
    for (const auto& r : rows)
      if (std::find(names.begin(), names.end(), r.matcher) == names.end())
        names.push_back(r.matcher);
    std::map<std::string, std::map<SampleId, double>> nms;
    for (const auto& r : rows) nms[r.matcher][r.sample] = r.nms;

    if (names.size() >= 2) {
      std::vector<SampleId> common;
      for (const auto& [id, value] : nms[names[0]]) {
        bool everywhere = true;
        for (std::size_t m = 1; m < names.size(); ++m)
          if (!nms[names[m]].count(id)) everywhere = false;
        if (everywhere) common.push_back(id);
      }
      std::vector<std::vector<double>> stats_vectors(names.size());
      for (std::size_t m = 0; m < names.size(); ++m)
        for (const auto& id : common) stats_vectors[m].push_back(nms[names[m]][id]);
      io::write_correlation_csv(join(args.out_dir, "correlation_nms.csv"), header,
                                eval::correlation_table(names, stats_vectors));
    } else {
      std::cerr << "evaluate: fewer than 2 matchers in ranks, skipping NMS correlation\n";
    }
  }

  // correlation of the impostor standard deviations (computed from scores)
  if (scores.matchers.size() >= 2) {
    std::vector<std::string> names;
    std::vector<std::vector<double>> sigma(scores.matchers.size());
    for (std::size_t m = 0; m < scores.matchers.size(); ++m) {
      names.push_back(scores.matchers[m].matcher);
      for (int i = 0; i < roster.size(); ++i)
        sigma[m].push_back(pipeline::impostor_moments(scores.matchers[m].sets[i]).sigma);
    }
    // a thresholding matcher can produce constant sigma vectors; keep the
    // table and mark undefined cells
    eval::CorrelationTable table;
    table.matchers = names;
    table.coefficients = Eigen::MatrixXd::Identity(names.size(), names.size());
    for (std::size_t i = 0; i < names.size(); ++i)
      for (std::size_t j = i + 1; j < names.size(); ++j) {
        double rho;
        try {
          rho = stats::spearman(sigma[i], sigma[j]);
        } catch (const std::invalid_argument&) {
          rho = std::nan("");
        }
        table.coefficients(i, j) = rho;
        table.coefficients(j, i) = rho;
      }
    io::write_correlation_csv(join(args.out_dir, "correlation_impostor_std.csv"),
                              header, table);
  }
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"fingerprint quality assessment pipeline"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  // synth ------------------------------------------------------------
  SynthArgs synth_args;
  CLI::App* synth_cmd = app.add_subcommand(
      "synth", "generate a synthetic scores/features/latent dataset");
  Settings synth_settings(synth_cmd);
  {
    auto* c = synth_cmd;
    Settings& s = synth_settings;
    c->add_option("--config", synth_args.config_path, "key=value config file");
    s.bind(c->add_option("--out-dir", synth_args.out_dir, "output directory"),
           "out_dir", &synth_args.out_dir);
    s.bind(c->add_option("--subjects", synth_args.cfg.subjects), "subjects",
           &synth_args.cfg.subjects);
    s.bind(c->add_option("--fingers-per-subject", synth_args.cfg.fingers_per_subject),
           "fingers_per_subject", &synth_args.cfg.fingers_per_subject);
    s.bind(c->add_option("--imprints", synth_args.cfg.imprints_per_finger),
           "imprints", &synth_args.cfg.imprints_per_finger);
    s.bind(c->add_option("--matchers", synth_args.cfg.matchers), "matchers",
           &synth_args.cfg.matchers);
    s.bind(c->add_option("--impostors", synth_args.cfg.impostors_per_sample),
           "impostors", &synth_args.cfg.impostors_per_sample);
    s.bind(c->add_option("--thresholding-matcher", synth_args.cfg.thresholding_matcher,
                         "last matcher clamps impostor scores to 0"),
           "thresholding_matcher", &synth_args.cfg.thresholding_matcher);
    s.bind(c->add_option("--threshold-quantile", synth_args.cfg.threshold_quantile),
           "threshold_quantile", &synth_args.cfg.threshold_quantile);
    s.bind(c->add_option("--quality-noise", synth_args.cfg.quality_noise),
           "quality_noise", &synth_args.cfg.quality_noise);
    s.bind(c->add_option("--feature-noise", synth_args.cfg.feature_noise),
           "feature_noise", &synth_args.cfg.feature_noise);
    s.bind(c->add_option("--seed", synth_args.cfg.seed), "seed", &synth_args.cfg.seed);
  }

  // rank ---------------------------------------------------------------
  RankArgs rank_args;
  CLI::App* rank_cmd =
      app.add_subcommand("rank", "per-matcher quality ranks from a scores file");
  Settings rank_settings(rank_cmd);
  {
    auto* c = rank_cmd;
    Settings& s = rank_settings;
    c->add_option("--config", rank_args.config_path, "key=value config file");
    s.bind(c->add_option("--scores", rank_args.scores), "scores", &rank_args.scores);
    s.bind(c->add_option("--out-dir", rank_args.out_dir), "out_dir", &rank_args.out_dir);
    s.bind(c->add_option("--window", rank_args.window,
                         "significant-rank window (0 = ceil(N/6))"),
           "window", &rank_args.window);
    s.bind(c->add_option("--merge", rank_args.merge, "interleave|preliminary"),
           "merge", &rank_args.merge);
    s.bind(c->add_option("--seed", rank_args.seed), "seed", &rank_args.seed);
  }

  // classify ------------------------------------------------------------
  ClassifyArgs classify_args;
  CLI::App* classify_cmd =
      app.add_subcommand("classify", "fuse per-matcher ranks into quality classes");
  Settings classify_settings(classify_cmd);
  {
    auto* c = classify_cmd;
    Settings& s = classify_settings;
    c->add_option("--config", classify_args.config_path, "key=value config file");
    s.bind(c->add_option("--ranks", classify_args.ranks), "ranks", &classify_args.ranks);
    s.bind(c->add_option("--labels", classify_args.labels_out,
                         "labels output path (default <out-dir>/labels.csv)"),
           "labels", &classify_args.labels_out);
    s.bind(c->add_option("--out-dir", classify_args.out_dir), "out_dir",
           &classify_args.out_dir);
    s.bind(c->add_option("--classes", classify_args.classes,
                         "uniform10|uniform5|nfiq5"),
           "classes", &classify_args.classes);
    s.bind(c->add_option("--class-fractions", classify_args.class_fractions,
                         "comma-separated fractions override"),
           "class_fractions", &classify_args.class_fractions);
    s.bind(c->add_option("--eval-matcher", classify_args.eval_matcher,
                         "matcher excluded from fusion"),
           "eval_matcher", &classify_args.eval_matcher);
    s.bind(c->add_flag("--fuse-all", classify_args.fuse_all,
                       "fuse every matcher including --eval-matcher"),
           "fuse_all", &classify_args.fuse_all);
    s.bind(c->add_option("--seed", classify_args.seed), "seed", &classify_args.seed);
  }

  // train -----------------------------------------------------------------
  TrainArgs train_args;
  CLI::App* train_cmd =
      app.add_subcommand("train", "train the class-prediction network");
  Settings train_settings(train_cmd);
  {
    auto* c = train_cmd;
    Settings& s = train_settings;
    c->add_option("--config", train_args.config_path, "key=value config file");
    s.bind(c->add_option("--features", train_args.features), "features",
           &train_args.features);
    s.bind(c->add_option("--labels", train_args.labels), "labels", &train_args.labels);
    s.bind(c->add_option("--model", train_args.model_out, "model output path"),
           "model", &train_args.model_out);
    s.bind(c->add_option("--out-dir", train_args.out_dir), "out_dir", &train_args.out_dir);
    s.bind(c->add_option("--optimizer", train_args.optimizer, "scg|bfgs"), "optimizer",
           &train_args.optimizer);
    s.bind(c->add_option("--error-fn", train_args.error_fn, "mse|opt-mse"), "error_fn",
           &train_args.error_fn);
    s.bind(c->add_option("--reg", train_args.reg, "regularization factor"), "reg",
           &train_args.reg);
    s.bind(c->add_option("--hidden", train_args.hidden, "hidden layer size"), "hidden",
           &train_args.hidden);
    s.bind(c->add_option("--max-runs", train_args.max_runs), "max_runs",
           &train_args.max_runs);
    s.bind(c->add_option("--patience", train_args.patience), "patience",
           &train_args.patience);
    s.bind(c->add_option("--min-delta", train_args.min_delta), "min_delta",
           &train_args.min_delta);
    s.bind(c->add_option("--boltzmann-temp", train_args.boltzmann_temp),
           "boltzmann_temp", &train_args.boltzmann_temp);
    s.bind(c->add_option("--opt-mse-c", train_args.opt_mse_c,
                         "override the distance-error constant (0 = auto)"),
           "opt_mse_c", &train_args.opt_mse_c);
    s.bind(c->add_option("--train-fraction", train_args.train_fraction),
           "train_fraction", &train_args.train_fraction);
    s.bind(c->add_option("--pattern-weights", train_args.pattern_weights,
                         "per-sample weight CSV"),
           "pattern_weights", &train_args.pattern_weights);
    s.bind(c->add_option("--seed", train_args.seed), "seed", &train_args.seed);
  }

  // predict -------------------------------------------------------------------
  PredictArgs predict_args;
  CLI::App* predict_cmd =
      app.add_subcommand("predict", "predict classes for a features file");
  Settings predict_settings(predict_cmd);
  {
    auto* c = predict_cmd;
    Settings& s = predict_settings;
    c->add_option("--config", predict_args.config_path, "key=value config file");
    s.bind(c->add_option("--model", predict_args.model), "model", &predict_args.model);
    s.bind(c->add_option("--features", predict_args.features), "features",
           &predict_args.features);
    s.bind(c->add_option("--out-dir", predict_args.out_dir), "out_dir",
           &predict_args.out_dir);
    s.bind(c->add_option("--seed", predict_args.seed), "seed", &predict_args.seed);
  }

  // evaluate ---------------------------------------------------------------------
  EvaluateArgs evaluate_args;
  CLI::App* evaluate_cmd = app.add_subcommand(
      "evaluate", "DET curves, deviation histogram and correlation tables");
  Settings evaluate_settings(evaluate_cmd);
  {
    auto* c = evaluate_cmd;
    Settings& s = evaluate_settings;
    c->add_option("--config", evaluate_args.config_path, "key=value config file");
    s.bind(c->add_option("--scores", evaluate_args.scores), "scores",
           &evaluate_args.scores);
    s.bind(c->add_option("--labels", evaluate_args.labels), "labels",
           &evaluate_args.labels);
    s.bind(c->add_option("--predictions", evaluate_args.predictions), "predictions",
           &evaluate_args.predictions);
    s.bind(c->add_option("--ranks", evaluate_args.ranks), "ranks", &evaluate_args.ranks);
    s.bind(c->add_option("--eval-matcher", evaluate_args.eval_matcher), "eval_matcher",
           &evaluate_args.eval_matcher);
    s.bind(c->add_option("--out-dir", evaluate_args.out_dir), "out_dir",
           &evaluate_args.out_dir);
    s.bind(c->add_option("--seed", evaluate_args.seed), "seed", &evaluate_args.seed);
  }

  try {
    app.parse(argc, argv);

    const auto merge_config = [](Settings& settings, const std::string& path) {
      if (!path.empty()) settings.apply(io::read_config_file(path));
    };
    if (synth_cmd->parsed()) {
      merge_config(synth_settings, synth_args.config_path);
      return cmd_synth(synth_args, synth_settings);
    }
    if (rank_cmd->parsed()) {
      merge_config(rank_settings, rank_args.config_path);
      return cmd_rank(rank_args, rank_settings);
    }
    if (classify_cmd->parsed()) {
      merge_config(classify_settings, classify_args.config_path);
      return cmd_classify(classify_args, classify_settings);
    }
    if (train_cmd->parsed()) {
      merge_config(train_settings, train_args.config_path);
      return cmd_train(train_args, train_settings);
    }
    if (predict_cmd->parsed()) {
      merge_config(predict_settings, predict_args.config_path);
      return cmd_predict(predict_args, predict_settings);
    }
    if (evaluate_cmd->parsed()) {
      merge_config(evaluate_settings, evaluate_args.config_path);
      return cmd_evaluate(evaluate_args, evaluate_settings);
    }
    return 2;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace fpq::cli
