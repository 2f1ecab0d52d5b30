#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fpq/optim.hpp"

namespace fpq::nn {

// Per-feature z-score fitted on training data and applied verbatim at
// prediction time.
struct FeatureTransform {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;  // sample std; 1 for constant features

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd apply(const Eigen::MatrixXd& features) const;  // n_in x N
};

// Fits the transform on the columns of `features` (n_in x N, N >= 2).
// Constant features pass through centered only, with a warning on stderr.
FeatureTransform fit_feature_transform(const Eigen::MatrixXd& features);

// 3-layer feed-forward network, sigmoid activations on both layers.
struct NetworkModel {
  Eigen::MatrixXd w_ih;  // n_hidden x n_in
  Eigen::VectorXd b_h;
  Eigen::MatrixXd w_ho;  // n_out x n_hidden
  Eigen::VectorXd b_o;
  // 1 = active, 0 = pruned (empty until pruning happens)
  Eigen::MatrixXd mask_ih, mask_ho;
  FeatureTransform transform;
  std::string train_config_echo;

  int n_in() const { return static_cast<int>(w_ih.cols()); }
  int n_hidden() const { return static_cast<int>(w_ih.rows()); }
  int n_out() const { return static_cast<int>(w_ho.rows()); }
  bool has_mask() const { return mask_ih.size() > 0; }
};

// Weights and biases uniform in [-0.5, 0.5] from the seeded generator.
NetworkModel make_network(int n_in, int n_hidden, int n_out, std::uint64_t seed);

// Activations for one standardized feature vector; every entry in (0, 1).
Eigen::VectorXd forward(const NetworkModel& model, const Eigen::VectorXd& input);

// Batch version: inputs n_in x N, activations n_out x N.
Eigen::MatrixXd forward_batch(const NetworkModel& model, const Eigen::MatrixXd& inputs);

// (1 - x_i)^2 + sum_{j != i} x_j^2 with 1-based true_class i.
double error_mse(const Eigen::VectorXd& activations, int true_class);

// Distance-weighted variant: ((1 - x_i)^2 + sum_{j != i} |i-j| x_j^2) / C.
// C <= 0 selects the default (n_out + 1) / 3, which keeps the average error
// of a uniformly misplaced activation at the plain-MSE level.
double error_opt_mse(const Eigen::VectorXd& activations, int true_class, double c = 0.0);

double default_opt_mse_c(int n_out);

enum class ErrorFn { Mse, OptMse };
enum class OptimizerKind { Scg, Bfgs };

struct TrainConfig {
  OptimizerKind optimizer = OptimizerKind::Scg;
  ErrorFn error_fn = ErrorFn::Mse;
  double regularization = 1e-4;
  int max_runs = 200;
  int early_stop_patience = 5;
  double early_stop_min_delta = 0.001;  // absolute test-accuracy improvement
  double boltzmann_temperature = 0.0;   // 0 = no pruning
  std::uint64_t seed = 0;
  double opt_mse_c = 0.0;  // 0 = default (n_out+1)/3
};

// One dataset: standardized features (n_in x N), 1-based class labels and
// optional per-sample pattern weights in [0, 1] (empty = all 1).
struct Batch {
  Eigen::MatrixXd features;
  std::vector<int> labels;
  Eigen::VectorXd pattern_weights;

  int size() const { return static_cast<int>(labels.size()); }
};

// Flat parameter order: w_ih row-major, b_h, w_ho row-major, b_o.
Eigen::VectorXd pack(const NetworkModel& model);
void unpack(const Eigen::VectorXd& params, NetworkModel* model);

// Pattern-weighted mean error plus L2 regularization of the unpruned
// weights, with its exact analytic gradient in flat parameter order.
std::pair<double, Eigen::VectorXd> objective_and_gradient(const NetworkModel& model,
                                                          const Batch& batch,
                                                          const TrainConfig& config);

// Fraction of samples whose predicted class equals the label.
double accuracy(const NetworkModel& model, const Batch& batch);

struct RunRecord {
  int run = 0;
  double objective = 0.0;
  double test_accuracy = 0.0;
};

struct TrainResult {
  NetworkModel model;
  std::vector<RunRecord> history;
  optim::Status status = optim::Status::MaxIterations;
};

// One run = one optimizer iteration over the full batch; after each run the
// test accuracy is measured and training stops once it has failed to improve
// by min_delta for `patience` consecutive runs.
TrainResult train_scg(const Batch& train_set, const Batch& test_set,
                      NetworkModel model, const TrainConfig& config);
TrainResult train_bfgs(const Batch& train_set, const Batch& test_set,
                       NetworkModel model, const TrainConfig& config);
// Dispatches on config.optimizer.
TrainResult train(const Batch& train_set, const Batch& test_set,
                  NetworkModel model, const TrainConfig& config);

// Zeroes each active weight independently with probability exp(-w^2/T) and
// masks it out of any further objective/gradient evaluation.
NetworkModel boltzmann_prune(NetworkModel model, double temperature,
                             std::uint64_t seed);

// Applies the stored feature transform, runs the network and returns the
// 1-based argmax class; ties break toward the lower (better) class.
int predict_class(const NetworkModel& model, const Eigen::VectorXd& raw_features);

int argmax_class(const Eigen::VectorXd& activations);

}  // namespace fpq::nn
