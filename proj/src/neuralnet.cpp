#include "fpq/neuralnet.hpp"

#include <cmath>
#include <limits>
#include <iostream>
#include <stdexcept>

#include "fpq/rng.hpp"

namespace fpq::nn {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd sigmoid(const MatrixXd& z) {
  return (1.0 / (1.0 + (-z.array()).exp())).matrix();
}

void validate_batch(const NetworkModel& model, const Batch& batch) {
  if (batch.size() == 0) throw std::invalid_argument("nn: empty batch");
  if (batch.features.rows() != model.n_in())
    throw std::invalid_argument("nn: feature dimension mismatch");
  if (batch.features.cols() != batch.size())
    throw std::invalid_argument("nn: feature/label count mismatch");
  if (batch.pattern_weights.size() != 0 && batch.pattern_weights.size() != batch.size())
    throw std::invalid_argument("nn: pattern weight count mismatch");
  for (int label : batch.labels)
    if (label < 1 || label > model.n_out())
      throw std::invalid_argument("nn: class label out of range");
}

}  // namespace

VectorXd FeatureTransform::apply(const VectorXd& x) const {
  if (x.size() != mean.size())
    throw std::invalid_argument("feature transform: dimension mismatch");
  return ((x - mean).array() / scale.array()).matrix();
}

MatrixXd FeatureTransform::apply(const MatrixXd& features) const {
  if (features.rows() != mean.size())
    throw std::invalid_argument("feature transform: dimension mismatch");
  return ((features.colwise() - mean).array().colwise() / scale.array()).matrix();
}

FeatureTransform fit_feature_transform(const MatrixXd& features) {
  if (features.cols() < 2)
    throw std::invalid_argument("feature transform: need at least 2 samples");
  const int d = static_cast<int>(features.rows());
  const double n = static_cast<double>(features.cols());

  FeatureTransform t;
  t.mean = features.rowwise().mean();
  t.scale.resize(d);
  for (int i = 0; i < d; ++i) {
    const double ss = (features.row(i).array() - t.mean[i]).square().sum();
    const double sd = std::sqrt(ss / (n - 1.0));
    if (sd > 0.0) {
      t.scale[i] = sd;
    } else {
      std::cerr << "feature transform: feature " << (i + 1)
                << " is constant; centering only\n";
      t.scale[i] = 1.0;
    }
  }
  return t;
}

NetworkModel make_network(int n_in, int n_hidden, int n_out, std::uint64_t seed) {
  if (n_in < 1 || n_hidden < 1 || n_out < 1)
    throw std::invalid_argument("make_network: layer sizes must be positive");
  NetworkModel m;
  m.w_ih.resize(n_hidden, n_in);
  m.b_h.resize(n_hidden);
  m.w_ho.resize(n_out, n_hidden);
  m.b_o.resize(n_out);
  m.transform.mean = VectorXd::Zero(n_in);
  m.transform.scale = VectorXd::Ones(n_in);

  Rng rng(seed);
  // flat parameter order, row-major per matrix
  for (int r = 0; r < n_hidden; ++r)
    for (int c = 0; c < n_in; ++c) m.w_ih(r, c) = rng.uniform(-0.5, 0.5);
  for (int r = 0; r < n_hidden; ++r) m.b_h[r] = rng.uniform(-0.5, 0.5);
  for (int r = 0; r < n_out; ++r)
    for (int c = 0; c < n_hidden; ++c) m.w_ho(r, c) = rng.uniform(-0.5, 0.5);
  for (int r = 0; r < n_out; ++r) m.b_o[r] = rng.uniform(-0.5, 0.5);
  return m;
}

VectorXd forward(const NetworkModel& model, const VectorXd& input) {
  if (input.size() != model.n_in())
    throw std::invalid_argument("forward: input dimension mismatch");
  const VectorXd hidden = sigmoid(model.w_ih * input + model.b_h);
  return sigmoid(model.w_ho * hidden + model.b_o);
}

MatrixXd forward_batch(const NetworkModel& model, const MatrixXd& inputs) {
  if (inputs.rows() != model.n_in())
    throw std::invalid_argument("forward_batch: input dimension mismatch");
  const MatrixXd hidden = sigmoid((model.w_ih * inputs).colwise() + model.b_h);
  return sigmoid((model.w_ho * hidden).colwise() + model.b_o);
}

double default_opt_mse_c(int n_out) {
  return (n_out + 1) / 3.0;
}

double error_mse(const VectorXd& activations, int true_class) {
  if (true_class < 1 || true_class > activations.size())
    throw std::invalid_argument("error_mse: class out of range");
  double e = 0.0;
  for (int j = 0; j < activations.size(); ++j) {
    const double target = (j == true_class - 1) ? 1.0 : 0.0;
    const double d = activations[j] - target;
    e += d * d;
  }
  return e;
}

double error_opt_mse(const VectorXd& activations, int true_class, double c) {
  if (true_class < 1 || true_class > activations.size())
    throw std::invalid_argument("error_opt_mse: class out of range");
  if (c <= 0.0) c = default_opt_mse_c(static_cast<int>(activations.size()));
  double e = 0.0;
  for (int j = 0; j < activations.size(); ++j) {
    if (j == true_class - 1) {
      const double d = 1.0 - activations[j];
      e += d * d;
    } else {
      e += std::abs(true_class - 1 - j) * activations[j] * activations[j];
    }
  }
  return e / c;
}

VectorXd pack(const NetworkModel& model) {
  const int nh = model.n_hidden(), ni = model.n_in(), no = model.n_out();
  VectorXd p(nh * ni + nh + no * nh + no);
  int k = 0;
  for (int r = 0; r < nh; ++r)
    for (int c = 0; c < ni; ++c) p[k++] = model.w_ih(r, c);
  for (int r = 0; r < nh; ++r) p[k++] = model.b_h[r];
  for (int r = 0; r < no; ++r)
    for (int c = 0; c < nh; ++c) p[k++] = model.w_ho(r, c);
  for (int r = 0; r < no; ++r) p[k++] = model.b_o[r];
  return p;
}

void unpack(const VectorXd& params, NetworkModel* model) {
  const int nh = model->n_hidden(), ni = model->n_in(), no = model->n_out();
  if (params.size() != nh * ni + nh + no * nh + no)
    throw std::invalid_argument("unpack: parameter count mismatch");
  int k = 0;
  for (int r = 0; r < nh; ++r)
    for (int c = 0; c < ni; ++c) model->w_ih(r, c) = params[k++];
  for (int r = 0; r < nh; ++r) model->b_h[r] = params[k++];
  for (int r = 0; r < no; ++r)
    for (int c = 0; c < nh; ++c) model->w_ho(r, c) = params[k++];
  for (int r = 0; r < no; ++r) model->b_o[r] = params[k++];
  if (model->has_mask()) {
    // pruned coordinates stay exactly zero no matter what the optimizer did
    model->w_ih = model->w_ih.cwiseProduct(model->mask_ih);
    model->w_ho = model->w_ho.cwiseProduct(model->mask_ho);
  }
}

std::pair<double, VectorXd> objective_and_gradient(const NetworkModel& model,
                                                   const Batch& batch,
                                                   const TrainConfig& config) {
  validate_batch(model, batch);
  const int n = batch.size();
  const int no = model.n_out();

  VectorXd pw = batch.pattern_weights.size() ? batch.pattern_weights
                                             : VectorXd::Ones(n);
  const double pw_sum = pw.sum();
  if (!(pw_sum > 0.0))
    throw std::invalid_argument("objective_and_gradient: all pattern weights are zero");

  const double c_opt = config.opt_mse_c > 0.0 ? config.opt_mse_c
                                              : default_opt_mse_c(no);

  const MatrixXd hidden = sigmoid((model.w_ih * batch.features).colwise() + model.b_h);
  const MatrixXd out = sigmoid((model.w_ho * hidden).colwise() + model.b_o);

  // per-class penalty coefficients and targets
  double objective = 0.0;
  MatrixXd dE_dout(no, n);
  for (int k = 0; k < n; ++k) {
    const int cls = batch.labels[k] - 1;
    const double w = pw[k] / pw_sum;
    double err = 0.0;
    for (int j = 0; j < no; ++j) {
      const double target = (j == cls) ? 1.0 : 0.0;
      double coeff = 1.0;
      if (config.error_fn == ErrorFn::OptMse)
        coeff = (j == cls) ? 1.0 / c_opt : std::abs(cls - j) / c_opt;
      const double d = out(j, k) - target;
      err += coeff * d * d;
      dE_dout(j, k) = w * 2.0 * coeff * d;
    }
    objective += w * err;
  }

  const double r = config.regularization;
  objective += r * (model.w_ih.squaredNorm() + model.w_ho.squaredNorm());

  // backprop
  const MatrixXd delta_o =
      dE_dout.array() * out.array() * (1.0 - out.array());
  MatrixXd g_w_ho = delta_o * hidden.transpose() + 2.0 * r * model.w_ho;
  const VectorXd g_b_o = delta_o.rowwise().sum();
  const MatrixXd delta_h =
      (model.w_ho.transpose() * delta_o).array() * hidden.array() *
      (1.0 - hidden.array());
  MatrixXd g_w_ih = delta_h * batch.features.transpose() + 2.0 * r * model.w_ih;
  const VectorXd g_b_h = delta_h.rowwise().sum();

  if (model.has_mask()) {
    g_w_ih = g_w_ih.cwiseProduct(model.mask_ih);
    g_w_ho = g_w_ho.cwiseProduct(model.mask_ho);
  }

  const int nh = model.n_hidden(), ni = model.n_in();
  VectorXd grad(nh * ni + nh + no * nh + no);
  int k = 0;
  for (int row = 0; row < nh; ++row)
    for (int col = 0; col < ni; ++col) grad[k++] = g_w_ih(row, col);
  for (int row = 0; row < nh; ++row) grad[k++] = g_b_h[row];
  for (int row = 0; row < no; ++row)
    for (int col = 0; col < nh; ++col) grad[k++] = g_w_ho(row, col);
  for (int row = 0; row < no; ++row) grad[k++] = g_b_o[row];
  return {objective, grad};
}

int argmax_class(const VectorXd& activations) {
  int best = 0;
  for (int j = 1; j < activations.size(); ++j)
    if (activations[j] > activations[best]) best = j;  // strict: ties keep the lower class
  return best + 1;
}

double accuracy(const NetworkModel& model, const Batch& batch) {
  validate_batch(model, batch);
  const MatrixXd out = forward_batch(model, batch.features);
  int hits = 0;
  for (int k = 0; k < batch.size(); ++k)
    if (argmax_class(out.col(k)) == batch.labels[k]) ++hits;
  return static_cast<double>(hits) / batch.size();
}

int predict_class(const NetworkModel& model, const VectorXd& raw_features) {
  return argmax_class(forward(model, model.transform.apply(raw_features)));
}

namespace {

TrainResult train_impl(const Batch& train_set, const Batch& test_set,
                       NetworkModel model, const TrainConfig& config,
                       OptimizerKind kind) {
  validate_batch(model, train_set);
  validate_batch(model, test_set);

  NetworkModel scratch = model;
  const optim::Objective objective = [&](const VectorXd& x, VectorXd* grad) {
    unpack(x, &scratch);
    auto [fx, g] = objective_and_gradient(scratch, train_set, config);
    if (grad) *grad = std::move(g);
    return fx;
  };

  TrainResult result;
  double best_accuracy = -std::numeric_limits<double>::infinity();
  int stale_runs = 0;

  const optim::IterationCallback callback = [&](int run, double fx, const VectorXd& x) {
    unpack(x, &scratch);
    const double test_acc = accuracy(scratch, test_set);
    result.history.push_back({run, fx, test_acc});
    if (test_acc >= best_accuracy + config.early_stop_min_delta) {
      best_accuracy = test_acc;
      stale_runs = 0;
    } else {
      ++stale_runs;
    }
    return stale_runs < config.early_stop_patience;
  };

  optim::Options options;
  options.max_iterations = config.max_runs;
  options.grad_tol = 1e-12;

  const optim::Result opt =
      kind == OptimizerKind::Scg
          ? optim::scg_minimize(objective, pack(model), options, callback)
          : optim::bfgs_minimize(objective, pack(model), options, callback);

  unpack(opt.x, &model);
  result.model = std::move(model);
  result.status = opt.status;
  return result;
}

}  // namespace

TrainResult train_scg(const Batch& train_set, const Batch& test_set,
                      NetworkModel model, const TrainConfig& config) {
  return train_impl(train_set, test_set, std::move(model), config, OptimizerKind::Scg);
}

TrainResult train_bfgs(const Batch& train_set, const Batch& test_set,
                       NetworkModel model, const TrainConfig& config) {
  return train_impl(train_set, test_set, std::move(model), config, OptimizerKind::Bfgs);
}

TrainResult train(const Batch& train_set, const Batch& test_set,
                  NetworkModel model, const TrainConfig& config) {
  return train_impl(train_set, test_set, std::move(model), config, config.optimizer);
}

NetworkModel boltzmann_prune(NetworkModel model, double temperature,
                             std::uint64_t seed) {
  if (!(temperature > 0.0))
    throw std::invalid_argument("boltzmann_prune: temperature must be > 0");
  if (!model.has_mask()) {
    model.mask_ih = Eigen::MatrixXd::Ones(model.n_hidden(), model.n_in());
    model.mask_ho = Eigen::MatrixXd::Ones(model.n_out(), model.n_hidden());
  }
  Rng rng(seed);
  const auto prune = [&](Eigen::MatrixXd& w, Eigen::MatrixXd& mask) {
    for (int r = 0; r < w.rows(); ++r) {
      for (int c = 0; c < w.cols(); ++c) {
        if (mask(r, c) == 0.0) continue;
        const double p = std::exp(-w(r, c) * w(r, c) / temperature);
        if (rng.uniform() < p) {
          w(r, c) = 0.0;
          mask(r, c) = 0.0;
        }
      }
    }
  };
  prune(model.w_ih, model.mask_ih);
  prune(model.w_ho, model.mask_ho);
  return model;
}

}  // namespace fpq::nn
