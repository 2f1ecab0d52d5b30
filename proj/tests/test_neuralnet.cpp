#include "fpq/neuralnet.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "fpq/rng.hpp"

using namespace fpq;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Central finite differences on the flat objective.
VectorXd fd_gradient(const nn::NetworkModel& model, const nn::Batch& batch,
                     const nn::TrainConfig& config, double h = 1e-6) {
  nn::NetworkModel scratch = model;
  const VectorXd x0 = nn::pack(model);
  VectorXd g(x0.size());
  for (int i = 0; i < x0.size(); ++i) {
    VectorXd x = x0;
    x[i] = x0[i] + h;
    nn::unpack(x, &scratch);
    const double fp = nn::objective_and_gradient(scratch, batch, config).first;
    x[i] = x0[i] - h;
    nn::unpack(x, &scratch);
    const double fm = nn::objective_and_gradient(scratch, batch, config).first;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

nn::Batch random_batch(Rng& rng, int n_in, int n_out, int n) {
  nn::Batch b;
  b.features.resize(n_in, n);
  for (int i = 0; i < n_in; ++i)
    for (int k = 0; k < n; ++k) b.features(i, k) = rng.uniform(-2.0, 2.0);
  b.labels.resize(n);
  for (int& l : b.labels) l = 1 + static_cast<int>(rng.uniform_index(n_out));
  return b;
}

// Linearly separable 2-class toy set: class by the sign of x0 with margin.
std::pair<nn::Batch, nn::Batch> toy_separable(Rng& rng) {
  auto make = [&](int n) {
    nn::Batch b;
    b.features.resize(2, n);
    b.labels.resize(n);
    for (int k = 0; k < n; ++k) {
      const bool right = k % 2 == 0;
      b.features(0, k) = (right ? 1.0 : -1.0) * rng.uniform(0.5, 2.0);
      b.features(1, k) = rng.uniform(-1.0, 1.0);
      b.labels[k] = right ? 1 : 2;
    }
    return b;
  };
  return {make(20), make(20)};
}

}  // namespace

TEST_CASE("forward with all-zero parameters gives 0.5 everywhere") {
  nn::NetworkModel m = nn::make_network(11, 22, 5, 1);
  m.w_ih.setZero();
  m.b_h.setZero();
  m.w_ho.setZero();
  m.b_o.setZero();
  const VectorXd out = nn::forward(m, VectorXd::Random(11));
  for (int j = 0; j < 5; ++j) CHECK(out[j] == doctest::Approx(0.5));
}

TEST_CASE("forward activations stay inside (0,1)") {
  Rng rng(2);
  nn::NetworkModel m = nn::make_network(11, 22, 5, 2);
  for (int t = 0; t < 20; ++t) {
    VectorXd x(11);
    for (int i = 0; i < 11; ++i) x[i] = rng.uniform(-30.0, 30.0);
    const VectorXd out = nn::forward(m, x);
    for (int j = 0; j < 5; ++j) {
      CHECK(out[j] > 0.0);
      CHECK(out[j] < 1.0);
    }
  }
}

TEST_CASE("forward matches a hand-rolled matrix oracle") {
  nn::NetworkModel m = nn::make_network(4, 3, 2, 0);  // seed-0 model
  VectorXd x(4);
  x << 0.3, -1.2, 2.0, 0.25;

  // plain loops, no Eigen products
  std::vector<double> hidden(3), out(2);
  for (int r = 0; r < 3; ++r) {
    double z = m.b_h[r];
    for (int c = 0; c < 4; ++c) z += m.w_ih(r, c) * x[c];
    hidden[r] = 1.0 / (1.0 + std::exp(-z));
  }
  for (int r = 0; r < 2; ++r) {
    double z = m.b_o[r];
    for (int c = 0; c < 3; ++c) z += m.w_ho(r, c) * hidden[c];
    out[r] = 1.0 / (1.0 + std::exp(-z));
  }

  const VectorXd got = nn::forward(m, x);
  CHECK(std::fabs(got[0] - out[0]) < 1e-12);
  CHECK(std::fabs(got[1] - out[1]) < 1e-12);

  // batch path agrees with the single-sample path
  MatrixXd xs(4, 2);
  xs.col(0) = x;
  xs.col(1) = -x;
  const MatrixXd batch_out = nn::forward_batch(m, xs);
  CHECK((batch_out.col(0) - got).norm() < 1e-14);
}

TEST_CASE("error_mse examples") {
  VectorXd perfect(5);
  perfect << 1, 0, 0, 0, 0;
  CHECK(nn::error_mse(perfect, 1) == doctest::Approx(0.0));

  CHECK(nn::error_mse(VectorXd::Zero(5), 3) == doctest::Approx(1.0));

  VectorXd far(5);
  far << 0, 0, 0, 0, 1;
  CHECK(nn::error_mse(far, 1) == doctest::Approx(2.0));
}

TEST_CASE("error_opt_mse examples and distance weighting") {
  VectorXd perfect(5);
  perfect << 1, 0, 0, 0, 0;
  CHECK(nn::error_opt_mse(perfect, 1) == doctest::Approx(0.0));

  CHECK(nn::default_opt_mse_c(5) == doctest::Approx(2.0));

  VectorXd far(5);
  far << 0, 0, 0, 0, 1;
  CHECK(nn::error_opt_mse(far, 1) == doctest::Approx(2.5));

  VectorXd near(5);
  near << 0, 1, 0, 0, 0;
  CHECK(nn::error_opt_mse(near, 1) == doctest::Approx(1.0));

  // a unit of misplaced activation costs more the further it sits
  for (int d1 = 1; d1 < 4; ++d1) {
    VectorXd a = VectorXd::Zero(5), b = VectorXd::Zero(5);
    a[d1] = 1.0;
    b[d1 + 1] = 1.0;
    CHECK(nn::error_opt_mse(a, 1) < nn::error_opt_mse(b, 1));
  }
}

TEST_CASE("objective ignores zero-pattern-weight samples") {
  Rng rng(3);
  nn::NetworkModel m = nn::make_network(4, 5, 3, 3);
  nn::Batch batch = random_batch(rng, 4, 3, 2);
  batch.pattern_weights.resize(2);
  batch.pattern_weights << 0.0, 1.0;

  nn::TrainConfig cfg;
  cfg.regularization = 0.0;

  const auto [obj, grad] = nn::objective_and_gradient(m, batch, cfg);
  const VectorXd act = nn::forward(m, batch.features.col(1));
  CHECK(obj == doctest::Approx(nn::error_mse(act, batch.labels[1])).epsilon(1e-12));

  nn::Batch all_zero = batch;
  all_zero.pattern_weights << 0.0, 0.0;
  CHECK_THROWS_AS(nn::objective_and_gradient(m, all_zero, cfg), std::invalid_argument);
}

TEST_CASE("objective of a zero-error batch reduces to the regularizer") {
  nn::NetworkModel m = nn::make_network(2, 2, 3, 4);
  m.w_ih.setZero();
  m.w_ih(0, 0) = 2.0;  // only regularized weight mass
  m.b_h.setZero();
  m.w_ho.setZero();
  // saturate the outputs to an exact one-hot for class 1
  m.b_o << 50.0, -50.0, -50.0;

  nn::Batch batch;
  batch.features = MatrixXd::Zero(2, 1);
  batch.labels = {1};

  nn::TrainConfig cfg;
  cfg.regularization = 0.01;
  const auto [obj, grad] = nn::objective_and_gradient(m, batch, cfg);
  CHECK(obj == doctest::Approx(0.01 * 4.0).epsilon(1e-12));
}

TEST_CASE("analytic gradient matches central finite differences") {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const int n_in = 3 + static_cast<int>(rng.uniform_index(3));
    const int n_out = 2 + static_cast<int>(rng.uniform_index(4));
    nn::NetworkModel m = nn::make_network(n_in, 5, n_out, 100 + trial);
    nn::Batch batch = random_batch(rng, n_in, n_out, 6);
    batch.pattern_weights.resize(6);
    const double pw_choices[3] = {0.0, 0.5, 1.0};
    for (int k = 0; k < 6; ++k)
      batch.pattern_weights[k] = pw_choices[rng.uniform_index(3)];
    if (batch.pattern_weights.sum() == 0.0) batch.pattern_weights[0] = 1.0;

    for (const auto error_fn : {nn::ErrorFn::Mse, nn::ErrorFn::OptMse}) {
      for (const double reg : {0.0, 1e-4}) {
        nn::TrainConfig cfg;
        cfg.error_fn = error_fn;
        cfg.regularization = reg;
        const auto [obj, grad] = nn::objective_and_gradient(m, batch, cfg);
        const VectorXd fd = fd_gradient(m, batch, cfg);
        const double rel = (grad - fd).norm() / (grad.norm() + fd.norm() + 1e-12);
        CHECK(rel < 1e-5);
      }
    }
  }
}

TEST_CASE("SCG reaches 95% on a separable toy set within 200 runs") {
  Rng rng(11);
  auto [train_set, test_set] = toy_separable(rng);
  nn::TrainConfig cfg;
  cfg.max_runs = 200;
  cfg.early_stop_patience = 200;  // let it run
  cfg.regularization = 0.0;
  cfg.seed = 5;
  const auto res = nn::train_scg(train_set, test_set,
                                 nn::make_network(2, 6, 2, 5), cfg);
  CHECK(nn::accuracy(res.model, train_set) >= 0.95);
}

TEST_CASE("training is bitwise deterministic for a fixed seed") {
  Rng rng(12);
  auto [train_set, test_set] = toy_separable(rng);
  nn::TrainConfig cfg;
  cfg.max_runs = 40;
  cfg.early_stop_patience = 40;
  cfg.seed = 9;

  const auto r1 = nn::train_scg(train_set, test_set, nn::make_network(2, 4, 2, 9), cfg);
  const auto r2 = nn::train_scg(train_set, test_set, nn::make_network(2, 4, 2, 9), cfg);
  REQUIRE(r1.history.size() == r2.history.size());
  for (std::size_t i = 0; i < r1.history.size(); ++i) {
    CHECK(r1.history[i].objective == r2.history[i].objective);
    CHECK(r1.history[i].test_accuracy == r2.history[i].test_accuracy);
  }
  CHECK(nn::pack(r1.model) == nn::pack(r2.model));

  const auto b1 = nn::train_bfgs(train_set, test_set, nn::make_network(2, 4, 2, 9), cfg);
  const auto b2 = nn::train_bfgs(train_set, test_set, nn::make_network(2, 4, 2, 9), cfg);
  CHECK(nn::pack(b1.model) == nn::pack(b2.model));
}

TEST_CASE("early stopping halts after patience stale runs") {
  Rng rng(13);
  auto [train_set, test_set] = toy_separable(rng);
  nn::TrainConfig cfg;
  cfg.max_runs = 100;
  cfg.early_stop_patience = 5;
  cfg.early_stop_min_delta = 2.0;  // accuracy can never improve by this much
  cfg.seed = 1;
  for (const auto opt : {nn::OptimizerKind::Scg, nn::OptimizerKind::Bfgs}) {
    cfg.optimizer = opt;
    const auto res = nn::train(train_set, test_set, nn::make_network(2, 4, 2, 1), cfg);
    // run 1 "improves" over the -inf baseline; then patience stale runs
    CHECK(res.history.size() == 1 + 5);
    CHECK(res.status == optim::Status::CallbackStop);
  }
}

TEST_CASE("zero pattern weight makes training independent of that sample") {
  Rng rng(14);
  auto [train_set, test_set] = toy_separable(rng);
  train_set.pattern_weights = VectorXd::Ones(train_set.size());
  train_set.pattern_weights[3] = 0.0;

  nn::TrainConfig cfg;
  cfg.max_runs = 30;
  cfg.early_stop_patience = 30;
  cfg.seed = 21;

  const auto r1 = nn::train_scg(train_set, test_set, nn::make_network(2, 4, 2, 21), cfg);

  nn::Batch perturbed = train_set;
  perturbed.features(0, 3) = 123.0;
  perturbed.features(1, 3) = -77.0;
  const auto r2 = nn::train_scg(perturbed, test_set, nn::make_network(2, 4, 2, 21), cfg);

  CHECK(nn::pack(r1.model) == nn::pack(r2.model));
}

TEST_CASE("boltzmann_prune limit cases") {
  nn::NetworkModel m = nn::make_network(3, 3, 2, 31);
  m.w_ih.setConstant(1.0);
  m.w_ho.setConstant(-1.5);

  // T -> 0+: exp(-w^2/T) underflows for |w| >= 1, nothing prunes
  const auto frozen = nn::boltzmann_prune(m, 1e-12, 7);
  CHECK(frozen.mask_ih.sum() == doctest::Approx(9.0));
  CHECK(frozen.mask_ho.sum() == doctest::Approx(6.0));

  // an exactly-zero weight prunes with probability 1
  m.w_ih(1, 1) = 0.0;
  const auto pruned = nn::boltzmann_prune(m, 1e-12, 7);
  CHECK(pruned.mask_ih(1, 1) == 0.0);
  CHECK(pruned.w_ih(1, 1) == 0.0);
}

TEST_CASE("boltzmann_prune golden count and monte-carlo rate") {
  // golden: fixed model, fixed seed -> frozen pruned count
  nn::NetworkModel m = nn::make_network(11, 22, 5, 123);
  const auto pruned = nn::boltzmann_prune(m, 0.05, 77);
  const int total = 11 * 22 + 5 * 22;
  const int active = static_cast<int>(pruned.mask_ih.sum() + pruned.mask_ho.sum());
  const int golden_pruned = 147;  // recorded from the frozen generator stream
  CHECK(total - active == golden_pruned);

  // monte-carlo: empirical rate within 3 sigma of sum(exp(-w^2/T))
  Rng rng(99);
  const int n = 100000;
  nn::NetworkModel big = nn::make_network(1000, 100, 1, 321);
  REQUIRE(big.w_ih.size() == n);
  double expected = 0.0, variance = 0.0;
  const double temperature = 0.1;
  for (int r = 0; r < big.w_ih.rows(); ++r)
    for (int c = 0; c < big.w_ih.cols(); ++c) {
      const double p = std::exp(-big.w_ih(r, c) * big.w_ih(r, c) / temperature);
      expected += p;
      variance += p * (1.0 - p);
    }
  const auto big_pruned = nn::boltzmann_prune(big, temperature, 1234);
  const double got = static_cast<double>(n) - big_pruned.mask_ih.sum();
  CHECK(std::fabs(got - expected) <= 3.0 * std::sqrt(variance));
}

TEST_CASE("pruned weights stay exactly zero through further training") {
  Rng rng(15);
  auto [train_set, test_set] = toy_separable(rng);
  nn::TrainConfig cfg;
  cfg.max_runs = 25;
  cfg.early_stop_patience = 25;
  cfg.seed = 4;

  auto first = nn::train_scg(train_set, test_set, nn::make_network(2, 6, 2, 4), cfg);
  auto pruned = nn::boltzmann_prune(first.model, 0.2, 51);
  REQUIRE(pruned.mask_ih.sum() + pruned.mask_ho.sum() <
          pruned.mask_ih.size() + pruned.mask_ho.size());

  for (const auto opt : {nn::OptimizerKind::Scg, nn::OptimizerKind::Bfgs}) {
    cfg.optimizer = opt;
    const auto more = nn::train(train_set, test_set, pruned, cfg);
    for (int r = 0; r < pruned.mask_ih.rows(); ++r)
      for (int c = 0; c < pruned.mask_ih.cols(); ++c)
        if (pruned.mask_ih(r, c) == 0.0) CHECK(more.model.w_ih(r, c) == 0.0);
    for (int r = 0; r < pruned.mask_ho.rows(); ++r)
      for (int c = 0; c < pruned.mask_ho.cols(); ++c)
        if (pruned.mask_ho(r, c) == 0.0) CHECK(more.model.w_ho(r, c) == 0.0);
  }
}

TEST_CASE("predict_class breaks ties toward the lower class") {
  VectorXd acts(4);
  acts << 0.2, 0.9, 0.9, 0.1;
  CHECK(nn::argmax_class(acts) == 2);
  acts.setConstant(0.5);
  CHECK(nn::argmax_class(acts) == 1);
}

TEST_CASE("feature transform: fit, apply, constant features, no refit") {
  MatrixXd features(3, 3);
  features << 1.0, 2.0, 3.0,
              5.0, 5.0, 5.0,
             -1.0, 0.0, 4.0;
  const auto t = nn::fit_feature_transform(features);

  // constant feature centered only
  const MatrixXd transformed = t.apply(features);
  for (int k = 0; k < 3; ++k) CHECK(transformed(1, k) == doctest::Approx(0.0));

  for (int i = 0; i < 3; ++i) {
    const double mean = transformed.row(i).mean();
    CHECK(std::fabs(mean) < 1e-10);
    if (i != 1) {
      const double sd = std::sqrt(
          (transformed.row(i).array() - mean).square().sum() / 2.0);
      CHECK(sd == doctest::Approx(1.0).epsilon(1e-10));
    }
  }

  // hand-computed on the 3-sample set: feature 0 has mean 2, sd 1
  CHECK(transformed(0, 0) == doctest::Approx(-1.0));
  CHECK(transformed(0, 2) == doctest::Approx(1.0));

  // test vectors use the training parameters verbatim
  VectorXd unseen(3);
  unseen << 4.0, 9.0, 10.0;
  const VectorXd mapped = t.apply(unseen);
  CHECK(mapped[0] == doctest::Approx((4.0 - 2.0) / 1.0));
  CHECK(mapped[1] == doctest::Approx(9.0 - 5.0));
}
