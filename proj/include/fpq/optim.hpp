#pragma once

#include <Eigen/Core>
#include <functional>

namespace fpq::optim {

// Value of the objective at x; when grad is non-null it receives the
// gradient. One evaluation per call, batch objectives do the batching.
using Objective =
    std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)>;

// Called after every iteration with the current iterate. Returning false
// stops the optimization (used for budget and early-stopping policies).
using IterationCallback =
    std::function<bool(int iteration, double fx, const Eigen::VectorXd& x)>;

enum class Status {
  Converged,        // gradient tolerance reached
  MaxIterations,
  CallbackStop,
  Diverged,         // non-finite objective/gradient; x is the last finite iterate
  LineSearchFailed  // no acceptable step even along steepest descent
};

const char* to_string(Status s);

struct Options {
  int max_iterations = 200;
  double grad_tol = 1e-10;  // stop when the gradient norm drops below this
};

struct Result {
  Eigen::VectorXd x;
  double fx = 0.0;
  int iterations = 0;
  Status status = Status::MaxIterations;
};

// Scaled conjugate gradient: conjugate directions with Hessian-vector
// products approximated by one-sided gradient differencing and a
// Levenberg-Marquardt style lambda adaptation in place of a line search.
Result scg_minimize(const Objective& f, Eigen::VectorXd x0, const Options& options,
                    const IterationCallback& callback = {});

// BFGS on the inverse Hessian with a strong-Wolfe line search. A failing
// line search falls back to one steepest-descent attempt before giving up.
Result bfgs_minimize(const Objective& f, Eigen::VectorXd x0, const Options& options,
                     const IterationCallback& callback = {});

}  // namespace fpq::optim
