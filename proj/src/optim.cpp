#include "fpq/optim.hpp"

#include <cmath>
#include <iostream>
#include <limits>

namespace fpq::optim {
namespace {

using Eigen::VectorXd;

bool finite(double v) { return std::isfinite(v); }
bool finite(const VectorXd& v) { return v.allFinite(); }

// ---------------------------------------------------------------------------
// Strong Wolfe line search (bracket + zoom with secant interpolation).
// ---------------------------------------------------------------------------

struct LineSearchResult {
  bool ok = false;
  double alpha = 0.0;
  double fx = 0.0;
  VectorXd grad;
  int evals = 0;
};

// Tight curvature constant: the zoom's secant step then lands on the exact
// line minimum for quadratic objectives, which preserves the n-step
// termination property of BFGS.
constexpr double kArmijoC1 = 1e-4;
constexpr double kCurvatureC2 = 0.01;

LineSearchResult wolfe_line_search(const Objective& f, const VectorXd& x,
                                   const VectorXd& p, double f0, double dphi0) {
  LineSearchResult res;
  res.grad.resize(x.size());

  const int kMaxBracket = 20;
  const int kMaxZoom = 40;
  const double alpha_max = 1e8;

  VectorXd g(x.size());
  const auto phi = [&](double a, double& dphi) {
    const double v = f(x + a * p, &g);
    ++res.evals;
    dphi = g.dot(p);
    return v;
  };

  // zoom on a bracket [lo, hi] with phi(lo) the best Armijo point so far
  const auto zoom = [&](double alo, double flo, double dlo, double ahi,
                        double fhi, double dhi, bool have_dhi) -> bool {
    for (int it = 0; it < kMaxZoom; ++it) {
      double a;
      if (have_dhi && dhi != dlo) {
        // secant step on the derivative; exact for quadratics
        a = alo - dlo * (ahi - alo) / (dhi - dlo);
      } else {
        a = 0.5 * (alo + ahi);
      }
      const double lo = std::min(alo, ahi);
      const double hi = std::max(alo, ahi);
      if (!(a > lo + 1e-14) || !(a < hi - 1e-14)) a = 0.5 * (alo + ahi);
      double da;
      const double fa = phi(a, da);
      if (!finite(fa) || !finite(g)) return false;
      if (fa > f0 + kArmijoC1 * a * dphi0 || fa >= flo) {
        ahi = a;
        fhi = fa;
        dhi = da;
        have_dhi = true;
      } else {
        if (std::fabs(da) <= -kCurvatureC2 * dphi0) {
          res.ok = true;
          res.alpha = a;
          res.fx = fa;
          res.grad = g;
          return true;
        }
        if (da * (ahi - alo) >= 0.0) {
          ahi = alo;
          fhi = flo;
          dhi = dlo;
          have_dhi = true;
        }
        alo = a;
        flo = fa;
        dlo = da;
      }
      if (std::fabs(ahi - alo) < 1e-16 * std::max(1.0, std::fabs(alo))) break;
    }
    // accept the best Armijo point found, even without the curvature bound
    if (flo < f0 + kArmijoC1 * alo * dphi0 && alo > 0.0) {
      double da;
      const double fa = phi(alo, da);
      if (finite(fa) && finite(g)) {
        res.ok = true;
        res.alpha = alo;
        res.fx = fa;
        res.grad = g;
        return true;
      }
    }
    return false;
  };

  double aprev = 0.0, fprev = f0, dprev = dphi0;
  double a = 1.0;
  for (int i = 0; i < kMaxBracket; ++i) {
    double da;
    const double fa = phi(a, da);
    if (!finite(fa) || !finite(g)) {
      // step overshot into a non-finite region; shrink
      a = 0.5 * (aprev + a);
      continue;
    }
    if (fa > f0 + kArmijoC1 * a * dphi0 || (i > 0 && fa >= fprev)) {
      zoom(aprev, fprev, dprev, a, fa, da, true);
      return res;
    }
    if (std::fabs(da) <= -kCurvatureC2 * dphi0) {
      res.ok = true;
      res.alpha = a;
      res.fx = fa;
      res.grad = g;
      return res;
    }
    if (da >= 0.0) {
      zoom(a, fa, da, aprev, fprev, dprev, true);
      return res;
    }
    aprev = a;
    fprev = fa;
    dprev = da;
    a = std::min(2.0 * a, alpha_max);
    if (a >= alpha_max) break;
  }
  return res;
}

}  // namespace

const char* to_string(Status s) {
  switch (s) {
    case Status::Converged: return "converged";
    case Status::MaxIterations: return "max-iterations";
    case Status::CallbackStop: return "callback-stop";
    case Status::Diverged: return "diverged";
    case Status::LineSearchFailed: return "line-search-failed";
  }
  return "?";
}

Result scg_minimize(const Objective& f, Eigen::VectorXd x0, const Options& options,
                    const IterationCallback& callback) {
  const int n = static_cast<int>(x0.size());
  Result res;
  res.x = std::move(x0);

  VectorXd grad(n);
  double fx = f(res.x, &grad);
  if (!finite(fx) || !finite(grad)) {
    res.fx = fx;
    res.status = Status::Diverged;
    return res;
  }

  constexpr double kSigma = 1e-5;
  double lambda = 1e-6;
  double lambda_bar = 0.0;
  bool success = true;

  VectorXd r = -grad;     // negative gradient at the current point
  VectorXd p = r;         // search direction
  VectorXd step_grad(n);  // gradient at probe points
  VectorXd s(n);          // Hessian-vector estimate

  double delta = 0.0;
  res.status = Status::MaxIterations;

  for (int k = 1; k <= options.max_iterations; ++k) {
    const double p_norm2 = p.squaredNorm();
    if (p_norm2 == 0.0) {
      res.status = Status::Converged;
      res.iterations = k - 1;
      break;
    }

    if (success) {
      const double sigma_k = kSigma / std::sqrt(p_norm2);
      const double probe = f(res.x + sigma_k * p, &step_grad);
      if (!finite(probe) || !finite(step_grad)) {
        res.status = Status::Diverged;
        res.iterations = k - 1;
        break;
      }
      s = (step_grad - grad) / sigma_k;
      delta = p.dot(s);
    }

    delta += (lambda - lambda_bar) * p_norm2;
    if (delta <= 0.0) {  // make the curvature estimate positive definite
      lambda_bar = 2.0 * (lambda - delta / p_norm2);
      delta = -delta + lambda * p_norm2;
      lambda = lambda_bar;
    }

    const double mu = p.dot(r);
    const double alpha = mu / delta;

    VectorXd trial_grad(n);
    const double fx_trial = f(res.x + alpha * p, &trial_grad);
    if (!finite(fx_trial) || !finite(trial_grad)) {
      res.status = Status::Diverged;
      res.iterations = k - 1;
      break;
    }
    const double comparison = 2.0 * delta * (fx - fx_trial) / (mu * mu);

    if (comparison >= 0.0) {  // successful step
      res.x += alpha * p;
      fx = fx_trial;
      grad = trial_grad;
      const VectorXd r_new = -grad;
      lambda_bar = 0.0;
      success = true;
      if (k % n == 0) {
        p = r_new;  // restart
      } else {
        const double beta = (r_new.squaredNorm() - r_new.dot(r)) / mu;
        p = r_new + beta * p;
      }
      r = r_new;
      if (comparison >= 0.75) lambda *= 0.25;
    } else {
      lambda_bar = lambda;
      success = false;
    }
    if (comparison < 0.25) lambda += delta * (1.0 - comparison) / p_norm2;
    lambda = std::min(lambda, 1e50);

    if (callback && !callback(k, fx, res.x)) {
      res.status = Status::CallbackStop;
      res.iterations = k;
      res.fx = fx;
      return res;
    }
    if (r.norm() <= options.grad_tol) {
      res.status = Status::Converged;
      res.iterations = k;
      break;
    }
    res.iterations = k;
  }
  res.fx = fx;
  return res;
}

Result bfgs_minimize(const Objective& f, Eigen::VectorXd x0, const Options& options,
                     const IterationCallback& callback) {
  const int n = static_cast<int>(x0.size());
  Result res;
  res.x = std::move(x0);

  VectorXd grad(n);
  double fx = f(res.x, &grad);
  if (!finite(fx) || !finite(grad)) {
    res.fx = fx;
    res.status = Status::Diverged;
    return res;
  }

  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
  bool first_update = true;
  res.status = Status::MaxIterations;

  for (int k = 1; k <= options.max_iterations; ++k) {
    if (grad.norm() <= options.grad_tol) {
      res.status = Status::Converged;
      res.iterations = k - 1;
      break;
    }

    VectorXd p = -(H * grad);
    double dphi0 = grad.dot(p);
    if (!(dphi0 < 0.0)) {  // not a descent direction; reset the metric
      H.setIdentity();
      first_update = true;
      p = -grad;
      dphi0 = grad.dot(p);
    }

    LineSearchResult ls = wolfe_line_search(f, res.x, p, fx, dphi0);
    if (!ls.ok) {
      std::cerr << "bfgs: line search failed at iteration " << k
                << ", falling back to steepest descent\n";
      H.setIdentity();
      first_update = true;
      p = -grad;
      dphi0 = grad.dot(p);
      ls = wolfe_line_search(f, res.x, p, fx, dphi0);
      if (!ls.ok) {
        res.status = Status::LineSearchFailed;
        res.iterations = k - 1;
        break;
      }
    }

    const VectorXd s = ls.alpha * p;
    const VectorXd y = ls.grad - grad;
    res.x += s;
    fx = ls.fx;
    grad = ls.grad;

    const double ys = y.dot(s);
    if (ys > 1e-12 * y.norm() * s.norm()) {
      if (first_update) {
        H = (ys / y.squaredNorm()) * Eigen::MatrixXd::Identity(n, n);
        first_update = false;
      }
      const double rho = 1.0 / ys;
      const VectorXd Hy = H * y;
      const double yHy = y.dot(Hy);
      H.noalias() -= rho * (s * Hy.transpose() + Hy * s.transpose());
      H.noalias() += (rho * rho * yHy + rho) * (s * s.transpose());
    }

    res.iterations = k;
    if (callback && !callback(k, fx, res.x)) {
      res.status = Status::CallbackStop;
      res.fx = fx;
      return res;
    }
  }
  res.fx = fx;
  return res;
}

}  // namespace fpq::optim
