#pragma once

#include <Eigen/Dense>
#include <optional>

#include "qsflat/param_map.hpp"

namespace qsflat {

/// Samples of the new input and its time derivatives: channel j stores
/// w^j_[0..shape[j]] with shape = R - kappa.
class WJets : public JetPoint {
 public:
  using JetPoint::JetPoint;
  static WJets zero(const MultiIndex& shape) { return WJets(shape); }
};

struct NewtonOptions {
  double tol = 1e-12;          // residual infinity norm
  int max_iterations = 50;
  int max_backtracks = 30;
  double backtrack_factor = 0.5;
  double armijo_slope = 1e-4;
  double rcond_min = 1e-12;    // singular-Jacobian threshold
  double branch_jump = 1e3;    // continuity guard between consecutive solves
};

struct SolveStats {
  int iterations = 0;
  double residual = 0.0;
  bool warm_start = false;
};

/// Quasi-static feedback of the classical state: solves the state
/// parameterization for the low-order flat-output jets and composes
/// them with the input parameterization. Adds no integrated dynamics
/// of its own. Holds a mutable warm-start cache, so one instance is
/// single-threaded; copies snapshot the cache.
class QuasiStaticFeedback {
 public:
  QuasiStaticFeedback(const FlatSystem& sys, const ParameterizingMap& map,
                      MultiIndex kappa, NewtonOptions opts = {});

  const MultiIndex& kappa() const { return kappa_; }
  const MultiIndex& w_shape() const { return w_shape_; }      // R - kappa
  const MultiIndex& solved_shape() const { return low_shape_; }  // kappa - 1
  const ParameterizingMap& map() const { return map_; }
  const FlatSystem& system() const { return sys_; }

  /// Full jet of shape R: low orders from jets_low, orders >= kappa
  /// substituted from the new input's derivatives.
  JetPoint join(const JetPoint& jets_low, const WJets& w) const;

  /// (config, velocity)(join(jets_low, w)) - (q, v); zero exactly when
  /// jets_low inverts the state parameterization.
  Eigen::VectorXd residual(const JetPoint& jets_low, const Eigen::VectorXd& q,
                           const Eigen::VectorXd& v, const WJets& w) const;

  /// Jacobian of the residual with respect to the solved jet variables
  /// (columns ordered like the kappa-selected Jacobian).
  Eigen::MatrixXd residual_jacobian(const JetPoint& jets_low, const WJets& w) const;

  /// Damped Newton inversion of the state parameterization. Determinate
  /// given the guess; without one, uses the warm start, falling back to
  /// a constant jet built from the current flat output. Throws
  /// ConvergenceError / SingularityError on leaving the regular region.
  JetPoint solve_jets(const Eigen::VectorXd& q, const Eigen::VectorXd& v, const WJets& w,
                      const std::optional<JetPoint>& guess = {});

  /// The feedback law: u from the solved jets and the new input's
  /// derivatives through order R - kappa.
  Eigen::VectorXd control(const Eigen::VectorXd& q, const Eigen::VectorXd& v, const WJets& w);

  const SolveStats& last_stats() const { return stats_; }
  const std::optional<JetPoint>& warm_start() const { return warm_; }
  void reset_warm_start() { warm_.reset(); }

 private:
  JetPoint cold_start(const Eigen::VectorXd& q) const;

  FlatSystem sys_;
  ParameterizingMap map_;
  MultiIndex kappa_, w_shape_, low_shape_;
  std::vector<std::pair<int, int>> cols_;
  std::vector<JetFunction> state_rows_;  // config then velocity
  NewtonOptions opts_;
  std::optional<JetPoint> warm_;
  SolveStats stats_;
};

}  // namespace qsflat
