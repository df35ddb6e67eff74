#include "qsflat/feedback.hpp"

#include <cmath>
#include <limits>

#include "qsflat/errors.hpp"
#include "qsflat/structure.hpp"

namespace qsflat {

QuasiStaticFeedback::QuasiStaticFeedback(const FlatSystem& sys, const ParameterizingMap& map,
                                         MultiIndex kappa, NewtonOptions opts)
    : sys_(sys), map_(map), kappa_(std::move(kappa)), opts_(opts) {
  sys_.check();
  if (kappa_.size() != sys_.m)
    throw std::invalid_argument("kappa must have one entry per flat-output channel");
  if (kappa_.weight() != 2 * sys_.n)
    throw std::invalid_argument("kappa weight must equal the state dimension 2n (" +
                                std::to_string(2 * sys_.n) + "), got " +
                                std::to_string(kappa_.weight()));
  if (!mi_leq(kappa_, map_.orders))
    throw std::invalid_argument("kappa " + kappa_.str() + " exceeds the minimal orders " +
                                map_.orders.str());
  for (int j = 0; j < kappa_.size(); ++j)
    if (kappa_[j] < 2)
      throw std::invalid_argument(
          "kappa " + kappa_.str() + " has an entry below 2; the velocity identity rows "
          "make such a selection singular everywhere");
  w_shape_ = map_.orders - kappa_;
  low_shape_ = kappa_.shifted(-1);
  cols_ = kappa_columns(kappa_);
  state_rows_ = map_.config;
  state_rows_.insert(state_rows_.end(), map_.velocity.begin(), map_.velocity.end());
}

JetPoint QuasiStaticFeedback::join(const JetPoint& jets_low, const WJets& w) const {
  if (!(jets_low.shape() == low_shape_))
    throw std::invalid_argument("solved jets must have shape kappa - 1 = " + low_shape_.str());
  if (!(w.shape() == w_shape_))
    throw std::invalid_argument("new-input jets must have shape R - kappa = " +
                                w_shape_.str());
  JetPoint full(map_.orders);
  for (int j = 0; j < kappa_.size(); ++j) {
    for (int k = 0; k < kappa_[j]; ++k) full.set(j, k, jets_low.value(j, k));
    for (int i = 0; i <= w_shape_[j]; ++i) full.set(j, kappa_[j] + i, w.value(j, i));
  }
  return full;
}

Eigen::VectorXd QuasiStaticFeedback::residual(const JetPoint& jets_low,
                                              const Eigen::VectorXd& q,
                                              const Eigen::VectorXd& v, const WJets& w) const {
  JetPoint full = join(jets_low, w);
  Eigen::VectorXd r(2 * sys_.n);
  r.head(sys_.n) = map_.eval_config(full) - q;
  r.tail(sys_.n) = map_.eval_velocity(full) - v;
  return r;
}

Eigen::MatrixXd QuasiStaticFeedback::residual_jacobian(const JetPoint& jets_low,
                                                       const WJets& w) const {
  return jet_jacobian(state_rows_, cols_, join(jets_low, w));
}

JetPoint QuasiStaticFeedback::cold_start(const Eigen::VectorXd& q) const {
  Eigen::VectorXd y0 = eval_flat_output(sys_, q);
  return JetPoint::constant(low_shape_,
                            std::span<const double>(y0.data(), static_cast<std::size_t>(y0.size())));
}

JetPoint QuasiStaticFeedback::solve_jets(const Eigen::VectorXd& q, const Eigen::VectorXd& v,
                                         const WJets& w, const std::optional<JetPoint>& guess) {
  const bool warm_used = !guess && warm_.has_value();
  JetPoint x = guess ? *guess : (warm_ ? *warm_ : cold_start(q));
  if (!(x.shape() == low_shape_))
    throw std::invalid_argument("initial guess must have shape kappa - 1 = " + low_shape_.str());

  Eigen::VectorXd r = residual(x, q, v, w);
  double rn = r.lpNorm<Eigen::Infinity>();
  int iter = 0;
  while (rn > opts_.tol) {
    if (iter >= opts_.max_iterations)
      throw ConvergenceError("jet solve: no convergence after " +
                             std::to_string(opts_.max_iterations) +
                             " iterations (residual " + std::to_string(rn) + ")");
    ++iter;
    Eigen::MatrixXd J = residual_jacobian(x, w);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    double rcond = sv(0) > 0.0 ? sv(sv.size() - 1) / sv(0) : 0.0;
    if (rcond < opts_.rcond_min)
      throw SingularityError("jet solve: Jacobian singular along the solve path "
                             "(reciprocal condition " + std::to_string(rcond) + ")");
    Eigen::VectorXd dx = svd.solve(-r);

    double step = 1.0;
    int backtracks = 0;
    while (true) {
      JetPoint xn = x;
      {
        int c = 0;
        for (const auto& [j, k] : cols_) {
          xn.set(j, k, x.value(j, k) + step * dx[c]);
          ++c;
        }
      }
      double rn_new = std::numeric_limits<double>::infinity();
      Eigen::VectorXd r_new;
      try {
        r_new = residual(xn, q, v, w);
        rn_new = r_new.lpNorm<Eigen::Infinity>();
      } catch (const SingularityError&) {
        // candidate left the chart; shorten the step
      }
      if (rn_new <= (1.0 - opts_.armijo_slope * step) * rn || rn_new < opts_.tol) {
        x = xn;
        r = std::move(r_new);
        rn = rn_new;
        break;
      }
      if (++backtracks > opts_.max_backtracks)
        throw ConvergenceError("jet solve: line search stalled at residual " +
                               std::to_string(rn));
      step *= opts_.backtrack_factor;
    }
  }

  if (warm_used) {
    double jump = x.max_abs_diff(*warm_);
    if (jump > opts_.branch_jump)
      throw SingularityError("jet solve: solution jumped by " + std::to_string(jump) +
                             " between consecutive calls (possible branch switch)");
  }
  stats_ = SolveStats{iter, rn, warm_used};
  warm_ = x;
  return x;
}

Eigen::VectorXd QuasiStaticFeedback::control(const Eigen::VectorXd& q, const Eigen::VectorXd& v,
                                             const WJets& w) {
  JetPoint jets = solve_jets(q, v, w);
  return map_.eval_input(join(jets, w));
}

}  // namespace qsflat
