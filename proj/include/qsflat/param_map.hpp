#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "qsflat/flat_system.hpp"

namespace qsflat {

/// The parameterization of state and input by the flat output: q, v and
/// u as functions of the flat output's time derivatives, together with
/// the minimal per-channel derivative orders.
struct ParameterizingMap {
  std::vector<JetFunction> config;    // n components, orders 0..R-2
  std::vector<JetFunction> velocity;  // n components, orders 0..R-1
  std::vector<JetFunction> input;     // m components, orders 0..R
  MultiIndex orders;                  // minimal multi-index R

  Eigen::VectorXd eval_config(const JetPoint& p) const;
  Eigen::VectorXd eval_velocity(const JetPoint& p) const;
  Eigen::VectorXd eval_input(const JetPoint& p) const;
};

/// Velocity parameterization: total time derivative of each
/// configuration component.
std::vector<JetFunction> derive_velocity_map(const FlatSystem& sys);

/// Input parameterization: substitute the configuration and velocity
/// parameterizations into the input-affine dynamics and solve the n
/// equations b(q) u = accel - a(q, v) for the m inputs by least squares.
/// Evaluation throws ModelError when the consistency residual exceeds
/// the tolerance (a wrong parameterization or model) and
/// SingularityError when b loses column rank.
std::vector<JetFunction> derive_input_map(const FlatSystem& sys,
                                          double consistency_tol = 1e-8);

struct OrderProbeOptions {
  int samples = 1000;
  double threshold = 1e-9;  // below this a partial counts as identically zero
  std::uint64_t seed = 20240;
};

/// Minimal derivative orders: per channel, 2 plus the highest order with
/// a nonvanishing configuration partial on a random chart sample.
/// Probabilistic with zero-probability false negatives.
MultiIndex minimal_orders(const FlatSystem& sys, const OrderProbeOptions& opts = {});

/// Same probing on a bare configuration parameterization with an
/// explicit sampling box.
MultiIndex minimal_orders(const std::vector<JetFunction>& Fq, const JetBox& box,
                          const OrderProbeOptions& opts = {});

ParameterizingMap build_parameterizing_map(const FlatSystem& sys,
                                           const OrderProbeOptions& opts = {});

struct Equilibrium {
  Eigen::VectorXd y_s;  // flat-output value
  Eigen::VectorXd q_s;  // rest configuration
  Eigen::VectorXd u_s;  // holding input
};

/// Equilibrium from a constant jet (y_s, 0, ..., 0). Throws ModelError
/// when the dynamics residual at rest exceeds the tolerance.
Equilibrium find_equilibrium(const FlatSystem& sys, const ParameterizingMap& map,
                             const Eigen::VectorXd& y_s, double tol = 1e-10);

}  // namespace qsflat
