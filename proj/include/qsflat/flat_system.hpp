#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "qsflat/jet_function.hpp"
#include "qsflat/smooth_map.hpp"

namespace qsflat {

struct BoxInterval {
  double lo = -1.0;
  double hi = 1.0;
};

/// Sampling region for jet variables: [channel][derivative order].
using JetBox = std::vector<std::vector<BoxInterval>>;

/// A mechanical control system in classical state form (q, v) with one
/// input less than degrees of freedom, a configuration flat output, a
/// completion coordinate making (flat_output, completion) a local
/// diffeomorphism, and a closed-form configuration parameterization.
struct FlatSystem {
  std::string name;
  int n = 0;  // degrees of freedom
  int m = 0;  // inputs = n - 1

  SmoothMap dynamics;      // (q, v, u) -> vdot;  in 2n+m, out n
  SmoothMap drift;         // a(q, v);            in 2n,   out n
  SmoothMap input_matrix;  // b(q), row-major;    in n,    out n*m
  SmoothMap flat_output;   // phi(q);             in n,    out m
  SmoothMap completion;    // g^n(q);             in n,    out 1

  /// Configuration parameterization: n jet functions giving q from the
  /// flat output and its derivatives.
  std::vector<JetFunction> Fq;

  std::map<std::string, double> parameters;

  Eigen::VectorXd nominal_ys;  // default equilibrium flat-output value
  JetBox probe_box;            // chart-safe sampling region, orders 0..4

  bool has_input_matrix() const { return input_matrix.valid() && drift.valid(); }

  /// Structural validation: dimensions consistent, minimally
  /// underactuated (m = n-1 >= 1). Throws ModelError otherwise.
  void check() const;
};

// Eigen conveniences over the span-based maps.
Eigen::VectorXd eval_dynamics(const FlatSystem& sys, const Eigen::VectorXd& q,
                              const Eigen::VectorXd& v, const Eigen::VectorXd& u);
Eigen::VectorXd eval_flat_output(const FlatSystem& sys, const Eigen::VectorXd& q);
Eigen::VectorXd eval_drift(const FlatSystem& sys, const Eigen::VectorXd& q,
                           const Eigen::VectorXd& v);
Eigen::MatrixXd eval_input_matrix(const FlatSystem& sys, const Eigen::VectorXd& q);

}  // namespace qsflat
