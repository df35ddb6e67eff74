#pragma once

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <utility>
#include <vector>

#include "qsflat/param_map.hpp"
#include "qsflat/probes.hpp"

namespace qsflat {

/// Parameterization of the transformed state (flat-output coordinates
/// plus the completion coordinate). The first n-1 configuration rows
/// are exact projections y^j and the first n-1 velocity rows are
/// exactly y^j_[1].
struct TransformedMap {
  std::vector<JetFunction> config;    // n rows
  std::vector<JetFunction> velocity;  // n rows
  const JetFunction& completion_config() const { return config.back(); }
  const JetFunction& completion_velocity() const { return velocity.back(); }
};

TransformedMap transform_map(const FlatSystem& sys, const ParameterizingMap& map);

/// Columns (channel, order) with order < kappa[channel], ordered by
/// derivative order first, channel second.
std::vector<std::pair<int, int>> kappa_columns(const MultiIndex& kappa);

/// Jacobian of a stack of jet functions with respect to the listed
/// columns, rows in stack order.
Eigen::MatrixXd jet_jacobian(const std::vector<JetFunction>& rows,
                             const std::vector<std::pair<int, int>>& cols, const JetPoint& p);

/// 2n x 4(n-1) Jacobian of (config, velocity) of the transformed map
/// with respect to derivative orders 0..3, order-major columns.
Eigen::MatrixXd full_jacobian(const TransformedMap& tmap, const JetPoint& p);

/// Square 2n x 2n submatrix: columns (channel j, order k) with
/// k < kappa[j]. Requires weight(kappa) = 2n.
Eigen::MatrixXd kappa_jacobian(const TransformedMap& tmap, const MultiIndex& kappa,
                               const JetPoint& p);

/// Smallest-to-largest singular value ratio; zero for a zero matrix.
double reciprocal_condition(const Eigen::MatrixXd& A);

enum class KappaMode {
  kCanonical,   // one fourth-order channel, second order elsewhere
  kExhaustive,  // every kappa <= R with weight 2n
};

struct KappaReport {
  MultiIndex kappa;
  bool weight_ok = false;
  bool generic_regular = false;
  bool equilibrium_regular = false;
  /// Condition number of the selected Jacobian at the first
  /// equilibrium probe (infinite when singular).
  double condition_number = 0.0;
};

struct StructureOptions {
  double dependence_threshold = 1e-9;  // below this a partial is identically zero
  double vanish_threshold = 1e-9;      // equilibrium vanishing check
  double rcond_min = 1e-10;            // regularity threshold
  KappaMode mode = KappaMode::kCanonical;
};

struct StructureReport {
  MultiIndex orders;  // minimal multi-index R
  bool bounds_ok = false;
  /// Channels whose second derivative enters the completion row of the
  /// transformed configuration parameterization (1-based).
  std::vector<int> second_order_channels;
  bool higher_order_ok = false;
  /// The completion velocity row's order-2 partials vanish at every
  /// equilibrium probe.
  bool equilibrium_vanishing_ok = false;
  std::vector<KappaReport> candidates;
  std::vector<std::string> failures;

  bool valid() const {
    return bounds_ok && !second_order_channels.empty() && higher_order_ok &&
           equilibrium_vanishing_ok && failures.empty();
  }
  std::vector<MultiIndex> equilibrium_regular_kappas() const;
  std::vector<MultiIndex> generic_regular_kappas() const;
  nlohmann::json to_json() const;
};

/// Candidate chain-order multi-indices, classified per probe: regular
/// at at least one generic probe (generic_regular) and regular at every
/// equilibrium probe (equilibrium_regular). Ascending lexicographic.
std::vector<KappaReport> enumerate_kappa(const TransformedMap& tmap, const MultiIndex& R,
                                         KappaMode mode, const ProbeSet& probes,
                                         double rcond_min = 1e-10);

/// Structural checks on the parameterization: order bounds, second-order
/// dependence, third/fourth-order propagation into the velocity and
/// input maps, vanishing of the completion velocity's order-2 partials
/// at equilibrium, and the kappa candidate classification.
StructureReport verify_structure(const FlatSystem& sys, const ParameterizingMap& map,
                                 const TransformedMap& tmap, const ProbeSet& probes,
                                 const StructureOptions& opts = {});

}  // namespace qsflat
